//! Dense real polynomials and closed-form Caputo/Riesz derivatives of them.

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// `sum_k coeffs[k] x^k`
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::new(vec![1.0]), |acc, _| acc.mul(self))
    }

    /// Coefficients `d_k` with `p(x) = sum_k d_k (x - a)^k`.
    pub fn expand_about(&self, a: f64) -> Vec<f64> {
        let n = self.coeffs.len();
        (0..n)
            .map(|k| {
                (k..n)
                    .map(|j| self.coeffs[j] * binomial(j, k) * a.powi((j - k) as i32))
                    .sum()
            })
            .collect()
    }

    /// Coefficients `d_k` with `p(x) = sum_k d_k (b - x)^k`.
    pub fn expand_reflected(&self, b: f64) -> Vec<f64> {
        self.expand_about(b)
            .into_iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c } else { -c })
            .collect()
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && *self.coeffs.last().unwrap() == 0.0 {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(0.0);
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Caputo power-rule data of a polynomial on `[a, b]`, evaluating the Riesz
/// fractional derivative `-(-Delta)^{alpha/2} p` for `1 < alpha < 2`.
#[derive(Debug, Clone)]
pub struct PolyFracForm {
    pub domain: (f64, f64),
    /// `(k, c)` terms of `p` in powers of `(x - a)`.
    pub coeffs_left: Vec<(usize, f64)>,
    /// `(k, c)` terms of `p` in powers of `(b - x)`.
    pub coeffs_right: Vec<(usize, f64)>,
    pub alpha: f64,
}

impl PolyFracForm {
    pub fn new(p: &Polynomial, alpha: f64, domain: (f64, f64)) -> Result<Self> {
        if !(alpha > 1.0 && alpha < 2.0) {
            return Err(Error::InvalidOrder(alpha));
        }
        let (a, b) = domain;
        if !(a < b) {
            return Err(Error::InvalidDomain { a, b });
        }
        let terms = |c: Vec<f64>| -> Vec<(usize, f64)> {
            c.into_iter().enumerate().filter(|(_, c)| *c != 0.0).collect()
        };
        Ok(Self {
            domain,
            coeffs_left: terms(p.expand_about(a)),
            coeffs_right: terms(p.expand_reflected(b)),
            alpha,
        })
    }

    /// Left Caputo derivative of order alpha from `a`.
    pub fn left_caputo(&self, x: f64) -> f64 {
        let y = (x - self.domain.0).max(0.0);
        caputo_sum(&self.coeffs_left, self.alpha, y)
    }

    /// Right Caputo derivative of order alpha from `b`.
    pub fn right_caputo(&self, x: f64) -> f64 {
        let y = (self.domain.1 - x).max(0.0);
        caputo_sum(&self.coeffs_right, self.alpha, y)
    }

    /// `-(-Delta)^{alpha/2} p (x) = -(left + right) / (2 cos(pi alpha / 2))`.
    pub fn eval(&self, x: f64) -> f64 {
        let c = (std::f64::consts::PI * self.alpha / 2.0).cos();
        -(self.left_caputo(x) + self.right_caputo(x)) / (2.0 * c)
    }

    /// Evaluates both expansions at `x` (they represent the same polynomial).
    pub fn expansions_at(&self, x: f64) -> (f64, f64) {
        let l = self
            .coeffs_left
            .iter()
            .map(|&(k, c)| c * (x - self.domain.0).powi(k as i32))
            .sum();
        let r = self
            .coeffs_right
            .iter()
            .map(|&(k, c)| c * (self.domain.1 - x).powi(k as i32))
            .sum();
        (l, r)
    }
}

fn caputo_sum(terms: &[(usize, f64)], alpha: f64, y: f64) -> f64 {
    terms
        .iter()
        .filter(|(k, _)| *k >= 2)
        .map(|&(k, c)| {
            let kf = k as f64;
            c * gamma(kf + 1.0) / gamma(kf + 1.0 - alpha) * y.powf(kf - alpha)
        })
        .sum()
}

/// Evaluator for the Riesz fractional derivative of `p` on `domain`.
pub fn frac_laplacian_poly(p: &Polynomial, alpha: f64, domain: (f64, f64)) -> Result<PolyFracForm> {
    PolyFracForm::new(p, alpha, domain)
}
