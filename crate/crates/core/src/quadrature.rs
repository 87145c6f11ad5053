//! Gauss-type quadrature rules on the reference interval [-1, 1].
//!
//! Gauss-Jacobi rules come from the Golub-Welsch eigenvalue problem for the
//! Jacobi three-term recurrence. Gauss-Lobatto-Legendre nodes use Newton
//! iteration on `(1 - x^2) P_N'(x)` started from Chebyshev-Gauss-Lobatto points.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Points and weights of a quadrature rule on [-1, 1], points ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrates `f` against the rule's weight function on [-1, 1].
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss-Jacobi rule for the weight `(1 - t)^a (1 + t)^b`.
///
/// Exact for polynomials of degree `2n - 1` against the weight.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Quadrature("rule needs at least one point".into()));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Quadrature(format!(
            "Jacobi exponents must exceed -1, got a = {a}, b = {b}"
        )));
    }
    let ab = a + b;
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let diag = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        jacobi[(k, k)] = diag;
        if k + 1 < n {
            let m = kf + 1.0;
            let beta = if k == 0 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * m * (m + a) * (m + b) * (m + ab)
                    / ((2.0 * m + ab).powi(2) * (2.0 * m + ab + 1.0) * (2.0 * m + ab - 1.0))
            };
            let off = beta.sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let log_mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = log_mu0.exp();

    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
    Ok(QuadratureRule {
        points: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// `n`-point Gauss-Legendre rule.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    let mut rule = gauss_jacobi(n, 0.0, 0.0)?;
    symmetrize(&mut rule.points, &mut rule.weights);
    Ok(rule)
}

/// Legendre-Gauss-Lobatto nodes and weights for polynomial degree `degree`.
///
/// Returns `degree + 1` nodes, ascending, with `r[0] = -1` and `r[degree] = 1`.
pub fn lgl_nodes(degree: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if degree == 0 {
        return Err(Error::InvalidDegree(degree));
    }
    let n = degree;
    let np = n + 1;
    let nf = n as f64;
    // Chebyshev-Gauss-Lobatto initial guess, descending from +1.
    let mut x: Vec<f64> = (0..np)
        .map(|i| (std::f64::consts::PI * i as f64 / nf).cos())
        .collect();
    let mut p = vec![vec![0.0; np]; np];
    for _ in 0..100 {
        let x_old = x.clone();
        for (i, &xi) in x.iter().enumerate() {
            p[i][0] = 1.0;
            p[i][1] = xi;
            for k in 2..np {
                let kf = k as f64;
                p[i][k] = ((2.0 * kf - 1.0) * xi * p[i][k - 1] - (kf - 1.0) * p[i][k - 2]) / kf;
            }
        }
        let mut change: f64 = 0.0;
        for i in 0..np {
            let step = (x[i] * p[i][n] - p[i][n - 1]) / (np as f64 * p[i][n]);
            x[i] = x_old[i] - step;
            change = change.max((x[i] - x_old[i]).abs());
        }
        if change < 1e-15 {
            break;
        }
    }
    let mut nodes: Vec<f64> = x.iter().rev().copied().collect();
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&xi| {
            let pn = legendre(n, xi);
            2.0 / (nf * (nf + 1.0) * pn * pn)
        })
        .collect();
    symmetrize(&mut nodes, &mut weights);
    Ok((nodes, weights))
}

/// Classical (unnormalized) Legendre polynomial `P_n(x)`.
pub fn legendre(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return p0;
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Orthonormal Legendre polynomials `sqrt((2j+1)/2) P_j` and their derivatives
/// for `j = 0..=degree`, evaluated at `x`.
pub fn orthonormal_legendre(degree: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; degree + 1];
    let mut dp = vec![0.0; degree + 1];
    p[0] = 1.0;
    if degree >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for k in 2..=degree {
        let kf = k as f64;
        p[k] = ((2.0 * kf - 1.0) * x * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
        // P'_k = P'_{k-2} + (2k - 1) P_{k-1}
        dp[k] = dp[k - 2] + (2.0 * kf - 1.0) * p[k - 1];
    }
    for j in 0..=degree {
        let scale = ((2 * j + 1) as f64 / 2.0).sqrt();
        p[j] *= scale;
        dp[j] *= scale;
    }
    (p, dp)
}

/// Enforces exact mirror symmetry `x_i = -x_{n-1-i}` of a symmetric rule.
fn symmetrize(points: &mut [f64], weights: &mut [f64]) {
    let n = points.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (points[j] - points[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        points[i] = -x;
        points[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        points[n / 2] = 0.0;
    }
}
