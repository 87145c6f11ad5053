//! LDG scheme for two coupled nonlinear fractional Schrödinger equations
//!
//! ```text
//! i u1_t - lambda1 (-Delta)^{alpha/2} u1 + varpi1 u1 + varpi2 u2 + lambda2 f(|u1|^2, |u2|^2) u1 = g1
//! i u2_t - lambda3 (-Delta)^{alpha/2} u2 + varpi1 u2 + c21 u1 + lambda4 g(|u1|^2, |u2|^2) u2 = g2
//! ```
//!
//! where `c21` defaults to `varpi2`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::LocalOps;
use crate::error::{Error, Result};
use crate::fractional::{Polynomial, RieszOperator};
use crate::ldg::{
    boundary_values, build_aux_chain, check_alpha, mass, poly_frac_laplacian, project_forcing, ComplexField, ComplexFn,
    PointwiseProjector,
};
use crate::mesh::Mesh;
use crate::time::OdeState;

/// Coupling nonlinearities `f(rho1, rho2)` and `g(rho1, rho2)`.
#[derive(Clone)]
pub enum CoupledNonlinearity {
    /// `f = g = 1`.
    Linear,
    /// `f = rho1 + beta rho2`, `g = beta rho1 + rho2`.
    Manakov { beta: f64 },
    Custom {
        f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
        g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    },
}

impl CoupledNonlinearity {
    pub fn eval(&self, rho1: f64, rho2: f64) -> (f64, f64) {
        match self {
            CoupledNonlinearity::Linear => (1.0, 1.0),
            CoupledNonlinearity::Manakov { beta } => (rho1 + beta * rho2, beta * rho1 + rho2),
            CoupledNonlinearity::Custom { f, g } => (f(rho1, rho2), g(rho1, rho2)),
        }
    }
}

impl std::fmt::Debug for CoupledNonlinearity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoupledNonlinearity::Linear => write!(f, "Linear"),
            CoupledNonlinearity::Manakov { beta } => write!(f, "Manakov {{ beta: {beta} }}"),
            CoupledNonlinearity::Custom { .. } => write!(f, "Custom(..)"),
        }
    }
}

#[derive(Clone)]
pub struct CoupledProblem {
    pub alpha: f64,
    /// `[lambda1, lambda2, lambda3, lambda4]`
    pub lambda: [f64; 4],
    /// Self-coupling coefficient, shared by both equations.
    pub varpi1: f64,
    /// Coefficient of `u2` in the first equation.
    pub varpi2: f64,
    /// Coefficient of `u1` in the second equation, `varpi2` when absent.
    pub varpi2_reverse: Option<f64>,
    pub nonlinearity: CoupledNonlinearity,
    pub forcing: Option<(ComplexFn, ComplexFn)>,
    pub exact: Option<(ComplexFn, ComplexFn)>,
    /// Dirichlet data for each component; homogeneous when absent.
    pub boundary: Option<(ComplexFn, ComplexFn)>,
    /// Profiles of a manufactured solution `u_i = e^{-it} P_i(x)`.
    pub profiles: Option<(Polynomial, Polynomial)>,
}

impl std::fmt::Debug for CoupledProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CoupledProblem")
            .field("alpha", &self.alpha)
            .field("lambda", &self.lambda)
            .field("varpi1", &self.varpi1)
            .field("varpi2", &self.varpi2)
            .field("varpi2_reverse", &self.varpi2_reverse)
            .field("nonlinearity", &self.nonlinearity)
            .field("forced", &self.forcing.is_some())
            .field("profiles", &self.profiles)
            .finish()
    }
}

impl CoupledProblem {
    pub fn new(
        alpha: f64,
        lambda: [f64; 4],
        varpi1: f64,
        varpi2: f64,
        nonlinearity: CoupledNonlinearity,
    ) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            alpha,
            lambda,
            varpi1,
            varpi2,
            varpi2_reverse: None,
            nonlinearity,
            forcing: None,
            exact: None,
            boundary: None,
            profiles: None,
        })
    }

    pub fn reverse_coupling(&self) -> f64 {
        self.varpi2_reverse.unwrap_or(self.varpi2)
    }

    /// Attaches the exact solution `u_i = e^{-it} P_i(x)` and the forcing pair it implies.
    pub fn with_manufactured(mut self, p1: Polynomial, p2: Polynomial, domain: (f64, f64)) -> Result<Self> {
        let lap1 = poly_frac_laplacian(&p1, self.alpha, domain)?;
        let lap2 = poly_frac_laplacian(&p2, self.alpha, domain)?;
        let [l1, l2, l3, l4] = self.lambda;
        let (w1, w2, c21) = (self.varpi1, self.varpi2, self.reverse_coupling());
        let nl = self.nonlinearity.clone();
        let spatial = Arc::new({
            let (p1, p2) = (p1.clone(), p2.clone());
            move |x: f64| {
                let (a, b) = (p1.eval(x), p2.eval(x));
                let (fv, gv) = nl.eval(a * a, b * b);
                let s1 = a + l1 * lap1(x) + w1 * a + w2 * b + l2 * fv * a;
                let s2 = b + l3 * lap2(x) + w1 * b + c21 * a + l4 * gv * b;
                (s1, s2)
            }
        });
        let (sa, sb) = (spatial.clone(), spatial);
        let g1: ComplexFn = Arc::new(move |x, t| Complex64::from_polar(1.0, -t) * sa(x).0);
        let g2: ComplexFn = Arc::new(move |x, t| Complex64::from_polar(1.0, -t) * sb(x).1);
        let (e1, e2) = (p1.clone(), p2.clone());
        let u1: ComplexFn = Arc::new(move |x, t| Complex64::from_polar(1.0, -t) * e1.eval(x));
        let u2: ComplexFn = Arc::new(move |x, t| Complex64::from_polar(1.0, -t) * e2.eval(x));
        self.forcing = Some((g1, g2));
        self.exact = Some((u1, u2));
        self.boundary = self.exact.clone();
        self.profiles = Some((p1, p2));
        Ok(self)
    }

    /// Max-norm residual of both equations for the stored manufactured solution,
    /// sampled at `points` equispaced abscissae at time `t`.
    pub fn manufactured_residual(&self, domain: (f64, f64), points: usize, t: f64) -> Result<[f64; 2]> {
        let (Some((u1, u2)), Some((p1, p2))) = (&self.exact, &self.profiles) else {
            return Err(Error::Config("problem has no manufactured solution".into()));
        };
        let lap1 = poly_frac_laplacian(p1, self.alpha, domain)?;
        let lap2 = poly_frac_laplacian(p2, self.alpha, domain)?;
        let zero = Complex64::new(0.0, 0.0);
        let [l1, l2, l3, l4] = self.lambda;
        let h = 1e-5;
        let phase = Complex64::from_polar(1.0, -t);
        let mut worst = [0.0f64; 2];
        for i in 0..points {
            let x = domain.0 + (domain.1 - domain.0) * i as f64 / (points - 1).max(1) as f64;
            let (a, b) = (u1(x, t), u2(x, t));
            let at = (u1(x, t + h) - u1(x, t - h)) / (2.0 * h);
            let bt = (u2(x, t + h) - u2(x, t - h)) / (2.0 * h);
            let (g1, g2) = match &self.forcing {
                Some((g1, g2)) => (g1(x, t), g2(x, t)),
                None => (zero, zero),
            };
            let (fv, gv) = self.nonlinearity.eval(a.norm_sqr(), b.norm_sqr());
            let r1 = Complex64::i() * at + l1 * phase * lap1(x) + self.varpi1 * a + self.varpi2 * b + l2 * fv * a - g1;
            let r2 = Complex64::i() * bt
                + l3 * phase * lap2(x)
                + self.varpi1 * b
                + self.reverse_coupling() * a
                + l4 * gv * b
                - g2;
            worst[0] = worst[0].max(r1.norm());
            worst[1] = worst[1].max(r2.norm());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledState {
    pub u1: ComplexField,
    pub u2: ComplexField,
}

impl CoupledState {
    pub fn check_shape(&self, mesh: &Mesh) -> Result<()> {
        self.u1.check_shape(mesh)?;
        self.u2.check_shape(mesh)
    }
}

impl OdeState for CoupledState {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.u1.axpy(a, &x.u1);
        self.u2.axpy(a, &x.u2);
    }

    fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }
}

/// Time derivative of the coupled semidiscrete system.
pub fn rhs_coupled(
    state: &CoupledState,
    prob: &CoupledProblem,
    t: f64,
    riesz: &RieszOperator,
    mesh: &Mesh,
    ops: &LocalOps,
) -> CoupledState {
    let (b1, b2) = match &prob.boundary {
        Some((g1, g2)) => (boundary_values(Some(g1), mesh, t), boundary_values(Some(g2), mesh, t)),
        None => (boundary_values(None, mesh, t), boundary_values(None, mesh, t)),
    };
    let c1 = build_aux_chain(&state.u1, b1, riesz, mesh, ops);
    let c2 = build_aux_chain(&state.u2, b2, riesz, mesh, ops);
    let [l1, l2, l3, l4] = prob.lambda;
    let (w1, w2, c21) = (prob.varpi1, prob.varpi2, prob.reverse_coupling());
    let (mut dp, mut dq, mut du, mut dth) = (c1.e, c1.l, c2.e, c2.l);
    dp.scale(-l1);
    dq.scale(l1);
    du.scale(-l3);
    dth.scale(l3);
    let (u1, u2) = (&state.u1, &state.u2);
    dp.axpy(-w1, &u1.im);
    dp.axpy(-w2, &u2.im);
    dq.axpy(w1, &u1.re);
    dq.axpy(w2, &u2.re);
    du.axpy(-c21, &u1.im);
    du.axpy(-w1, &u2.im);
    dth.axpy(c21, &u1.re);
    dth.axpy(w1, &u2.re);
    if l2 != 0.0 || l4 != 0.0 {
        let nl = &prob.nonlinearity;
        let inputs = [&u1.re, &u1.im, &u2.re, &u2.im];
        let [fq, fp, gth, gv] = PointwiseProjector::new(ops).project(inputs, mesh, |[p, q, v, th]| {
            let (fv, gv) = nl.eval(p * p + q * q, v * v + th * th);
            [fv * q, fv * p, gv * th, gv * v]
        });
        dp.axpy(-l2, &fq);
        dq.axpy(l2, &fp);
        du.axpy(-l4, &gth);
        dth.axpy(l4, &gv);
    }
    if let Some((g1, g2)) = &prob.forcing {
        let (a, b) = (project_forcing(g1, t, mesh, ops), project_forcing(g2, t, mesh, ops));
        dp.axpy(1.0, &a.im);
        dq.axpy(-1.0, &a.re);
        du.axpy(1.0, &b.im);
        dth.axpy(-1.0, &b.re);
    }
    CoupledState {
        u1: ComplexField { re: dp, im: dq },
        u2: ComplexField { re: du, im: dth },
    }
}

/// Discrete masses `(||u1||^2, ||u2||^2)`.
pub fn component_masses(state: &CoupledState, mesh: &Mesh, ops: &LocalOps) -> (f64, f64) {
    (mass(&state.u1, mesh, ops), mass(&state.u2, mesh, ops))
}
