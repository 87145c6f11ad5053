//! Weak (Galerkin) form of the Riesz integral on the broken polynomial space:
//! `B_ij = c ∫∫ |x - s|^{mu - 1} phi_i(x) phi_j(s) ds dx` with
//! `c = 1 / (Gamma(mu) 2 cos(pi mu / 2))`.
//!
//! The kernel is symmetric, so `B` is symmetric, and positive semidefinite
//! since the Riesz potential is. Self and neighbour element pairs carry the
//! singularity and are integrated after a Duffy split with Gauss-Jacobi rules
//! that are exact in the radial variable; separated pairs use tensor
//! Gauss-Legendre.

use nalgebra::DMatrix;
use statrs::function::gamma::gamma;

use crate::basis::LocalOps;
use crate::error::Result;
use crate::mesh::Mesh;
use crate::quadrature::{gauss_jacobi, QuadratureRule};

const SMOOTH_EXTRA_POINTS: usize = 12;
const SEPARATED_EXTRA_POINTS: usize = 8;

/// Rule on `[0, 1]` for the weight `xi^b`.
fn unit_jacobi(n: usize, b: f64) -> Result<QuadratureRule> {
    let rule = gauss_jacobi(n, 0.0, b)?;
    let scale = 0.5f64.powf(b + 1.0);
    Ok(QuadratureRule {
        points: rule.points.iter().map(|t| 0.5 * (1.0 + t)).collect(),
        weights: rule.weights.iter().map(|w| w * scale).collect(),
    })
}

fn unit_legendre(n: usize) -> Result<QuadratureRule> {
    unit_jacobi(n, 0.0)
}

/// Basis values at unit-interval points `xi`, reference coordinate `2 xi - 1`.
fn basis_at(ops: &LocalOps, xi: &[f64]) -> DMatrix<f64> {
    let refs: Vec<f64> = xi.iter().map(|x| 2.0 * x - 1.0).collect();
    ops.interpolation_matrix(&refs)
}

/// Symmetric weak-form matrix `B` over the global nodal basis.
pub fn assemble_galerkin_form(mesh: &Mesh, ops: &LocalOps, mu: f64) -> Result<DMatrix<f64>> {
    let np = ops.np();
    let n = ops.degree;
    let kc = mesh.elements();
    let radial = unit_jacobi(n + 1, mu)?;
    let angular = unit_jacobi(n + 1, mu - 1.0)?;
    let smooth = unit_legendre(n + SMOOTH_EXTRA_POINTS)?;
    let separated = unit_legendre(n + SEPARATED_EXTRA_POINTS)?;
    let sep_basis = basis_at(ops, &separated.points);
    let mut b = DMatrix::<f64>::zeros(kc * np, kc * np);

    // same element: triangle eta < xi with eta = xi (1 - v), doubled by symmetry
    let mut unit_self = DMatrix::<f64>::zeros(np, np);
    let phi_r = basis_at(ops, &radial.points);
    for (qa, (&xi, &wa)) in radial.points.iter().zip(&radial.weights).enumerate() {
        let etas: Vec<f64> = angular.points.iter().map(|v| xi * (1.0 - v)).collect();
        let phi_e = basis_at(ops, &etas);
        for (qb, &wb) in angular.weights.iter().enumerate() {
            for i in 0..np {
                for j in 0..np {
                    unit_self[(i, j)] += wa * wb * phi_r[(qa, i)] * phi_e[(qb, j)];
                }
            }
        }
    }
    let unit_self = &unit_self + unit_self.transpose();

    for p in 0..kc {
        let hp = mesh.dx[p];
        let block = &unit_self * hp.powf(mu + 1.0);
        b.view_mut((p * np, p * np), (np, np)).copy_from(&block);
        for q in 0..p {
            let hq = mesh.dx[q];
            let block = if q + 1 == p {
                neighbour_block(ops, mu, hp, hq, &radial, &smooth)
            } else {
                let xl = mesh.faces[p];
                let sl = mesh.faces[q];
                let mut blk = DMatrix::<f64>::zeros(np, np);
                for (a, (&xi, &wa)) in separated.points.iter().zip(&separated.weights).enumerate() {
                    let x = xl + hp * xi;
                    for (c, (&eta, &wc)) in separated.points.iter().zip(&separated.weights).enumerate() {
                        let s = sl + hq * eta;
                        let k = wa * wc * (x - s).powf(mu - 1.0);
                        for i in 0..np {
                            for j in 0..np {
                                blk[(i, j)] += k * sep_basis[(a, i)] * sep_basis[(c, j)];
                            }
                        }
                    }
                }
                blk * (hp * hq)
            };
            b.view_mut((p * np, q * np), (np, np)).copy_from(&block);
            b.view_mut((q * np, p * np), (np, np)).copy_from(&block.transpose());
        }
    }
    let c = 1.0 / (gamma(mu) * 2.0 * (std::f64::consts::PI * mu / 2.0).cos());
    Ok(b * c)
}

/// Element `p` (test) directly right of element `q` (trial), sharing a face.
/// With `y = hp xi` right of the face and `sigma = hq eta` left of it the
/// kernel is `(hp xi + hq eta)^{mu - 1}`, singular only at the shared corner.
fn neighbour_block(
    ops: &LocalOps,
    mu: f64,
    hp: f64,
    hq: f64,
    radial: &QuadratureRule,
    smooth: &QuadratureRule,
) -> DMatrix<f64> {
    let np = ops.np();
    let mut blk = DMatrix::<f64>::zeros(np, np);
    // trial basis of the left element in eta: reference coordinate 1 - 2 eta
    let trial_at = |eta: &[f64]| basis_at(ops, &eta.iter().map(|e| 1.0 - e).collect::<Vec<_>>());
    let phi_r = basis_at(ops, &radial.points);
    let psi_r = trial_at(&radial.points);
    for (qa, (&tau, &wa)) in radial.points.iter().zip(&radial.weights).enumerate() {
        let scaled: Vec<f64> = smooth.points.iter().map(|v| tau * v).collect();
        let phi_s = basis_at(ops, &scaled);
        let psi_s = trial_at(&scaled);
        for (qb, (&v, &wb)) in smooth.points.iter().zip(&smooth.weights).enumerate() {
            // eta = tau v <= xi = tau
            let k1 = wa * wb * (hp + hq * v).powf(mu - 1.0);
            // xi = tau v <= eta = tau
            let k2 = wa * wb * (hp * v + hq).powf(mu - 1.0);
            for i in 0..np {
                for j in 0..np {
                    blk[(i, j)] += k1 * phi_r[(qa, i)] * psi_s[(qb, j)] + k2 * phi_s[(qb, i)] * psi_r[(qa, j)];
                }
            }
        }
    }
    blk * (hp * hq)
}

/// `M^{-1} B` with the block-diagonal broken mass matrix `M`.
pub(crate) fn project(mesh: &Mesh, ops: &LocalOps, form: &DMatrix<f64>) -> DMatrix<f64> {
    let np = ops.np();
    let mut out = form.clone();
    for k in 0..mesh.elements() {
        let minv = &ops.mass_inv * (2.0 / mesh.dx[k]);
        let rows = form.rows(k * np, np).into_owned();
        out.rows_mut(k * np, np).copy_from(&(minv * rows));
    }
    out
}
