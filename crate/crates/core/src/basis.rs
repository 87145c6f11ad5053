//! Reference-element operators for the nodal basis on [-1, 1].

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::{lgl_nodes, orthonormal_legendre};

/// Nodal reference-element machinery for polynomial degree `degree`.
///
/// Nodes are the Legendre-Gauss-Lobatto points; the modal basis is the
/// orthonormal Legendre family, so the exact mass matrix is `(V V^T)^{-1}`.
#[derive(Debug, Clone)]
pub struct LocalOps {
    pub degree: usize,
    /// Reference nodes, ascending.
    pub r: Vec<f64>,
    /// LGL quadrature weights.
    pub w: Vec<f64>,
    /// `v[(i, j)]` = orthonormal Legendre polynomial `j` at `r[i]`.
    pub v: DMatrix<f64>,
    pub v_inv: DMatrix<f64>,
    /// Reference differentiation matrix `Vr V^{-1}`.
    pub dr: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub mass_inv: DMatrix<f64>,
    /// `Np x 2` lift: column 0 for the left face (r = -1), column 1 for the right.
    pub lift: DMatrix<f64>,
}

impl LocalOps {
    pub fn new(degree: usize) -> Result<Self> {
        let (r, w) = lgl_nodes(degree)?;
        let np = degree + 1;
        let mut v = DMatrix::zeros(np, np);
        let mut vr = DMatrix::zeros(np, np);
        for (i, &ri) in r.iter().enumerate() {
            let (p, dp) = orthonormal_legendre(degree, ri);
            for j in 0..np {
                v[(i, j)] = p[j];
                vr[(i, j)] = dp[j];
            }
        }
        let v_inv = v
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Quadrature(format!("singular Vandermonde for N = {degree}")))?;
        let dr = &vr * &v_inv;
        let mass_inv = &v * v.transpose();
        let mass = v_inv.transpose() * &v_inv;
        let mut lift = DMatrix::zeros(np, 2);
        for i in 0..np {
            lift[(i, 0)] = mass_inv[(i, 0)];
            lift[(i, 1)] = mass_inv[(i, degree)];
        }
        Ok(Self {
            degree,
            r,
            w,
            v,
            v_inv,
            dr,
            mass,
            mass_inv,
            lift,
        })
    }

    pub fn np(&self) -> usize {
        self.degree + 1
    }

    /// Matrix evaluating the nodal interpolant at reference points `points`.
    pub fn interpolation_matrix(&self, points: &[f64]) -> DMatrix<f64> {
        let np = self.np();
        let mut vq = DMatrix::zeros(points.len(), np);
        for (q, &x) in points.iter().enumerate() {
            let (p, _) = orthonormal_legendre(self.degree, x);
            for j in 0..np {
                vq[(q, j)] = p[j];
            }
        }
        vq * &self.v_inv
    }
}

/// Builds the reference operators for degree `degree`.
pub fn build_reference_ops(degree: usize) -> Result<LocalOps> {
    LocalOps::new(degree)
}
