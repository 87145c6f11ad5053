//! Fractional calculus on discontinuous nodal data.

mod galerkin;
mod oracle;
mod poly;
mod riesz;

pub use galerkin::assemble_galerkin_form;
pub use oracle::{adaptive_integral, oracle_frac_integral, oracle_frac_integral_tol, Side, ORACLE_TOL};
pub use poly::{frac_laplacian_poly, PolyFracForm, Polynomial};
pub use riesz::{apply_riesz, assemble_riesz, RieszOperator};

#[cfg(test)]
mod tests;
