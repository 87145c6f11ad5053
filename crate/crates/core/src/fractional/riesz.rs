//! Dense nodal realization of the Riesz fractional integral
//! `(I_left^mu + I_right^mu) / (2 cos(pi mu / 2))`, `mu = 2 - alpha`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use statrs::function::gamma::gamma;

use crate::basis::LocalOps;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, NodalField};
use crate::quadrature::{gauss_jacobi, gauss_legendre, QuadratureRule};

use super::galerkin::{assemble_galerkin_form, project};

/// Extra Gauss-Legendre points beyond `N` for elements away from the singularity.
const REGULAR_EXTRA_POINTS: usize = 8;

/// Global operator mapping nodal data to nodal values of the Riesz integral
/// of its discontinuous piecewise-polynomial reconstruction on `[a, b]`.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    pub alpha: f64,
    pub mu: f64,
    pub elements: usize,
    pub degree: usize,
    pub domain: (f64, f64),
    matrix: DMatrix<f64>,
    projected: DMatrix<f64>,
    factors: Option<(DMatrix<f64>, DMatrix<f64>)>,
    identity: bool,
}

impl RieszOperator {
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// The combined operator `G`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Left integral factor `GL` (includes `1 / Gamma(mu)`). Absent for the
    /// identity and for operators restored from a dump.
    pub fn left_factor(&self) -> Option<&DMatrix<f64>> {
        self.factors.as_ref().map(|f| &f.0)
    }

    pub fn right_factor(&self) -> Option<&DMatrix<f64>> {
        self.factors.as_ref().map(|f| &f.1)
    }

    /// L2 projection onto the broken polynomial space of the Riesz integral of
    /// the reconstruction, `M^{-1} B` with `B` the weak form. This is the
    /// operator the LDG scheme applies.
    pub fn projected(&self) -> &DMatrix<f64> {
        &self.projected
    }

    pub fn dofs(&self) -> usize {
        self.matrix.nrows()
    }

    /// Whether this operator was built for `mesh` at order `alpha`.
    pub fn matches(&self, mesh: &Mesh, alpha: f64) -> bool {
        self.alpha == alpha
            && self.elements == mesh.elements()
            && self.degree == mesh.degree
            && self.domain == (mesh.a, mesh.b)
    }

    /// `G u`
    pub fn apply(&self, u: &NodalField) -> NodalField {
        if self.identity {
            return u.clone();
        }
        let out = &self.matrix * DVector::from_column_slice(&u.values);
        NodalField {
            elements: u.elements,
            np: u.np,
            values: out.data.into(),
        }
    }

    /// `M^{-1} B u`, see [`RieszOperator::projected`].
    pub fn apply_projected(&self, u: &NodalField) -> NodalField {
        if self.identity {
            return u.clone();
        }
        let out = &self.projected * DVector::from_column_slice(&u.values);
        NodalField {
            elements: u.elements,
            np: u.np,
            values: out.data.into(),
        }
    }

    /// Writes the operator as a little-endian binary dump: header
    /// `alpha: f64, K: u64, N: u64, a: f64, b: f64`, then `G` row-major,
    /// then the projected operator row-major.
    pub fn dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let n = self.dofs();
        let mut buf = Vec::with_capacity(40 + 16 * n * n);
        buf.extend_from_slice(&self.alpha.to_le_bytes());
        buf.extend_from_slice(&(self.elements as u64).to_le_bytes());
        buf.extend_from_slice(&(self.degree as u64).to_le_bytes());
        buf.extend_from_slice(&self.domain.0.to_le_bytes());
        buf.extend_from_slice(&self.domain.1.to_le_bytes());
        for i in 0..n {
            for j in 0..n {
                buf.extend_from_slice(&self.matrix[(i, j)].to_le_bytes());
            }
        }
        for i in 0..n {
            for j in 0..n {
                buf.extend_from_slice(&self.projected[(i, j)].to_le_bytes());
            }
        }
        w.write_all(&buf).map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut bytes = Vec::new();
        BufReader::new(file)
            .read_to_end(&mut bytes)
            .map_err(|e| Error::io(path, e))?;
        let malformed = |reason: String| Error::MalformedDump {
            path: path.to_path_buf(),
            reason,
        };
        if bytes.len() < 40 {
            return Err(malformed(format!("{} bytes is shorter than the header", bytes.len())));
        }
        let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().unwrap() };
        let alpha = f64::from_le_bytes(word(0));
        let elements = u64::from_le_bytes(word(1)) as usize;
        let degree = u64::from_le_bytes(word(2)) as usize;
        let a = f64::from_le_bytes(word(3));
        let b = f64::from_le_bytes(word(4));
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(malformed(format!("alpha = {alpha} outside (1, 2]")));
        }
        let n = elements
            .checked_mul(degree + 1)
            .ok_or_else(|| malformed("element count overflows".into()))?;
        let expected = n
            .checked_mul(n)
            .and_then(|m| m.checked_mul(16))
            .and_then(|m| m.checked_add(40))
            .ok_or_else(|| malformed("matrix size overflows".into()))?;
        if bytes.len() != expected {
            return Err(malformed(format!(
                "expected {expected} bytes for K = {elements}, N = {degree}, found {}",
                bytes.len()
            )));
        }
        let matrix = DMatrix::from_row_iterator(
            n,
            n,
            (0..n * n).map(|i| f64::from_le_bytes(word(5 + i))),
        );
        let projected = DMatrix::from_row_iterator(
            n,
            n,
            (0..n * n).map(|i| f64::from_le_bytes(word(5 + n * n + i))),
        );
        Ok(Self {
            alpha,
            mu: 2.0 - alpha,
            elements,
            degree,
            domain: (a, b),
            matrix,
            projected,
            factors: None,
            identity: alpha == 2.0,
        })
    }
}

/// Assembles the Riesz integral operator for fractional order `alpha` in (1, 2].
///
/// Columns are Lagrange basis functions of one element. The element holding
/// the evaluation node (and, for a face node, the element on the causal side)
/// is integrated with Gauss-Jacobi against the weakly singular kernel; the
/// adjacent element is the difference of two such integrals; farther elements
/// use Gauss-Legendre with `N + 8` points.
pub fn assemble_riesz(mesh: &Mesh, ops: &LocalOps, alpha: f64) -> Result<RieszOperator> {
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::InvalidOrder(alpha));
    }
    if mesh.degree != ops.degree {
        return Err(Error::ShapeMismatch {
            expected: (mesh.elements(), ops.np()),
            got: (mesh.elements(), mesh.np()),
        });
    }
    let n = mesh.dofs();
    let base = RieszOperator {
        alpha,
        mu: 2.0 - alpha,
        elements: mesh.elements(),
        degree: mesh.degree,
        domain: (mesh.a, mesh.b),
        matrix: DMatrix::identity(n, n),
        projected: DMatrix::identity(n, n),
        factors: None,
        identity: true,
    };
    if alpha == 2.0 {
        return Ok(base);
    }
    let mu = 2.0 - alpha;
    let kernel = KernelRules::new(ops, mu)?;
    let np = ops.np();
    let kcount = mesh.elements();
    let mut gl = DMatrix::<f64>::zeros(n, n);
    let mut gr = DMatrix::<f64>::zeros(n, n);
    let inv_gamma = 1.0 / gamma(mu);

    for e in 0..kcount {
        for l in 0..np {
            let row = e * np + l;
            let x = mesh.nodes[row];
            // left integral: elements at or before e
            for k in 0..=e {
                let vals = if k == e {
                    if l == 0 {
                        continue;
                    }
                    kernel.singular(mesh, k, x, mesh.faces[k])
                } else if k + 1 == e {
                    if l == 0 {
                        kernel.singular(mesh, k, x, mesh.faces[k])
                    } else {
                        let mut v = kernel.singular(mesh, k, x, mesh.faces[k]);
                        let near = kernel.singular(mesh, k, x, mesh.faces[k + 1]);
                        v.iter_mut().zip(near).for_each(|(a, b)| *a -= b);
                        v
                    }
                } else {
                    kernel.regular(mesh, k, x)
                };
                for (j, v) in vals.into_iter().enumerate() {
                    gl[(row, k * np + j)] = v * inv_gamma;
                }
            }
            // right integral: elements at or after e
            for k in e..kcount {
                let vals = if k == e {
                    if l == np - 1 {
                        continue;
                    }
                    kernel.singular(mesh, k, x, mesh.faces[k + 1])
                } else if k == e + 1 {
                    if l == np - 1 {
                        kernel.singular(mesh, k, x, mesh.faces[k + 1])
                    } else {
                        let mut v = kernel.singular(mesh, k, x, mesh.faces[k + 1]);
                        let near = kernel.singular(mesh, k, x, mesh.faces[k]);
                        v.iter_mut().zip(near).for_each(|(a, b)| *a -= b);
                        v
                    }
                } else {
                    kernel.regular(mesh, k, x)
                };
                for (j, v) in vals.into_iter().enumerate() {
                    gr[(row, k * np + j)] = v * inv_gamma;
                }
            }
        }
    }
    let scale = 1.0 / (2.0 * (std::f64::consts::PI * mu / 2.0).cos());
    let matrix = (&gl + &gr) * scale;
    let form = assemble_galerkin_form(mesh, ops, mu)?;
    Ok(RieszOperator {
        matrix,
        projected: project(mesh, ops, &form),
        factors: Some((gl, gr)),
        identity: false,
        ..base
    })
}

/// Applies the operator to a nodal field.
pub fn apply_riesz(op: &RieszOperator, u: &NodalField) -> NodalField {
    op.apply(u)
}

struct KernelRules<'a> {
    ops: &'a LocalOps,
    mu: f64,
    jacobi: QuadratureRule,
    legendre: QuadratureRule,
    legendre_interp: DMatrix<f64>,
}

impl<'a> KernelRules<'a> {
    fn new(ops: &'a LocalOps, mu: f64) -> Result<Self> {
        let jacobi = gauss_jacobi(ops.degree + 2, mu - 1.0, 0.0)?;
        let legendre = gauss_legendre(ops.degree + REGULAR_EXTRA_POINTS)?;
        let legendre_interp = ops.interpolation_matrix(&legendre.points);
        Ok(Self {
            ops,
            mu,
            jacobi,
            legendre,
            legendre_interp,
        })
    }

    /// `int ell_j^{(k)}(s) |x - s|^{mu - 1} ds` over the segment between the
    /// singular point `x` and `far`, with the element-`k` basis extended as
    /// polynomials.
    fn singular(&self, mesh: &Mesh, k: usize, x: f64, far: f64) -> Vec<f64> {
        let len = (far - x).abs();
        let (xl, h) = (mesh.faces[k], mesh.dx[k]);
        let refs: Vec<f64> = self
            .jacobi
            .points
            .iter()
            .map(|&t| {
                let s = x + (far - x) * 0.5 * (1.0 - t);
                2.0 * (s - xl) / h - 1.0
            })
            .collect();
        let interp = self.ops.interpolation_matrix(&refs);
        let factor = (0.5 * len).powf(self.mu);
        (0..self.ops.np())
            .map(|j| {
                factor
                    * self
                        .jacobi
                        .weights
                        .iter()
                        .enumerate()
                        .map(|(q, w)| w * interp[(q, j)])
                        .sum::<f64>()
            })
            .collect()
    }

    /// Same integral over the whole element `k` when it is bounded away from `x`.
    fn regular(&self, mesh: &Mesh, k: usize, x: f64) -> Vec<f64> {
        let (xl, h) = (mesh.faces[k], mesh.dx[k]);
        let kernel: Vec<f64> = self
            .legendre
            .points
            .iter()
            .zip(&self.legendre.weights)
            .map(|(&t, &w)| {
                let s = xl + 0.5 * (1.0 + t) * h;
                w * (x - s).abs().powf(self.mu - 1.0)
            })
            .collect();
        (0..self.ops.np())
            .map(|j| {
                0.5 * h
                    * kernel
                        .iter()
                        .enumerate()
                        .map(|(q, kq)| kq * self.legendre_interp[(q, j)])
                        .sum::<f64>()
            })
            .collect()
    }
}
