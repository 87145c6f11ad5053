//! One-dimensional element meshes and discontinuous nodal fields.

use crate::basis::LocalOps;
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, lgl_nodes};

/// A partition of `[a, b]` into `K` non-overlapping elements with the
/// physical coordinates of the nodal points of every element.
#[derive(Debug, Clone)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub degree: usize,
    /// `K + 1` strictly increasing face coordinates.
    pub faces: Vec<f64>,
    /// Element widths.
    pub dx: Vec<f64>,
    /// Node coordinates, element-major (`K x (N + 1)`).
    pub nodes: Vec<f64>,
}

impl Mesh {
    /// Uniform mesh of `elements` elements of degree `degree` on `[a, b]`.
    pub fn uniform(a: f64, b: f64, elements: usize, degree: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidDomain { a, b });
        }
        if elements < 2 {
            return Err(Error::TooFewElements(elements));
        }
        let width = (b - a) / elements as f64;
        let mut faces: Vec<f64> = (0..=elements).map(|k| a + k as f64 * width).collect();
        faces[elements] = b;
        Self::from_faces(faces, degree)
    }

    /// Mesh with arbitrary strictly increasing faces.
    pub fn from_faces(faces: Vec<f64>, degree: usize) -> Result<Self> {
        let (r, _) = lgl_nodes(degree)?;
        if faces.len() < 3 {
            return Err(Error::TooFewElements(faces.len().saturating_sub(1)));
        }
        if faces.windows(2).any(|f| !(f[0] < f[1])) {
            return Err(Error::InvalidDomain {
                a: faces[0],
                b: faces[faces.len() - 1],
            });
        }
        let dx: Vec<f64> = faces.windows(2).map(|f| f[1] - f[0]).collect();
        let mut nodes = Vec::with_capacity(dx.len() * r.len());
        for (k, &h) in dx.iter().enumerate() {
            for (i, &ri) in r.iter().enumerate() {
                // endpoints land exactly on the faces
                let x = if i == 0 {
                    faces[k]
                } else if i == degree {
                    faces[k + 1]
                } else {
                    faces[k] + 0.5 * (1.0 + ri) * h
                };
                nodes.push(x);
            }
        }
        Ok(Self {
            a: faces[0],
            b: faces[faces.len() - 1],
            degree,
            faces,
            dx,
            nodes,
        })
    }

    pub fn elements(&self) -> usize {
        self.dx.len()
    }

    pub fn np(&self) -> usize {
        self.degree + 1
    }

    /// Total number of nodal values, `K (N + 1)`.
    pub fn dofs(&self) -> usize {
        self.elements() * self.np()
    }

    pub fn element_nodes(&self, k: usize) -> &[f64] {
        let np = self.np();
        &self.nodes[k * np..(k + 1) * np]
    }

    pub fn dx_min(&self) -> f64 {
        self.dx.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Builds the mesh-sized field of nodal samples of `f`.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> NodalField {
        NodalField {
            elements: self.elements(),
            np: self.np(),
            values: self.nodes.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// Uniform mesh constructor in free-function form.
pub fn build_mesh(a: f64, b: f64, elements: usize, degree: usize) -> Result<Mesh> {
    Mesh::uniform(a, b, elements, degree)
}

/// Per-element nodal coefficients; no continuity across faces is implied.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    pub elements: usize,
    pub np: usize,
    pub values: Vec<f64>,
}

impl NodalField {
    pub fn zeros(elements: usize, np: usize) -> Self {
        Self {
            elements,
            np,
            values: vec![0.0; elements * np],
        }
    }

    pub fn zeros_like(mesh: &Mesh) -> Self {
        Self::zeros(mesh.elements(), mesh.np())
    }

    pub fn from_values(elements: usize, np: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != elements * np {
            return Err(Error::ShapeMismatch {
                expected: (elements, np),
                got: (values.len() / np.max(1), np),
            });
        }
        Ok(Self {
            elements,
            np,
            values,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.elements, self.np)
    }

    pub fn element(&self, k: usize) -> &[f64] {
        &self.values[k * self.np..(k + 1) * self.np]
    }

    pub fn element_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.values[k * self.np..(k + 1) * self.np]
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &NodalField) {
        debug_assert_eq!(self.shape(), other.shape());
        for (x, y) in self.values.iter_mut().zip(&other.values) {
            *x += a * y;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.values.iter_mut().for_each(|x| *x *= a);
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    pub fn check_shape(&self, mesh: &Mesh) -> Result<()> {
        if self.shape() != (mesh.elements(), mesh.np()) {
            return Err(Error::ShapeMismatch {
                expected: (mesh.elements(), mesh.np()),
                got: self.shape(),
            });
        }
        Ok(())
    }
}

/// Broken L2 inner product `sum_k (dx_k / 2) u_k^T M v_k` with the exact mass matrix.
pub fn inner(u: &NodalField, v: &NodalField, mesh: &Mesh, ops: &LocalOps) -> f64 {
    let np = ops.np();
    let mut total = 0.0;
    for k in 0..mesh.elements() {
        let uk = u.element(k);
        let vk = v.element(k);
        let mut acc = 0.0;
        for i in 0..np {
            let mut row = 0.0;
            for j in 0..np {
                row += ops.mass[(i, j)] * vk[j];
            }
            acc += uk[i] * row;
        }
        total += 0.5 * mesh.dx[k] * acc;
    }
    total
}

/// Broken L2 norm of a nodal field.
pub fn l2_norm(u: &NodalField, mesh: &Mesh, ops: &LocalOps) -> f64 {
    inner(u, u, mesh, ops).max(0.0).sqrt()
}

/// Broken L2 distance between the nodal field and `exact`, measured with an
/// `oversample`-point Gauss-Legendre rule on every element.
pub fn l2_error(
    u: &NodalField,
    exact: impl Fn(f64) -> f64,
    mesh: &Mesh,
    ops: &LocalOps,
    oversample: usize,
) -> Result<f64> {
    Ok(l2_error_sq(u, exact, mesh, ops, oversample)?.sqrt())
}

pub(crate) fn l2_error_sq(
    u: &NodalField,
    exact: impl Fn(f64) -> f64,
    mesh: &Mesh,
    ops: &LocalOps,
    oversample: usize,
) -> Result<f64> {
    if oversample < ops.degree + 2 {
        return Err(Error::Quadrature(format!(
            "oversampling needs at least N + 2 = {} points, got {oversample}",
            ops.degree + 2
        )));
    }
    let rule = gauss_legendre(oversample)?;
    let interp = ops.interpolation_matrix(&rule.points);
    let np = ops.np();
    let mut total = 0.0;
    for k in 0..mesh.elements() {
        let uk = u.element(k);
        let (xl, h) = (mesh.faces[k], mesh.dx[k]);
        let mut acc = 0.0;
        for (q, (&t, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
            let uh: f64 = (0..np).map(|j| interp[(q, j)] * uk[j]).sum();
            let x = xl + 0.5 * (1.0 + t) * h;
            let d = uh - exact(x);
            acc += w * d * d;
        }
        total += 0.5 * h * acc;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn uniform_mesh_geometry() {
        let m = Mesh::uniform(0.0, 1.0, 4, 1).unwrap();
        for &h in &m.dx {
            assert_abs_diff_eq!(h, 0.25, epsilon = 1e-15);
        }
        let m = Mesh::uniform(-1.0, 1.0, 2, 2).unwrap();
        assert_eq!(m.faces, vec![-1.0, 0.0, 1.0]);
        let m = Mesh::uniform(-40.0, 40.0, 80, 2).unwrap();
        assert!(m.dx.iter().all(|&h| (h - 1.0).abs() < 1e-13));
        assert_eq!(m.faces[0], -40.0);
        assert_eq!(m.faces[80], 40.0);
    }

    #[test]
    fn shared_face_coordinates() {
        let m = Mesh::uniform(-0.3, 1.7, 7, 3).unwrap();
        for k in 0..6 {
            assert_eq!(m.element_nodes(k)[3], m.element_nodes(k + 1)[0]);
        }
    }

    #[test]
    fn mesh_rejects_bad_input() {
        assert!(matches!(Mesh::uniform(1.0, 1.0, 4, 2), Err(Error::InvalidDomain { .. })));
        assert!(matches!(Mesh::uniform(2.0, 1.0, 4, 2), Err(Error::InvalidDomain { .. })));
        assert!(matches!(Mesh::uniform(0.0, 1.0, 1, 2), Err(Error::TooFewElements(1))));
        assert!(matches!(Mesh::uniform(0.0, 1.0, 3, 0), Err(Error::InvalidDegree(0))));
    }

    #[test]
    fn norms_of_simple_fields() {
        let m = Mesh::uniform(0.0, 1.0, 5, 2).unwrap();
        let ops = LocalOps::new(2).unwrap();
        assert_eq!(l2_norm(&NodalField::zeros_like(&m), &m, &ops), 0.0);
        assert_abs_diff_eq!(l2_norm(&m.sample(|_| 1.0), &m, &ops), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            l2_norm(&m.sample(|x| x), &m, &ops),
            1.0 / 3f64.sqrt(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn l2_error_basic() {
        let m = Mesh::uniform(0.0, 1.0, 6, 3).unwrap();
        let ops = LocalOps::new(3).unwrap();
        let p = |x: f64| 1.0 - 2.0 * x + x.powi(3);
        let e = l2_error(&m.sample(p), p, &m, &ops, 8).unwrap();
        assert!(e <= 1e-12);
        let e = l2_error(&NodalField::zeros_like(&m), |_| 1.0, &m, &ops, 5).unwrap();
        assert_abs_diff_eq!(e, 1.0, epsilon = 1e-14);
        assert!(l2_error(&m.sample(p), p, &m, &ops, 4).is_err());
    }

    #[test]
    fn interpolation_error_rate_for_sextic() {
        // Oracle: oversampled quadrature of the interpolation error; the
        // degree-2 interpolant of x^6 converges like h^3.
        let ops = LocalOps::new(2).unwrap();
        let err = |k: usize| {
            let m = Mesh::uniform(0.0, 1.0, k, 2).unwrap();
            l2_error(&m.sample(|x| x.powi(6)), |x| x.powi(6), &m, &ops, 12).unwrap()
        };
        let (e35, e70) = (err(35), err(70));
        assert!(e35 > 0.0 && e70 < e35);
        let rate = (e35 / e70).log2();
        assert!((rate - 3.0).abs() < 0.1, "rate {rate}");
    }

    #[test]
    fn norm_matches_error_against_zero() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let m = Mesh::uniform(-2.0, 3.0, 9, 4).unwrap();
        let ops = LocalOps::new(4).unwrap();
        for _ in 0..20 {
            let mut u = NodalField::zeros_like(&m);
            u.values.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
            let n2 = l2_norm(&u, &m, &ops).powi(2);
            let e2 = l2_error_sq(&u, |_| 0.0, &m, &ops, 7).unwrap();
            assert!(((n2 - e2) / n2).abs() < 1e-12);
        }
    }
}
