use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::gamma;

use super::*;
use crate::basis::LocalOps;
use crate::mesh::{Mesh, NodalField};

fn setup(a: f64, b: f64, k: usize, n: usize) -> (Mesh, LocalOps) {
    (Mesh::uniform(a, b, k, n).unwrap(), LocalOps::new(n).unwrap())
}

fn lagrange_eval(nodes: &[f64], vals: &[f64], x: f64) -> f64 {
    let mut total = 0.0;
    for (i, (&xi, &vi)) in nodes.iter().zip(vals).enumerate() {
        let mut l = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                l *= (x - xj) / (xi - xj);
            }
        }
        total += vi * l;
    }
    total
}

/// Per-node oracle for `G u`: element-by-element adaptive quadrature of the
/// Lagrange reconstruction, independent of the Jacobi/Legendre path.
fn oracle_apply(u: &NodalField, mesh: &Mesh, mu: f64, x: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..mesh.elements() {
        let nodes = mesh.element_nodes(k).to_vec();
        let vals = u.element(k).to_vec();
        let f = |s: f64| lagrange_eval(&nodes, &vals, s);
        let dom = (mesh.faces[k], mesh.faces[k + 1]);
        total += oracle_frac_integral(f, mu, x, Side::Left, dom).unwrap();
        total += oracle_frac_integral(f, mu, x, Side::Right, dom).unwrap();
    }
    total / (2.0 * (std::f64::consts::PI * mu / 2.0).cos())
}

fn random_field(mesh: &Mesh, rng: &mut ChaCha8Rng) -> NodalField {
    let mut u = NodalField::zeros_like(mesh);
    u.values.iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
    u
}

fn global_mass(mesh: &Mesh, ops: &LocalOps) -> DMatrix<f64> {
    let np = ops.np();
    let n = mesh.dofs();
    let mut m = DMatrix::zeros(n, n);
    for k in 0..mesh.elements() {
        for i in 0..np {
            for j in 0..np {
                m[(k * np + i, k * np + j)] = 0.5 * mesh.dx[k] * ops.mass[(i, j)];
            }
        }
    }
    m
}

#[test]
fn alpha_two_is_identity() {
    let (mesh, ops) = setup(0.0, 1.0, 4, 2);
    let g = assemble_riesz(&mesh, &ops, 2.0).unwrap();
    assert!(g.is_identity());
    let u = mesh.sample(|x| x.sin());
    assert_eq!(apply_riesz(&g, &u), u);
    let zero = NodalField::zeros_like(&mesh);
    assert_eq!(apply_riesz(&g, &zero), zero);
}

#[test]
fn rejects_orders_outside_range() {
    let (mesh, ops) = setup(0.0, 1.0, 4, 2);
    assert!(matches!(assemble_riesz(&mesh, &ops, 1.0), Err(crate::Error::InvalidOrder(_))));
    assert!(assemble_riesz(&mesh, &ops, 0.7).is_err());
    assert!(assemble_riesz(&mesh, &ops, 2.1).is_err());
}

#[test]
fn constant_function_closed_form() {
    let (mesh, ops) = setup(0.0, 1.0, 6, 3);
    let g = assemble_riesz(&mesh, &ops, 1.5).unwrap();
    let out = g.apply(&mesh.sample(|_| 1.0));
    let denom = 2.0 * (std::f64::consts::PI / 4.0).cos() * gamma(1.5);
    for (&x, &v) in mesh.nodes.iter().zip(&out.values) {
        let want = (x.sqrt() + (1.0 - x).sqrt()) / denom;
        assert_abs_diff_eq!(v, want, epsilon = 1e-12);
    }
}

#[test]
fn quadratic_matches_oracle_at_interior_face() {
    // a face at x = 0.37 puts a node there
    let mesh = Mesh::from_faces(vec![0.0, 0.2, 0.37, 0.6, 0.8, 1.0], 2).unwrap();
    let ops = LocalOps::new(2).unwrap();
    let mu = 0.8;
    let g = assemble_riesz(&mesh, &ops, 2.0 - mu).unwrap();
    let u = mesh.sample(|x| x * x);
    let out = g.apply(&u);
    let row = mesh.nodes.iter().position(|&x| x == 0.37).unwrap();
    let lo = oracle_frac_integral(|s| s * s, mu, 0.37, Side::Left, (0.0, 1.0)).unwrap();
    let hi = oracle_frac_integral(|s| s * s, mu, 0.37, Side::Right, (0.0, 1.0)).unwrap();
    let want = (lo + hi) / (2.0 * (std::f64::consts::PI * mu / 2.0).cos());
    assert_abs_diff_eq!(out.values[row], want, epsilon = 1e-8);
}

#[test]
fn random_fields_match_per_node_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &(mu, n) in &[(0.5, 2), (0.2, 3), (0.8, 3)] {
        let (mesh, ops) = setup(-1.0, 0.5, 5, n);
        let g = assemble_riesz(&mesh, &ops, 2.0 - mu).unwrap();
        let u = random_field(&mesh, &mut rng);
        let out = g.apply(&u);
        for (i, &x) in mesh.nodes.iter().enumerate() {
            let want = oracle_apply(&u, &mesh, mu, x);
            assert!(
                (out.values[i] - want).abs() < 1e-8,
                "mu={mu} N={n} node {i}: {} vs {want}",
                out.values[i]
            );
        }
    }
}

#[test]
fn monomial_power_rule_for_both_factors() {
    for &mu in &[0.2, 0.5, 0.8] {
        for n in 1..=3 {
            let (mesh, ops) = setup(0.0, 1.0, 7, n);
            let g = assemble_riesz(&mesh, &ops, 2.0 - mu).unwrap();
            let (gl, gr) = (g.left_factor().unwrap(), g.right_factor().unwrap());
            for m in 0..=n {
                let mi = m as i32;
                let ul = nalgebra::DVector::from_iterator(mesh.dofs(), mesh.nodes.iter().map(|x| x.powi(mi)));
                let ur = nalgebra::DVector::from_iterator(mesh.dofs(), mesh.nodes.iter().map(|x| (1.0 - x).powi(mi)));
                let (vl, vr) = (gl * ul, gr * ur);
                let c = gamma(m as f64 + 1.0) / gamma(m as f64 + 1.0 + mu);
                for (i, &x) in mesh.nodes.iter().enumerate() {
                    assert_abs_diff_eq!(vl[i], c * x.powf(m as f64 + mu), epsilon = 1e-9);
                    assert_abs_diff_eq!(vr[i], c * (1.0 - x).powf(m as f64 + mu), epsilon = 1e-9);
                }
            }
        }
    }
}

#[test]
fn left_factor_is_causal() {
    let (mesh, ops) = setup(0.0, 2.0, 6, 2);
    let g = assemble_riesz(&mesh, &ops, 1.4).unwrap();
    let (gl, gr) = (g.left_factor().unwrap(), g.right_factor().unwrap());
    let np = ops.np();
    for i in 0..mesh.dofs() {
        let x = mesh.nodes[i];
        for k in 0..mesh.elements() {
            for j in 0..np {
                if mesh.faces[k] >= x {
                    assert_eq!(gl[(i, k * np + j)], 0.0);
                }
                if mesh.faces[k + 1] <= x {
                    assert_eq!(gr[(i, k * np + j)], 0.0);
                }
            }
        }
    }
}

#[test]
fn reflection_symmetry_on_symmetric_mesh() {
    let (mesh, ops) = setup(-1.5, 1.5, 7, 3);
    let g = assemble_riesz(&mesh, &ops, 1.3).unwrap();
    let n = mesh.dofs();
    let gm = g.matrix();
    for i in 0..n {
        for j in 0..n {
            assert!((gm[(i, j)] - gm[(n - 1 - i, n - 1 - j)]).abs() < 1e-10);
        }
    }
}

#[test]
fn mass_weighted_form_is_nonnegative() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for &alpha in &[1.2, 1.5, 1.8] {
        let (mesh, ops) = setup(0.0, 1.0, 8, 3);
        let g = assemble_riesz(&mesh, &ops, alpha).unwrap();
        let m = global_mass(&mesh, &ops);
        let mg = &m * g.matrix();
        for _ in 0..100 {
            let u = random_field(&mesh, &mut rng);
            let v = nalgebra::DVector::from_column_slice(&u.values);
            let q = (v.transpose() * &mg * &v)[(0, 0)];
            assert!(q >= -1e-10, "alpha={alpha}: {q}");
        }
    }
}

#[test]
fn operator_norm_stable_under_refinement() {
    let norm = |k: usize| {
        let (mesh, ops) = setup(0.0, 1.0, k, 2);
        let g = assemble_riesz(&mesh, &ops, 1.4).unwrap();
        let m = global_mass(&mesh, &ops);
        let chol = m.clone().cholesky().unwrap();
        let l = chol.l();
        let l_inv = l.clone().try_inverse().unwrap();
        // || L^T G L^{-T} ||_2
        let a = l.transpose() * g.matrix() * l_inv.transpose();
        a.singular_values().max()
    };
    let (n1, n2) = (norm(8), norm(16));
    assert!(n1.is_finite() && n2.is_finite());
    assert!((n2 / n1 - 1.0).abs() < 0.2, "{n1} -> {n2}");
}

#[test]
fn composite_matches_fourier_reference() {
    // f = exp(-x^2); -(-Delta)^{alpha/2} f (x) = -(1/sqrt(pi)) int_0^inf xi^alpha e^{-xi^2/4} cos(xi x) dxi
    let alpha = 1.5;
    let reference = |x: f64| {
        -adaptive_integral(
            |xi| xi.powf(alpha) * (-xi * xi / 4.0).exp() * (xi * x).cos(),
            0.0,
            40.0,
            1e-12,
        )
        .unwrap()
            / std::f64::consts::PI.sqrt()
    };
    let f2 = |x: f64| (4.0 * x * x - 2.0) * (-x * x).exp();
    let err = |k: usize| {
        let (mesh, ops) = setup(-10.0, 10.0, k, 3);
        let g = assemble_riesz(&mesh, &ops, alpha).unwrap();
        let out = g.apply(&mesh.sample(f2));
        mesh.nodes
            .iter()
            .zip(&out.values)
            .filter(|(x, _)| x.abs() < 3.0)
            .map(|(&x, &v)| (v - reference(x)).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2) = (err(40), err(80));
    assert!(e1 < 1e-2, "{e1}");
    assert!(e2 < e1 / 8.0, "{e1} -> {e2}");
}

#[test]
fn dump_and_load_round_trip() {
    let (mesh, ops) = setup(-1.0, 2.0, 4, 2);
    let g = assemble_riesz(&mesh, &ops, 1.7).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.bin");
    g.dump(&path).unwrap();
    let bytes = std::fs::metadata(&path).unwrap().len();
    // header, then G and the projected operator
    assert_eq!(bytes, 40 + 2 * 8 * 12 * 12);
    let h = RieszOperator::load(&path).unwrap();
    assert!(h.matches(&mesh, 1.7));
    assert_eq!(h.matrix(), g.matrix());
    assert_eq!(h.projected(), g.projected());
    assert!(h.left_factor().is_none());

    std::fs::write(&path, [0u8; 17]).unwrap();
    assert!(matches!(RieszOperator::load(&path), Err(crate::Error::MalformedDump { .. })));
}

fn beta(a: f64, b: f64) -> f64 {
    gamma(a) * gamma(b) / gamma(a + b)
}

/// `∫∫_{[0,1]^2} |x - s|^{mu - 1} x^m s^n ds dx` in closed form.
fn monomial_pair(m: usize, n: usize, mu: f64) -> f64 {
    let d = (m + n) as f64 + mu + 1.0;
    (beta(n as f64 + 1.0, mu) + beta(m as f64 + 1.0, mu)) / d
}

#[test]
fn weak_form_matches_monomial_double_integrals() {
    for &(k, n) in &[(3usize, 2usize), (2, 2), (5, 3), (7, 1)] {
        for mu in [0.2, 0.5, 0.8, 0.9] {
            let (mesh, ops) = setup(0.0, 1.0, k, n);
            let b = assemble_galerkin_form(&mesh, &ops, mu).unwrap();
            let c = 1.0 / (gamma(mu) * 2.0 * (std::f64::consts::PI * mu / 2.0).cos());
            for m in 0..=n {
                for p in 0..=n {
                    let u = mesh.sample(|x| x.powi(m as i32));
                    let v = mesh.sample(|x| x.powi(p as i32));
                    let got = (v.values.iter().enumerate())
                        .map(|(i, vi)| vi * (0..u.values.len()).map(|j| b[(i, j)] * u.values[j]).sum::<f64>())
                        .sum::<f64>();
                    let want = c * monomial_pair(m, p, mu);
                    assert!(
                        (got - want).abs() < 1e-11 * want.abs().max(1.0),
                        "K {k} N {n} mu {mu} m {m} p {p}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn weak_form_is_symmetric_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for mu in [0.2, 0.5, 0.8] {
        let faces: Vec<f64> = {
            let mut f: Vec<f64> = (0..=9).map(|i| i as f64 / 9.0).collect();
            for x in f.iter_mut().skip(1).take(8) {
                *x += rng.random_range(-0.03..0.03);
            }
            f
        };
        let mesh = Mesh::from_faces(faces, 3).unwrap();
        let ops = LocalOps::new(3).unwrap();
        let b = assemble_galerkin_form(&mesh, &ops, mu).unwrap();
        assert!((&b - b.transpose()).amax() < 1e-14 * b.amax());
        let eig = b.clone().symmetric_eigenvalues();
        assert!(eig.min() > -1e-12 * eig.max(), "mu {mu}: min eigenvalue {}", eig.min());
    }
}
