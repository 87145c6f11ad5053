//! Glue between a registered problem and the integrator.

use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::basis::{build_reference_ops, LocalOps};
use crate::coupled::{rhs_coupled, CoupledState};
use crate::error::Result;
use crate::fractional::{assemble_riesz, RieszOperator};
use crate::ldg::{build_aux_chain, mass, project_forcing, rhs_single, ComplexField, ComplexFn};
use crate::mesh::{l2_error, Mesh};
use crate::time::{cfl_dt, default_courant, integrate, Observer, OdeState, TimeGrid};

use super::registry::ProblemKind;

/// Imaginary-axis stability limit of classical RK4, `2 sqrt 2`.
pub const RK4_IMAGINARY_LIMIT: f64 = 2.828_427_124_746_19;
/// Fraction of the RK4 limit allotted to the linear spectrum.
const STABILITY_MARGIN: f64 = 0.8;
const POWER_ITERATIONS: usize = 200;
/// Constant of the accuracy cap `dt <= TEMPORAL_CAP * h^{(N+1)/4}`. Stiff
/// transients make the RK4 error much larger than the smooth-solution
/// estimate at the stability-limited step.
pub const TEMPORAL_CAP: f64 = 0.02;

/// Mesh, reference operators and fractional operator for one `(N, K)` cell.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub mesh: Mesh,
    pub ops: LocalOps,
    pub riesz: RieszOperator,
}

impl Discretization {
    pub fn new(domain: (f64, f64), degree: usize, elements: usize, alpha: f64) -> Result<Self> {
        let mesh = Mesh::uniform(domain.0, domain.1, elements, degree)?;
        let ops = build_reference_ops(degree)?;
        let riesz = assemble_riesz(&mesh, &ops, alpha)?;
        Ok(Self { mesh, ops, riesz })
    }
}

/// Solution state of either problem family.
#[derive(Debug, Clone, PartialEq)]
pub enum RunState {
    Single(ComplexField),
    Coupled(CoupledState),
}

impl RunState {
    /// Interpolates initial data at the nodes, one closure per component.
    /// Elementwise L2 projection of the initial data.
    pub fn project(problem: &ProblemKind, disc: &Discretization, initial: &[Arc<dyn Fn(f64) -> Complex64 + Send + Sync>]) -> Self {
        let field = |i: usize| {
            let f = initial[i].clone();
            let g: ComplexFn = Arc::new(move |x, _| f(x));
            project_forcing(&g, 0.0, &disc.mesh, &disc.ops)
        };
        match problem {
            ProblemKind::Single(_) => RunState::Single(field(0)),
            ProblemKind::Coupled(_) => RunState::Coupled(CoupledState { u1: field(0), u2: field(1) }),
        }
    }

    pub fn components(&self) -> Vec<&ComplexField> {
        match self {
            RunState::Single(u) => vec![u],
            RunState::Coupled(s) => vec![&s.u1, &s.u2],
        }
    }

    pub fn masses(&self, disc: &Discretization) -> Vec<f64> {
        self.components().into_iter().map(|u| mass(u, &disc.mesh, &disc.ops)).collect()
    }
}

struct ComponentObserver<'a, F> {
    every: usize,
    callback: &'a mut F,
}

impl<F: FnMut(usize, f64, &[&ComplexField]) -> Result<()>> Observer<ComplexField> for ComponentObserver<'_, F> {
    fn interval(&self) -> usize {
        self.every
    }

    fn observe(&mut self, step: usize, t: f64, state: &ComplexField) -> Result<()> {
        (self.callback)(step, t, &[state])
    }
}

impl<F: FnMut(usize, f64, &[&ComplexField]) -> Result<()>> Observer<CoupledState> for ComponentObserver<'_, F> {
    fn interval(&self) -> usize {
        self.every
    }

    fn observe(&mut self, step: usize, t: f64, state: &CoupledState) -> Result<()> {
        (self.callback)(step, t, &[&state.u1, &state.u2])
    }
}

/// Integrates `problem` across `grid`, calling `observe` every `every` steps
/// (and at both ends) with the component fields.
pub fn simulate<F>(
    problem: &ProblemKind,
    disc: &Discretization,
    y0: RunState,
    grid: &TimeGrid,
    every: usize,
    mut observe: F,
) -> Result<RunState>
where
    F: FnMut(usize, f64, &[&ComplexField]) -> Result<()>,
{
    let Discretization { mesh, ops, riesz } = disc;
    let mut obs = ComponentObserver { every, callback: &mut observe };
    match (problem, y0) {
        (ProblemKind::Single(p), RunState::Single(u)) => {
            u.check_shape(mesh)?;
            let rhs = |u: &ComplexField, t| rhs_single(u, p, t, riesz, mesh, ops);
            integrate(rhs, u, grid, &mut [&mut obs]).map(RunState::Single)
        }
        (ProblemKind::Coupled(p), RunState::Coupled(s)) => {
            s.check_shape(mesh)?;
            let rhs = |s: &CoupledState, t| rhs_coupled(s, p, t, riesz, mesh, ops);
            integrate(rhs, s, grid, &mut [&mut obs]).map(RunState::Coupled)
        }
        _ => Err(crate::error::Error::Config("state does not match the problem family".into())),
    }
}

/// Runs `spec` from its initial data to its final time with fixed step `dt`.
pub fn solve_to(spec: &super::registry::ExperimentSpec, disc: &Discretization, dt: f64) -> Result<RunState> {
    let y0 = RunState::project(&spec.problem, disc, &spec.initial);
    let grid = TimeGrid::uniform(0.0, spec.final_time, dt)?;
    simulate(&spec.problem, disc, y0, &grid, usize::MAX, |_, _, _| Ok(()))
}

/// Broken L2 distance between two states of the same problem on `disc`.
pub fn state_distance(a: &RunState, b: &RunState, disc: &Discretization) -> f64 {
    let mut total = 0.0;
    for (u, v) in a.components().into_iter().zip(b.components()) {
        let mut d = u.clone();
        d.axpy(-1.0, v);
        total += mass(&d, &disc.mesh, &disc.ops);
    }
    total.sqrt()
}

/// Broken L2 error `sqrt(e_p^2 + e_q^2)` of one complex component.
pub fn component_error(u: &ComplexField, exact: &ComplexFn, t: f64, disc: &Discretization) -> Result<f64> {
    let over = disc.ops.degree + 4;
    let ep = l2_error(&u.re, |x| exact(x, t).re, &disc.mesh, &disc.ops, over)?;
    let eq = l2_error(&u.im, |x| exact(x, t).im, &disc.mesh, &disc.ops, over)?;
    Ok(ep.hypot(eq))
}

/// L2 norm of an exact solution on the mesh, computed with the same rule as
/// [`component_error`].
pub fn exact_norm(exact: &ComplexFn, t: f64, disc: &Discretization) -> Result<f64> {
    let zero = ComplexField::zeros_like(&disc.mesh);
    component_error(&zero, exact, t, disc)
}

/// Dominant eigenvalue magnitude of the real map `q -> e` of the auxiliary
/// chain with homogeneous traces, by power iteration from a fixed start.
pub fn chain_spectral_radius(disc: &Discretization) -> f64 {
    let Discretization { mesh, ops, riesz } = disc;
    let zero = Complex64::new(0.0, 0.0);
    let mut u = ComplexField::zeros_like(mesh);
    for (i, v) in u.im.values.iter_mut().enumerate() {
        *v = 1.0 + ((i as f64) * 0.618_033_988_75).fract();
    }
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let norm = DVector::from_column_slice(&u.im.values).norm();
        if norm == 0.0 {
            return 0.0;
        }
        u.im.scale(1.0 / norm);
        let chain = build_aux_chain(&u, (zero, zero), riesz, mesh, ops);
        estimate = DVector::from_column_slice(&chain.e.values).norm();
        u.im = chain.e;
    }
    estimate
}

/// Courant constant for `problem` on `disc`: the configured default capped
/// so that `dt` times the estimated linear spectral radius stays inside the
/// RK4 imaginary-axis stability interval.
pub fn stable_courant(problem: &ProblemKind, disc: &Discretization) -> f64 {
    let alpha = problem.alpha();
    let coupling = match problem {
        ProblemKind::Single(_) => 0.0,
        ProblemKind::Coupled(p) => p.varpi1.abs() + p.varpi2.abs().max(p.reverse_coupling().abs()),
    };
    let rate = problem.dispersion_scale() * chain_spectral_radius(disc) + coupling;
    let limit = if rate > 0.0 {
        STABILITY_MARGIN * RK4_IMAGINARY_LIMIT / (rate * disc.mesh.dx_min().powf(alpha))
    } else {
        f64::INFINITY
    };
    default_courant(alpha).min(limit)
}

/// Step used by the drivers: `cfl_dt` with the requested or stability-capped
/// Courant constant, and additionally `dt <= TEMPORAL_CAP * h^{(N+1)/4}`.
pub fn driver_dt(problem: &ProblemKind, disc: &Discretization, courant: Option<f64>) -> Result<f64> {
    let c = match courant {
        Some(c) => c,
        None => stable_courant(problem, disc),
    };
    let dt = cfl_dt(&disc.mesh, problem.alpha(), c)?;
    let cap = TEMPORAL_CAP * disc.mesh.dx_min().powf((disc.ops.degree as f64 + 1.0) / 4.0);
    Ok(dt.min(cap))
}
