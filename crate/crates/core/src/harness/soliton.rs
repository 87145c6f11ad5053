//! Unforced soliton runs: mass histories, modulus snapshots and, where an
//! exact solution is known, relative errors.

use crate::error::{Error, Result};
use crate::ldg::{mass, ComplexFn};
use crate::time::TimeGrid;

use super::registry::{ExperimentSpec, COLLISION_SNAPSHOTS};
use super::solver::{component_error, driver_dt, exact_norm, simulate, Discretization, RunState};

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonOptions {
    pub degree: usize,
    pub elements: usize,
    pub final_time: f64,
    /// Overrides the stability-capped default Courant constant.
    pub courant: Option<f64>,
    pub snapshot_times: Vec<f64>,
    /// Times at which the relative error against the exact solution is recorded.
    pub error_times: Vec<f64>,
    /// Mass is recorded every this many steps, plus at every checkpoint.
    pub mass_every: usize,
}

impl SolitonOptions {
    /// Registry defaults for `spec`: its first resolution and final time, the
    /// collision snapshot times within the run.
    pub fn defaults(spec: &ExperimentSpec) -> Self {
        let (degree, elements) = spec.default_resolutions[0];
        let snapshot_times = COLLISION_SNAPSHOTS
            .iter()
            .copied()
            .filter(|&t| t <= spec.final_time)
            .collect();
        Self {
            degree,
            elements,
            final_time: spec.final_time,
            courant: None,
            snapshot_times,
            error_times: Vec::new(),
            mass_every: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub x: Vec<f64>,
    /// `|u_i|` at the nodes, one vector per component.
    pub modulus: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolitonBundle {
    /// `(t, masses)`
    pub mass: Vec<(f64, Vec<f64>)>,
    pub snapshots: Vec<Snapshot>,
    /// `(t, relative L2 errors)` per component.
    pub errors: Vec<(f64, Vec<f64>)>,
    pub dt: f64,
    pub final_state: RunState,
}

impl SolitonBundle {
    /// Largest `|m(t) - m(0)| / m(0)` over the history, per component.
    pub fn max_relative_drift(&self) -> Vec<f64> {
        let Some((_, m0)) = self.mass.first() else {
            return Vec::new();
        };
        (0..m0.len())
            .map(|i| {
                self.mass
                    .iter()
                    .map(|(_, m)| ((m[i] - m0[i]) / m0[i]).abs())
                    .fold(0.0, f64::max)
            })
            .collect()
    }
}

/// Integrates the soliton experiment, stopping exactly at every snapshot
/// and error time.
pub fn run_soliton(spec: &ExperimentSpec, opts: &SolitonOptions) -> Result<SolitonBundle> {
    if opts.final_time <= 0.0 || !opts.final_time.is_finite() {
        return Err(Error::Config(format!("final time must be positive, got {}", opts.final_time)));
    }
    if opts.mass_every == 0 {
        return Err(Error::Config("mass cadence must be at least 1".into()));
    }
    for &t in opts.snapshot_times.iter().chain(&opts.error_times) {
        if !(0.0..=opts.final_time).contains(&t) {
            return Err(Error::Config(format!("requested time {t} outside [0, {}]", opts.final_time)));
        }
    }
    let exact = spec.problem.exact();
    if !opts.error_times.is_empty() && exact.is_none() {
        return Err(Error::Config(format!(
            "experiment {} has no exact solution for these parameters",
            spec.name
        )));
    }
    let disc = Discretization::new(spec.domain, opts.degree, opts.elements, spec.problem.alpha())?;
    let dt = driver_dt(&spec.problem, &disc, opts.courant)?;

    let mut checkpoints: Vec<f64> = opts
        .snapshot_times
        .iter()
        .chain(&opts.error_times)
        .copied()
        .chain([opts.final_time])
        .filter(|&t| t > 0.0)
        .collect();
    checkpoints.sort_by(f64::total_cmp);
    checkpoints.dedup();

    let mut bundle = SolitonBundle {
        mass: Vec::new(),
        snapshots: Vec::new(),
        errors: Vec::new(),
        dt,
        final_state: RunState::project(&spec.problem, &disc, &spec.initial),
    };
    let mut state = bundle.final_state.clone();
    let mut t0 = 0.0;
    record(opts, &disc, exact.as_deref(), 0.0, &state, &mut bundle)?;
    bundle.mass.push((0.0, state.masses(&disc)));
    for &t1 in &checkpoints {
        let grid = TimeGrid::uniform(t0, t1, dt)?;
        let total = grid.total_steps();
        let history = &mut bundle.mass;
        state = simulate(&spec.problem, &disc, state, &grid, opts.mass_every, |step, t, comps| {
            if step > 0 && step < total {
                history.push((t, comps.iter().map(|u| mass(u, &disc.mesh, &disc.ops)).collect()));
            }
            Ok(())
        })?;
        bundle.mass.push((t1, state.masses(&disc)));
        record(opts, &disc, exact.as_deref(), t1, &state, &mut bundle)?;
        t0 = t1;
    }
    bundle.final_state = state;
    Ok(bundle)
}

fn record(
    opts: &SolitonOptions,
    disc: &Discretization,
    exact: Option<&[ComplexFn]>,
    t: f64,
    state: &RunState,
    bundle: &mut SolitonBundle,
) -> Result<()> {
    if opts.snapshot_times.contains(&t) {
        bundle.snapshots.push(Snapshot {
            t,
            x: disc.mesh.nodes.clone(),
            modulus: state.components().into_iter().map(|u| u.modulus()).collect(),
        });
    }
    if let (true, Some(exact)) = (opts.error_times.contains(&t), exact) {
        let rel = state
            .components()
            .into_iter()
            .zip(exact)
            .map(|(u, e)| Ok(component_error(u, e, t, disc)? / exact_norm(e, t, disc)?))
            .collect::<Result<Vec<_>>>()?;
        bundle.errors.push((t, rel));
    }
    Ok(())
}
