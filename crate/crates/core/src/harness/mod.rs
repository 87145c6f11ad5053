//! Experiment registry, convergence and soliton drivers, and artifact output.

pub mod config;
pub mod convergence;
pub mod csv;
pub mod registry;
pub mod soliton;
pub mod solver;
pub mod verify;

pub use config::{ConfigFile, SolveSetup};
pub use convergence::{parse_levels, run_convergence, ConvergenceRow};
pub use registry::{experiment, ExperimentId, ExperimentSpec, Overrides, ProblemKind};
pub use soliton::{run_soliton, Snapshot, SolitonBundle, SolitonOptions};
pub use solver::{stable_courant, Discretization, RunState};
pub use verify::{verify_ops, CheckResult, VerifyReport};
