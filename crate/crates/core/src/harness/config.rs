//! TOML run configuration.
//!
//! ```toml
//! [run]
//! example = "ex1"
//! levels = "2:35,45,90;3:20,40,60"
//! courant = 0.2
//! out = "out/ex1"
//!
//! [problem]          # free-form problems for `solve`
//! alpha = 1.5
//! domain = [-20.0, 20.0]
//! lambda = [1.0, 1.0]
//! nonlinearity = "cubic"
//!
//! [[initial]]
//! shape = "sech"
//! wavenumber = 2.0
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Deserialize;

use crate::coupled::{CoupledNonlinearity, CoupledProblem};
use crate::error::{Error, Result};
use crate::fractional::Polynomial;
use crate::ldg::{Nonlinearity, SingleProblem};

use super::registry::{ExperimentSpec, ProblemKind};
use super::soliton::SolitonOptions;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: RunConfig,
    pub problem: Option<ProblemConfig>,
    #[serde(default)]
    pub initial: Vec<InitialConfig>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub example: Option<String>,
    pub levels: Option<String>,
    pub courant: Option<f64>,
    pub degree: Option<usize>,
    pub elements: Option<usize>,
    pub final_time: Option<f64>,
    pub snapshot_times: Option<Vec<f64>>,
    pub error_times: Option<Vec<f64>>,
    pub mass_every: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub varpi1: Option<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub alpha: f64,
    pub domain: [f64; 2],
    /// `[lambda1, lambda2]` for one equation, four values for a coupled pair.
    pub lambda: Vec<f64>,
    pub nonlinearity: String,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default)]
    pub varpi1: f64,
    #[serde(default)]
    pub varpi2: f64,
    pub varpi2_reverse: Option<f64>,
    /// Builds forcing and exact solution `e^{-it} P(x)` from polynomial
    /// initial profiles.
    #[serde(default)]
    pub manufactured: bool,
    pub final_time: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialConfig {
    /// `amplitude sech((x - center) / width) e^{i wavenumber x}`
    Sech {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        center: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        wavenumber: f64,
    },
    /// Real polynomial with ascending coefficients.
    Polynomial { coeffs: Vec<f64> },
}

impl InitialConfig {
    fn closure(&self) -> Arc<dyn Fn(f64) -> Complex64 + Send + Sync> {
        match *self {
            InitialConfig::Sech {
                amplitude,
                center,
                width,
                wavenumber,
            } => Arc::new(move |x| Complex64::from_polar(amplitude / ((x - center) / width).cosh(), wavenumber * x)),
            InitialConfig::Polynomial { ref coeffs } => {
                let p = Polynomial::new(coeffs.clone());
                Arc::new(move |x| Complex64::new(p.eval(x), 0.0))
            }
        }
    }

    fn polynomial(&self) -> Option<Polynomial> {
        match self {
            InitialConfig::Polynomial { coeffs } => Some(Polynomial::new(coeffs.clone())),
            InitialConfig::Sech { .. } => None,
        }
    }
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }
}

/// A free-form problem ready for the soliton driver.
#[derive(Debug, Clone)]
pub struct SolveSetup {
    pub spec: ExperimentSpec,
    pub options: SolitonOptions,
    pub out: Option<PathBuf>,
}

impl SolveSetup {
    pub fn from_config(cfg: &ConfigFile) -> Result<Self> {
        let pc = cfg
            .problem
            .as_ref()
            .ok_or_else(|| Error::Config("solve needs a [problem] section".into()))?;
        let domain = (pc.domain[0], pc.domain[1]);
        let coupled = match pc.lambda.len() {
            2 => false,
            4 => true,
            n => return Err(Error::Config(format!("lambda needs 2 or 4 values, got {n}"))),
        };
        let want = if coupled { 2 } else { 1 };
        if cfg.initial.len() != want {
            return Err(Error::Config(format!(
                "expected {want} [[initial]] entries, got {}",
                cfg.initial.len()
            )));
        }
        let profiles: Vec<Option<Polynomial>> = cfg.initial.iter().map(InitialConfig::polynomial).collect();
        if pc.manufactured && profiles.iter().any(Option::is_none) {
            return Err(Error::Config("manufactured problems need polynomial initial data".into()));
        }
        let problem = if coupled {
            let nl = match pc.nonlinearity.as_str() {
                "linear" => CoupledNonlinearity::Linear,
                "manakov" => CoupledNonlinearity::Manakov { beta: pc.beta },
                other => return Err(Error::Config(format!("unknown coupled nonlinearity `{other}`"))),
            };
            let lam = [pc.lambda[0], pc.lambda[1], pc.lambda[2], pc.lambda[3]];
            let mut p = CoupledProblem::new(pc.alpha, lam, pc.varpi1, pc.varpi2, nl)?;
            p.varpi2_reverse = pc.varpi2_reverse;
            if pc.manufactured {
                let (a, b) = (profiles[0].clone().unwrap(), profiles[1].clone().unwrap());
                p = p.with_manufactured(a, b, domain)?;
            }
            ProblemKind::Coupled(p)
        } else {
            if pc.varpi1 != 0.0 || pc.varpi2 != 0.0 || pc.varpi2_reverse.is_some() {
                return Err(Error::Config("coupling constants need a coupled problem".into()));
            }
            let nl = match pc.nonlinearity.as_str() {
                "linear" => Nonlinearity::Linear,
                "cubic" => Nonlinearity::Cubic,
                other => return Err(Error::Config(format!("unknown nonlinearity `{other}`"))),
            };
            let p = if pc.manufactured {
                let prof = profiles[0].clone().unwrap();
                SingleProblem::manufactured(pc.alpha, pc.lambda[0], pc.lambda[1], nl, prof, domain)?
            } else {
                SingleProblem::new(pc.alpha, pc.lambda[0], pc.lambda[1], nl)?
            };
            ProblemKind::Single(p)
        };
        let run = &cfg.run;
        if run.example.is_some() || run.levels.is_some() || run.alpha.is_some() || run.beta.is_some() || run.varpi1.is_some() {
            return Err(Error::Config(
                "[run] example, levels, alpha, beta and varpi1 do not apply to solve".into(),
            ));
        }
        let final_time = run.final_time.unwrap_or(pc.final_time);
        let has_exact = problem.exact().is_some();
        let spec = ExperimentSpec {
            id: None,
            name: "custom".into(),
            domain,
            final_time,
            initial: cfg.initial.iter().map(InitialConfig::closure).collect(),
            problem,
            default_resolutions: vec![(run.degree.unwrap_or(2), run.elements.unwrap_or(40))],
            component_resolutions: None,
            lambda_check: (pc.lambda[0], pc.lambda[0]),
        };
        let options = SolitonOptions {
            degree: run.degree.unwrap_or(2),
            elements: run.elements.unwrap_or(40),
            final_time,
            courant: run.courant,
            snapshot_times: run.snapshot_times.clone().unwrap_or_else(|| vec![0.0, final_time]),
            error_times: run
                .error_times
                .clone()
                .unwrap_or_else(|| if has_exact { vec![final_time] } else { Vec::new() }),
            mass_every: run.mass_every.unwrap_or(10),
        };
        Ok(Self { spec, options, out: run.out.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ConfigFile::parse("[run]\ncourrant = 0.2\n").is_err());
        assert!(ConfigFile::parse("colour = 1\n").is_err());
        assert!(ConfigFile::parse("[run]\ncourant = 0.2\n").is_ok());
    }

    #[test]
    fn free_form_single_soliton() {
        let cfg = ConfigFile::parse(
            r#"
[run]
degree = 2
elements = 20
final_time = 0.1
[problem]
alpha = 1.5
domain = [-10.0, 10.0]
lambda = [1.0, 1.0]
nonlinearity = "cubic"
final_time = 1.0
[[initial]]
shape = "sech"
wavenumber = 2.0
"#,
        )
        .unwrap();
        let setup = SolveSetup::from_config(&cfg).unwrap();
        assert_eq!(setup.options.final_time, 0.1);
        assert_eq!(setup.options.snapshot_times, vec![0.0, 0.1]);
        assert!(setup.options.error_times.is_empty());
        let u0 = (setup.spec.initial[0])(0.5);
        assert!((u0.norm() - 1.0 / 0.5f64.cosh()).abs() < 1e-15);
    }

    #[test]
    fn coupled_needs_two_initial_entries() {
        let text = r#"
[problem]
alpha = 2.0
domain = [-1.0, 1.0]
lambda = [1.0, 1.0, 1.0, 1.0]
nonlinearity = "manakov"
final_time = 1.0
[[initial]]
shape = "sech"
"#;
        let err = SolveSetup::from_config(&ConfigFile::parse(text).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn manufactured_requires_polynomials() {
        let text = r#"
[problem]
alpha = 1.5
domain = [0.0, 1.0]
lambda = [0.1, 1.0]
nonlinearity = "linear"
manufactured = true
final_time = 0.5
[[initial]]
shape = "sech"
"#;
        assert!(SolveSetup::from_config(&ConfigFile::parse(text).unwrap()).is_err());
        let ok = text.replace("shape = \"sech\"", "shape = \"polynomial\"\ncoeffs = [0.0, 0.0, 0.0, 1.0]");
        let setup = SolveSetup::from_config(&ConfigFile::parse(&ok).unwrap()).unwrap();
        assert_eq!(setup.options.error_times, vec![0.5]);
    }
}
