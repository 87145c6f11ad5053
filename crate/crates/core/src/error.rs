use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial degree must be at least 1, got {0}")]
    InvalidDegree(usize),

    #[error("invalid domain [{a}, {b}]: left endpoint must be below right endpoint")]
    InvalidDomain { a: f64, b: f64 },

    #[error("mesh needs at least 2 elements, got {0}")]
    TooFewElements(usize),

    #[error("fractional order alpha = {0} outside (1, 2]")]
    InvalidOrder(f64),

    #[error("CFL constant {0} outside (0, 1)")]
    InvalidCfl(f64),

    #[error("invalid quadrature request: {0}")]
    Quadrature(String),

    #[error("adaptive quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    QuadratureNonConvergence { tol: f64, estimate: f64 },

    #[error("field shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("non-finite state after step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("invalid time grid: {0}")]
    TimeGrid(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("run with N = {degree}, K = {elements} failed: {source}")]
    AtResolution {
        degree: usize,
        elements: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("operator dump {path} is malformed: {reason}")]
    MalformedDump { path: PathBuf, reason: String },
}

impl Error {
    /// The innermost error, looking through resolution context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtResolution { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
