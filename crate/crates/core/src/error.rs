use thiserror::Error;

/// Broad failure class, used by front ends to choose an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Inputs outside the documented domain of an operation.
    InvalidInput,
    /// A numerical procedure failed to converge or to bracket.
    Numerical,
    /// The inputs are valid but the request is outside the supported regime.
    Refused,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{function}: pole at x = {x}")]
    Pole { function: &'static str, x: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("{function}: series did not converge within {terms} terms")]
    NonConvergence {
        function: &'static str,
        terms: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("root iteration limit reached near {last}")]
    MaxIterations { last: f64 },

    #[error("no sign change of the characteristic function for l in (0, {limit}]")]
    ScanExhausted { limit: f64 },

    #[error("failed to bracket root {index} while scanning [{lo}, {hi}]")]
    Bracketing { index: usize, lo: f64, hi: f64 },

    #[error("branch jump: {count} zeros inside the continuation window [{lo}, {hi}]")]
    BranchJump { count: usize, lo: f64, hi: f64 },

    #[error("self-check failed: {0}")]
    SelfCheck(String),

    #[error("inconsistent eigenvalue record: {0}")]
    InconsistentRecord(String),

    #[error("integrability classification inconclusive: {0}")]
    Inconclusive(String),

    #[error("gaps below the noise floor at points {indices:?}")]
    NoiseFloor { indices: Vec<usize> },

    #[error(
        "inverse iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    EigenNonConvergence { iterations: usize, residual: f64 },

    #[error("refused: {0}")]
    Refused(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parameter(_) | Error::Pole { .. } | Error::Domain(_) => ErrorClass::InvalidInput,
            Error::Refused(_) => ErrorClass::Refused,
            _ => ErrorClass::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
