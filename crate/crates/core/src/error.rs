use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("path index {path} outside 1..={num_paths}")]
    InvalidPath { path: usize, num_paths: usize },
    #[error("state is not normalized (trace or norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not a valid density operator: {0}")]
    InvalidState(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("POVM invalid: {0}")]
    InvalidPovm(String),
    #[error("not stochastic: {0}")]
    NotStochastic(String),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
