use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("working precision must be at least 20 decimal digits, got {0}")]
    PrecisionTooLow(u32),
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported potential: {0}")]
    Potential(String),
    #[error("inconsistent problem: {0}")]
    Consistency(String),
    #[error("coefficient table too short: need j_max >= {needed}, have {have}")]
    TableTooShort { needed: usize, have: usize },
    #[error("exact mode requires rational inputs: {0}")]
    ExactMode(String),
    #[error("exact determinant limited to dimension {max}, got {dim}")]
    CostGuard { dim: usize, max: usize },
    #[error("series normalization: c_0 must be 1")]
    Normalization,
    #[error("ratio undefined for g = 0")]
    UndefinedRatio,
    #[error("no theta-stable eigenvalue near the target: {0}")]
    NotFound(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
