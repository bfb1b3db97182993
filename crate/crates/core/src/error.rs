use thiserror::Error;

/// Errors surfaced by kernel construction, certification, and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("too many points: got {got}, limit is {max}")]
    TooManyPoints { got: usize, max: usize },

    #[error("kernel is not certified negative definite")]
    UncertifiedKernel,

    #[error("optimizer diverged: objective became non-finite")]
    OptimizerDiverged,
}

pub type Result<T> = std::result::Result<T, Error>;
