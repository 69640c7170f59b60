use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Evaluation at a point where a density is singular.
    #[error("singular point: {0}")]
    Singularity(String),

    /// Exact integer arithmetic would leave its representable range.
    #[error("overflow guard: {0}")]
    Overflow(String),

    #[error("replicate {index} failed: {source}")]
    Replicate { index: usize, source: Box<Error> },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
