use thiserror::Error;

/// Errors produced by the estimators, models and simulation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The sample is too short for the requested threshold index.
    #[error("insufficient sample: n = {n}, but at least {required} observations are needed")]
    InsufficientSample { n: usize, required: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
