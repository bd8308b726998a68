use thiserror::Error;

pub type Result<T, E = RdeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum RdeError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("cannot select from an empty set")]
    EmptySelection,

    #[error("could not draw {needed} distinct indices from {available} candidates")]
    InsufficientCandidates { needed: usize, available: usize },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl RdeError {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        RdeError::Config(msg.into())
    }
}
