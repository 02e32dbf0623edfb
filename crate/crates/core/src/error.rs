use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KmeansError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = KmeansError> = std::result::Result<T, E>;
