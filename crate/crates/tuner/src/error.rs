use exact_kmeans::KmeansError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TunerError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Kmeans(#[from] KmeansError),

    #[error("line {line}: {source}")]
    Json {
        line: usize,
        source: serde_json::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TunerError> = std::result::Result<T, E>;
