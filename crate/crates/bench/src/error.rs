use exact_kmeans::KmeansError;
use kmeans_tuner::TunerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{path}: row {row}, column {col}: {msg}")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        msg: String,
    },

    #[error("data: {0}")]
    Data(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Kmeans(#[from] KmeansError),

    #[error(transparent)]
    Tuner(#[from] TunerError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BenchError {
    /// Process exit status: 1 usage, 2 data, 3 broken invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Kmeans(KmeansError::Config(_)) => 1,
            Self::Invariant(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
