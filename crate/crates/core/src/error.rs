use std::path::PathBuf;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// No monotone path exists for the requested alignment.
    #[error("infeasible alignment: {frames} frames cannot hold {required} labels")]
    Infeasible { frames: usize, required: usize },

    /// Input is well-formed but carries no usable content (e.g. no voiced frames).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("training failed at epoch {epoch}, step {step}: {reason}")]
    TrainingFailure {
        epoch: usize,
        step: usize,
        reason: String,
    },

    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("WAV error: {0}")]
    Wav(#[from] hound::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 validation, 2 infeasible computation, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_)
            | Error::DimensionMismatch { .. }
            | Error::VersionMismatch { .. }
            | Error::Json(_)
            | Error::Csv(_) => 1,
            Error::Infeasible { .. } | Error::Degenerate(_) | Error::TrainingFailure { .. } => 2,
            Error::Io { .. } | Error::Wav(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
