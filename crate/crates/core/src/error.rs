use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count {n} outside supported range 1..={max}")]
    VariableCount { n: usize, max: usize },

    #[error("mask {bits:#b} does not fit in {n} variables")]
    MaskOutOfRange { bits: u64, n: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("value function returned non-finite value {value} at mask {mask:#b}")]
    NonFiniteValue { mask: u64, value: f64 },

    #[error("table length {len} is not a power of two")]
    NotPowerOfTwo { len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("per-variable-mean baseline has no reference dataset attached")]
    UnresolvedBaseline,

    #[error("class index {label} out of range for {classes} classes")]
    InvalidLabel { label: usize, classes: usize },

    #[error("probabilities sum to {sum}, expected 1")]
    InvalidProbabilities { sum: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unknown sub-category {0:?}")]
    UnknownCategory(String),

    #[error("input noise requires a normalized dataset")]
    NotNormalized,

    #[error("training diverged at epoch {epoch} (loss {loss})")]
    Divergence { epoch: usize, loss: f64 },

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error("unsupported model format version {found:?}")]
    VersionMismatch { found: String },

    #[error("file truncated while reading {0}")]
    Truncated(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("selection matched no samples: {0}")]
    EmptySelection(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EmptySelection(_) => 3,
            Error::Invariant(_) => 4,
            Error::Divergence { .. } => 1,
            _ => 2,
        }
    }
}
