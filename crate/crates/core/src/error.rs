use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by calibration, simulation and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, found {found})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value {value} at row {row}, column {column}")]
    NonFiniteValue { row: usize, column: usize, value: f64 },

    #[error("negative risk {value} at row {row}, column {column}")]
    NegativeValue { row: usize, column: usize, value: f64 },

    #[error("value {value} at row {row}, column {column} lies outside [0, 1] but the matrix is declared unit-bounded")]
    BoundViolation { row: usize, column: usize, value: f64 },

    #[error("mean-risk control requires unit-bounded risks")]
    UnboundedRisk,

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid control spec: {0}")]
    InvalidSpec(String),

    #[error("ordering is not a permutation of the grid ids: {0}")]
    BadPermutation(String),

    #[error("empty input")]
    EmptyInput,

    #[error("risk sample is not sorted ascending (position {0})")]
    Unsorted(usize),

    #[error("no reward available for certified id {0}")]
    MissingReward(usize),

    #[error("grid of {size} points exceeds the cap of {cap}")]
    GridTooLarge { size: u128, cap: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("parse error in {path} at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },

    #[error("file not found: {0}")]
    FileNotFound(PathBuf),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// True for errors caused by the filesystem rather than by the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::FileNotFound(_) | Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
