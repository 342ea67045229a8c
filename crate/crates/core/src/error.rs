use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = CsemError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CsemError {
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: malformed record: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("validation failed for {record_id}: {message}")]
    Validation { record_id: String, message: String },

    #[error("duplicate id {0}")]
    DuplicateId(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing dependency: {0}")]
    MissingDependency(String),

    #[error("service error: {0}")]
    Service(String),

    #[error("bad file format in {path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl CsemError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CsemError::Io { path: path.into(), source }
    }

    pub(crate) fn validation(record_id: impl Into<String>, message: impl Into<String>) -> Self {
        CsemError::Validation { record_id: record_id.into(), message: message.into() }
    }

    /// True for errors a caller should report as bad input rather than
    /// an environment failure.
    pub fn is_validation(&self) -> bool {
        !matches!(self, CsemError::Io { .. } | CsemError::Service(_))
    }
}
