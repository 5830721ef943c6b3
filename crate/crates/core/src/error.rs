use std::io;

use thiserror::Error;

/// Coarse error class, used for CLI exit codes and FFI status codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dimension mismatch at row {row}: expected {expected} features, found {found}")]
    DimensionMismatch { row: usize, expected: usize, found: usize },
    #[error("duplicate record id {0:?}")]
    DuplicateId(String),
    #[error("parse error at row {row}: {msg}")]
    Parse { row: usize, msg: String },
    #[error("invalid label {0:?}: label path must have at least one non-empty level")]
    InvalidLabel(String),
    #[error("relevance level {level} exceeds label depth {depth} of record {id:?}")]
    LevelTooDeep { level: usize, depth: usize, id: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{scheme} weighting requires nonnegative features")]
    NegativeFeature { scheme: &'static str },
    #[error("{scheme} weighting is undefined for a zero vector")]
    ZeroVector { scheme: &'static str },
    #[error("vector dimension {found} does not match dataset dimension {expected}")]
    QueryDimension { expected: usize, found: usize },
    #[error("fingerprint mismatch: expected {expected}, found {found}")]
    FingerprintMismatch { expected: String, found: String },
    #[error("singular system: {0}; use a ridge > 0")]
    Singular(String),
    #[error("iterative solver did not converge after {iters} iterations (relative residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("malformed file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Singular(_) | Error::NoConvergence { .. } => ErrorKind::Numerical,
            Error::Io(_) => ErrorKind::Io,
            Error::Csv(e) if e.is_io_error() => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
