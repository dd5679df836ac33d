//! Error type shared by all engine modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text (SMART records, qrels lines).
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Caller violated an operation precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("empty corpus")]
    EmptyCorpus,

    /// A structure that should be impossible to build was observed anyway.
    #[error("internal consistency: {0}")]
    Inconsistency(String),

    /// SVD or factorization did not converge / produced no usable factors.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Snapshot container is unreadable or carries an unknown version.
    #[error("snapshot format: {0}")]
    Snapshot(String),

    /// Artifact was built against a different corpus or configuration.
    #[error("incompatible artifact: {0}")]
    Incompatible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
