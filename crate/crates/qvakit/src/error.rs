//! Error type shared by every module of the toolkit.

use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants are coarse on purpose: callers (the CLI and the C ABI) map
/// them onto a small set of exit/status codes.
#[derive(Debug, Error)]
pub enum QvaError {
    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two inputs that must have equal length do not.
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    /// An index lies outside the valid range of an enumeration.
    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: String, limit: String },

    /// A dense operation was requested on an object above the dense limit.
    #[error("size {size} exceeds the dense limit {limit}")]
    TooLarge { size: usize, limit: usize },

    /// A numerical routine failed (non-finite values, non-convergence).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A run configuration or instance file is malformed.
    #[error("configuration error: {0}")]
    Config(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV (de)serialisation failure.
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// JSON (de)serialisation failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, QvaError>;

impl QvaError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QvaError::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        QvaError::Numerical(msg.into())
    }
}
