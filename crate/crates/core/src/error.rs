//! Error type shared by all core modules.

use alloc::string::String;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CoreError {
    /// An argument violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numeric consistency check failed (probabilities not summing to
    /// one, variance routes disagreeing, failed convergence).
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// The requested computation exceeds a hard size cap.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// The operation is not supported for these inputs (e.g. wrong
    /// dimension).
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, CoreError>;
