use thiserror::Error;

/// Errors produced by model construction, inference, sampling and learning.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("model has {nodes} nodes, exhaustive enumeration is limited to {limit}")]
    Capacity { nodes: usize, limit: usize },

    #[error("no mixing certificate: {0}")]
    NoCertificate(String),

    #[error("did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("mode error: {0}")]
    Mode(String),

    #[error("non-finite {what} at iteration {iteration}")]
    Numeric { iteration: u64, what: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
