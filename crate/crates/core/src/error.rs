use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its documented range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A function argument lies outside the mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data violates a precondition (asymmetry, shape mismatch, odd cycle, ...).
    #[error("input error: {0}")]
    Input(String),

    /// The tridiagonal QL iteration failed to converge.
    #[error("eigensolver did not converge for eigenvalue {index} after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },

    /// A resource guard tripped (matrix dimension or enumeration depth too large).
    #[error("resource guard: {0}")]
    Resource(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed records or report file.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
