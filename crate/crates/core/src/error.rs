use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or iterative method failed to reach its target.
    #[error("no convergence in {what}: best estimate {best:.6e}, error estimate {err_est:.3e}")]
    Convergence { what: String, best: f64, err_est: f64 },

    #[error("assembly failed on pair ({i}, {j}): {reason}")]
    Assembly { i: usize, j: usize, reason: String },

    /// Caller misuse: mismatched grids, missing nodes, bad windows.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error at `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("parse error in {path:?} line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { key: key.into(), msg: msg.into() }
    }
}
