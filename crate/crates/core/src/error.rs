use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("invalid ensemble parameters: {0}")]
    Spec(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("exhaustive enumeration infeasible: nullity {nullity} exceeds cap {cap}")]
    EnumerationInfeasible { nullity: usize, cap: usize },

    #[error("value {value} outside {domain}")]
    OutOfRange { value: f64, domain: &'static str },

    #[error("ensemble lacks linear minimum distance (lambda = {lambda}, gamma = {gamma})")]
    NoLinearDistance { lambda: usize, gamma: usize },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}
