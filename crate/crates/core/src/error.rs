use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("degenerate geometry: {link} link distance {distance} m is below {min} m")]
    DegenerateGeometry {
        link: &'static str,
        distance: f64,
        min: f64,
    },

    #[error("retraction undefined: entry {index} has modulus {modulus:e}")]
    DegenerateRetraction { index: usize, modulus: f64 },

    #[error("Armijo line search failed after {backtracks} backtracks")]
    LineSearchFailed { backtracks: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("grid oracle budget exceeded: {levels}^{n} points exceeds {budget:e}")]
    BudgetExceeded { levels: usize, n: usize, budget: f64 },

    #[error("config line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
