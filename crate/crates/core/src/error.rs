use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("epsilon must lie in [0, 1/2), got {0}")]
    InvalidEpsilon(f64),

    #[error("argument outside the domain of {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("invalid input: {0}")]
    Validation(String),

    /// Two or more positions share a fractional part where distinct ones are required.
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("catalan({0}) does not fit in a u64 (largest supported index is 36)")]
    CatalanOverflow(u32),

    #[error("walk did not hit its target within {cap} steps (trial {trial})")]
    StepCapExceeded { cap: u64, trial: u64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
