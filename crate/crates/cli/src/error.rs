use std::fmt;

use erratic::Error;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or parameters.
    User(String),
    /// Anything else: failed writes, simulation failures.
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::User(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    pub fn user(msg: impl Into<String>) -> Self {
        CliError::User(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidEpsilon(_)
            | Error::Domain { .. }
            | Error::Validation(_)
            | Error::Degenerate(_)
            | Error::CatalanOverflow(_) => CliError::User(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}
