//! Runner errors with their process exit codes: 2 for anything wrong with
//! the configuration, 3 for a propagation that failed numerically, 1 for
//! I/O and internal faults.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Integration(String),
    Io(String),
    Internal(String),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config(message.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::Io(_) | CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            // propagation errors arrive with their own description
            CliError::Integration(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<cpr_core::Error> for CliError {
    fn from(e: cpr_core::Error) -> Self {
        match e {
            cpr_core::Error::IntegrationFailure { .. } => CliError::Integration(e.to_string()),
            cpr_core::Error::InvalidParameter { .. }
            | cpr_core::Error::GridTooCoarse { .. }
            | cpr_core::Error::ZeroDetuning { .. } => CliError::Config(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
