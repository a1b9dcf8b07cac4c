pub mod commands;
pub mod config;

use thiserror::Error;

/// Exit statuses: 2 for configuration problems, 3 for numerical failures.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Schema(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<liouville_sync::Error> for CliError {
    fn from(e: liouville_sync::Error) -> Self {
        use liouville_sync::Error as E;
        match e {
            E::Invalid(_) | E::Dimension(_) => CliError::Schema(e.to_string()),
            E::Numerical(_) | E::BranchBroken { .. } | E::FitRefused(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
