use std::io;
use std::process::ExitCode;

use thiserror::Error;

/// Failure of a CLI run, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Inconsistent or invalid configuration; exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Failure inside a numerical routine; exit code 1.
    #[error("numerical failure: {0}")]
    Numerical(#[from] wigstat::Error),
    /// Failure writing an output file; exit code 1.
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Io(err.into())
    }
}
