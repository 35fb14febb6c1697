use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed problem/config files.
    #[error("{0}")]
    Input(String),
    /// Printed problem data that contradicts its exact solution.
    #[error("{0}")]
    Consistency(String),
    #[error("{0}")]
    Failure(String),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Consistency(_) => 3,
            CliError::Failure(_) | CliError::Io(_) => 1,
        }
    }
}
