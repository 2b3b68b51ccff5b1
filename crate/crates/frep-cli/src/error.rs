//! CLI error type carrying the process exit code: 2 for input problems
//! (malformed files, bad arguments), 1 for assertion-grade failures
//! (violated numeric invariants).

use frep_core::FrepError;
use std::fmt;

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            message: message.into(),
            exit_code: 2,
        }
    }

}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<FrepError> for CliError {
    fn from(e: FrepError) -> Self {
        let code = match e {
            FrepError::Internal(_) => 1,
            _ => 2,
        };
        CliError {
            message: e.to_string(),
            exit_code: code,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
