//! CLI-level errors: every failure carries one message and maps to exit
//! code 1. Library errors pass through their own display text, so parse
//! errors keep their byte position.

use std::fmt;

#[derive(Debug)]
pub struct CliError(pub String);

pub type CliResult<T> = std::result::Result<T, CliError>;

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<colombeau::Error> for CliError {
    fn from(e: colombeau::Error) -> CliError {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError(e.to_string())
    }
}
