//! Command-line front end: expression parsing, computations, verification
//! suites and JSON output.

pub mod cache;
pub mod eval;
pub mod parse;
pub mod render;
pub mod run;

use std::fmt;

/// Errors surfaced to the user. Usage errors exit with code 2, computation
/// errors with code 1.
#[derive(Debug, Clone)]
pub struct CliError {
    pub usage: bool,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { usage: true, message: message.into() }
    }

    pub fn computation(message: impl Into<String>) -> Self {
        CliError { usage: false, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl From<bosonext::Error> for CliError {
    fn from(e: bosonext::Error) -> Self {
        CliError::computation(e.to_string())
    }
}

impl From<parse::SyntaxError> for CliError {
    fn from(e: parse::SyntaxError) -> Self {
        CliError::computation(e.to_string())
    }
}
