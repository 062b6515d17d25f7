//! Library half of the `beamtrack` command-line tool: config files, result
//! export and the subcommand implementations.

pub mod commands;
pub mod config;
pub mod export;

use beamtrack_core::Error as CoreError;
use thiserror::Error;

/// Failures split by who has to act: bad input or a failed computation.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }

    /// Errors raised before any simulation starts are input problems.
    pub fn invalid(e: CoreError) -> Self {
        CliError::Validation(e.to_string())
    }

    pub fn runtime(e: CoreError) -> Self {
        match e {
            CoreError::Config { .. } | CoreError::InvalidArgument(_) => CliError::Validation(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Version stamped into every output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
