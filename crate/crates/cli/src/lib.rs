//! Batch front end for `qrelay-core`: rates, optimization, feasibility
//! checks, parameter sweeps and decoupling experiments, driven by a JSON
//! configuration and written as JSON or CSV.

pub mod config;
mod run;

pub use config::{Command, Overrides, RunConfig};
pub use run::{execute, run, validate, RunOutput};

/// Exit code for configuration errors (parse failures, unknown names,
/// dimension mismatches, invalid parameters).
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numeric-domain failures.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl From<qrelay_core::Error> for CliError {
    fn from(e: qrelay_core::Error) -> Self {
        match e {
            qrelay_core::Error::NumericDomain(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
