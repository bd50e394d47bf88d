//! Command-line front end: configuration, the figure manifest, runs and
//! output writers.

// `!(a < b)` deliberately rejects NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod manifest;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, Format, Overrides, RunConfig};
pub use manifest::Manifest;
pub use run::{run, RunReport};

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const CONFIG: u8 = 2;
    pub const NUMERICAL: u8 = 3;
    pub const MASKED: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(lzsm_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<lzsm_core::Error> for CliError {
    fn from(e: lzsm_core::Error) -> Self {
        match e {
            lzsm_core::Error::InvalidParams { .. } => CliError::Config(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Numerical(_) | CliError::Io(_) => exit::NUMERICAL,
        }
    }
}
