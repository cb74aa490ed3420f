//! Configuration-driven sweeps, output files and the validation suite
//! behind the `lambshift` binary.

use std::path::{Path, PathBuf};

pub mod columns;
pub mod config;
pub mod output;
pub mod run;
pub mod validate;

pub use config::{Plan, SweepConfig};
pub use run::{run, SweepResult};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("output error: {0}")]
    Output(String),

    #[error("{0} sweep points or fits failed")]
    Solver(usize),

    #[error("{0} validation rows failed")]
    Validation(usize),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn csv(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }

    pub(crate) fn from_core_config(e: lambshift_core::Error) -> Self {
        CliError::Config(e.to_string())
    }

    /// 1 configuration or file error, 2 solver failure, 3 validation failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Output(_) => 1,
            CliError::Solver(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}
