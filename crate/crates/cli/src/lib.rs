//! Library side of the `depthtune` command: configuration and the
//! `plant show`, `simulate`, `tune` and `compare` workflows.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use thiserror::Error;

pub use config::RunSpec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] depthtune_core::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 3 for a diverging simulation, 2 for configuration and precondition
    /// failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(depthtune_core::Error::Divergence { .. }) => 3,
            CliError::Core(_) | CliError::Config(_) => 2,
            CliError::Io { .. } => 1,
        }
    }
}
