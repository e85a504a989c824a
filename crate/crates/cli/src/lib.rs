//! Command-line front end for `cubicrx`: configuration files, BER sweeps,
//! LP3 fits, goodness-of-fit reports and Monte-Carlo validation.

use std::path::PathBuf;

use thiserror::Error;

pub mod commands;
pub mod config;
pub mod sweep;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const TOLERANCE: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] cubicrx::Error),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => exit::CONFIG,
            CliError::Numerical(cubicrx::Error::Config(_)) => exit::CONFIG,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::Tolerance(_) => exit::TOLERANCE,
        }
    }
}
