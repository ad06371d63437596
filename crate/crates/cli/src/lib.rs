//! Library side of the `plsigma` command-line tool.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{cmd_construct, cmd_simulate, cmd_verify, Overrides, PointSpec, Simulation};
pub use config::ModelConfig;
pub use report::{to_json, Report};

/// Failures, split by exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    /// Malformed config or arguments (exit 2).
    #[error("input error: {0}")]
    Input(String),
    /// A computation failed (exit 1).
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}
