//! CLI error type with its process exit-code mapping.

use thiserror::Error;

/// Failures surfaced by the `railmask` binary, partitioned by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input data (missing file, broken PGM,
    /// non-binary mask, wrong mask size). Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Bad command-line usage beyond what argument parsing catches. Exit
    /// code 64.
    #[error("{0}")]
    Usage(String),
    /// Manifest violates the experiment schema. Exit code 65.
    #[error("{0}")]
    Schema(String),
    /// Training produced non-finite values. Exit code 70.
    #[error("training diverged in arm '{arm}' at step {step}")]
    Divergence { arm: String, step: usize },
    /// Anything else (typically failing to write outputs). Exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Usage(_) => 64,
            CliError::Schema(_) => 65,
            CliError::Divergence { .. } => 70,
            CliError::Failure(_) => 1,
        }
    }
}
