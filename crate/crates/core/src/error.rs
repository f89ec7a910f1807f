//! Error type shared by all grid, loss, and training operations.

use thiserror::Error;

/// Failure modes of the mask-loss pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes are incompatible: mismatched grids, kernel larger than the
    /// input, wrong coefficient count, and similar.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A value-level precondition failed: non-finite input, even kernel size,
    /// non-binary mask where a binary one is required, and similar.
    #[error("invalid value: {0}")]
    Validation(String),
    /// Gradient descent produced a non-finite loss or parameter.
    #[error("training diverged at step {step}: loss or parameters became non-finite")]
    Divergence {
        /// Zero-based index of the step whose update broke.
        step: usize,
    },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
