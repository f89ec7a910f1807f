//! Command-line front end for the edge-aware mask-loss pipeline: PGM mask
//! I/O, the JSON experiment manifest, and the three-arm ablation runner.

pub mod error;
pub mod manifest;
pub mod pgm;
pub mod runner;

pub use error::CliError;
pub use manifest::{load_manifest, Manifest};
pub use pgm::{read_pgm, write_pgm, PgmFormat};
pub use runner::{run_experiment, ArmOutcome, RunOptions, ARMS};
