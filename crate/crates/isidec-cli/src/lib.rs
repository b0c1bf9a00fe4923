//! Experiment driver around the `isidec` library.
//!
//! The binary exposes five experiments — Monte Carlo decoding campaigns,
//! single-point exponent evaluation, exponent surfaces, one-shot lattice
//! estimation, and spectrum-limit checks — each configurable through
//! inline flags or a JSON file with identical semantics.  All outputs are
//! deterministic functions of the configuration (including across thread
//! counts), so any result file can be regenerated from its config and
//! seed alone.

pub mod config;
pub mod run;

pub use run::{dispatch, RunOutput};

/// Driver-level failure, split by the exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad invocation or configuration: exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Failure while running a valid experiment: exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl From<isidec::Error> for CliError {
    fn from(e: isidec::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
