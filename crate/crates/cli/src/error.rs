use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
/// I/O and other runtime failures.
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
/// Residual check or identity suite failed.
pub const EXIT_CHECK_FAILED: i32 = 3;
pub const EXIT_NON_CONVERGENCE: i32 = 4;
pub const EXIT_HYPOTHESIS: i32 = 5;
pub const EXIT_CERTIFICATE_FAILED: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] polydisk_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Read { .. } | CliError::Write { .. } => EXIT_FAILURE,
            CliError::Core(polydisk_core::Error::NonConvergence { .. }) => EXIT_NON_CONVERGENCE,
            CliError::Core(polydisk_core::Error::HypothesisViolated { .. }) => EXIT_HYPOTHESIS,
            CliError::Core(_) => EXIT_FAILURE,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
