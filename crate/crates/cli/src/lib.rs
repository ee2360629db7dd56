//! Front end of the `polydisk` binary: problem files, pipelines and reports.

pub mod commands;
pub mod error;
pub mod expr;
pub mod problem;
pub mod report;

pub use commands::{
    cmd_analyze, cmd_certify, cmd_example, cmd_solve, cmd_verify_lemmas, run_example, run_problem, CertifyOptions,
    Flags, LemmaOptions, RunOptions, Stage,
};
pub use error::{CliError, CliResult};
pub use problem::ProblemSpec;
pub use report::{Format, RunReport};
