//! Command-line verification harness for left-invariant complex Finsler metrics.

pub mod config;
pub mod error;
pub mod output;
pub mod suites;

pub use config::{load_config, RunConfig, Suite};
pub use error::CliError;
pub use suites::{run_suite, run_suites, SuiteOutcome};
