//! Configuration and reporting behind the `eddy` binary.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Config, ConfigError, ExperimentKind};
pub use run::{compute, replay, run, verdict, CliError, ReplayOutcome, RunOptions, RunOutcome, Verdict};
