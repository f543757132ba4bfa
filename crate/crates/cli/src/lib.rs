//! Configuration-driven runs of the sublinear law of large numbers harness.
//!
//! A run reads one JSON document ([`config`]), checks the hypotheses of the
//! weak law on the configured model, estimates the deviation capacities
//! along the level schedule, evaluates the proof chain and writes CSV
//! tables, a JSON summary and a manifest ([`run`]).

pub mod config;
pub mod error;
pub mod run;

pub use config::{load_config, parse_config, ExperimentConfig, RawConfig};
pub use error::{CliError, CliResult, EXIT_CONDITIONS, EXIT_EXECUTION, EXIT_OK, EXIT_USAGE};
pub use run::{run, RunManifest, RunOutcome, RunStatus, Summary, OUTPUT_FILES};
