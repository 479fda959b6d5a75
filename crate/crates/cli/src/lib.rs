//! Config-driven runs of the weak-value beam-deflection models.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

pub use config::{validate_config, ConfigInvalid, OutputFormat, Scenario, ScenarioConfig};
pub use error::CliError;
pub use scenario::{emit_profile, run_scenario, SweepRow};
