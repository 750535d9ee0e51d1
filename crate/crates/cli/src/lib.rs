//! Experiment harness around the `cablemor` core: named presets, a TOML
//! config schema, and deterministic CSV artifacts.

pub mod config;
pub mod csv_out;
pub mod experiment;
pub mod presets;

pub use config::{load_config, parse_config, ConfigError, ExperimentConfig, Overrides};
pub use experiment::{run_batch, run_experiment, run_stage, ExperimentReport, Stage};
