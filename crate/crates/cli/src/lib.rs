//! Experiment runner: JSON configurations in, CSV or JSON reports out.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, Command, ConfigErrors, ExperimentConfig, Format, Model};
pub use output::{render, write_report};
pub use run::{run_experiment, Report, Rows};
