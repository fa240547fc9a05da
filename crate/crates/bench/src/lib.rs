//! Benchmark harness for the robust k-means toolkit: experiment
//! configuration, multi-seed runs, metric aggregation, and report emission.

pub mod config;
pub mod experiment;
pub mod report;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] okmeans::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub use config::{load_config, ExperimentConfig};
pub use experiment::{build_dataset, run_experiment, ExperimentReport};
pub use report::{emit_report, MethodFailure, ReportFormat, ReportRow};
