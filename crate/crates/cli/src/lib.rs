//! Experiment runner: dataset generation, spectrum scans, training sweeps,
//! bound evaluation and toy-model sweeps, each persisted as CSV and JSON.

pub mod commands;
pub mod config;
pub mod grid;
pub mod output;

use std::path::PathBuf;

pub use commands::{
    cmd_dataset, cmd_genbound, cmd_scan, cmd_toy, cmd_train, CommandOutcome, GenboundOutput,
    ScanOutput, TrainOutput, TrainStatus,
};
pub use config::{DatasetSpec, RunConfig, ToyConfig};
pub use grid::GridSpec;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("grid: {0}")]
    Grid(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("output: {0}")]
    Output(String),
    #[error(transparent)]
    Core(#[from] nie_lab_core::Error),
}
