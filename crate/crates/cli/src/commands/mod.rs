//! One function per subcommand. Each returns the files it wrote and the
//! number of grid cells that failed.

mod dataset;
mod genbound;
mod scan;
mod toy;
mod train;

use std::path::PathBuf;

use nie_lab_core::circuits::CircuitSpec;
use nie_lab_core::train::Dataset;
use serde::Serialize;

pub use dataset::cmd_dataset;
pub use genbound::{cmd_genbound, GenboundOutput};
pub use scan::{cmd_scan, ScanOutput};
pub use toy::cmd_toy;
pub use train::{cmd_train, LevelSummary, TrainOutput, TrainStatus};

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOutcome {
    pub outputs: Vec<PathBuf>,
    pub failures: usize,
}

/// JSON envelope: every summary embeds the resolved configuration.
#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    config: &'a RunConfig,
    failures: usize,
    #[serde(flatten)]
    body: T,
}

/// Circuit, dataset and the training inputs used for spectrum sampling.
fn model_and_inputs(cfg: &RunConfig) -> Result<(CircuitSpec, Dataset, Vec<Vec<f64>>), CliError> {
    let spec = cfg.circuit.build(cfg.layers)?;
    let ds = cfg.dataset.load()?;
    if ds.n_features() != spec.n_features() {
        return Err(CliError::Config(format!(
            "{} takes {} features but the dataset has {}",
            cfg.circuit,
            spec.n_features(),
            ds.n_features()
        )));
    }
    let take = cfg.inputs.unwrap_or(usize::MAX);
    if take == 0 {
        return Err(CliError::Config("inputs must be at least 1".into()));
    }
    let inputs = ds.train_idx.iter().take(take).map(|&i| ds.input(i)).collect();
    Ok((spec, ds, inputs))
}

fn require_seeds(n: usize, at_least: usize) -> Result<(), CliError> {
    if n < at_least {
        return Err(CliError::Config(format!("need at least {at_least} seeds, got {n}")));
    }
    Ok(())
}
