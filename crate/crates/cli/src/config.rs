//! Resolved run configuration: JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use nie_lab_core::circuits::CircuitKind;
use nie_lab_core::genbound::{DeterminantPolicy, DEFAULT_DELTA, DEFAULT_SEEDS_PER_INPUT};
use nie_lab_core::noise::ChannelKind;
use nie_lab_core::train::{
    gen_sinusoidal, load_csv_dataset, Dataset, SinusoidalParams, DEFAULT_EPOCHS,
};
use serde::{Deserialize, Serialize};

use crate::grid::GridSpec;
use crate::CliError;

/// Where the data come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DatasetSpec {
    /// 50 samples, 30% train.
    Sinusoidal { seed: u64 },
    /// 20 samples, 75% train.
    Sinusoidal2 { seed: u64 },
    Csv {
        path: PathBuf,
        features: Vec<String>,
        label: String,
        train_count: usize,
        seed: u64,
    },
}

impl Default for DatasetSpec {
    fn default() -> Self {
        DatasetSpec::Sinusoidal { seed: 0 }
    }
}

impl DatasetSpec {
    pub fn load(&self) -> Result<Dataset, CliError> {
        Ok(match self {
            DatasetSpec::Sinusoidal { seed } => gen_sinusoidal(*seed, &SinusoidalParams::STANDARD)?,
            DatasetSpec::Sinusoidal2 { seed } => gen_sinusoidal(*seed, &SinusoidalParams::SMALL)?,
            DatasetSpec::Csv {
                path,
                features,
                label,
                train_count,
                seed,
            } => {
                let cols: Vec<&str> = features.iter().map(String::as_str).collect();
                load_csv_dataset(path, &cols, label, *train_count, *seed)?
            }
        })
    }

    /// Replaces the generator seed.
    pub fn with_seed(&self, s: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            DatasetSpec::Sinusoidal { seed }
            | DatasetSpec::Sinusoidal2 { seed }
            | DatasetSpec::Csv { seed, .. } => *seed = s,
        }
        out
    }
}

/// Sweep settings for the closed-form dephasing models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToyConfig {
    pub delta_e: f64,
    pub delta_ell: f64,
    pub t: f64,
    /// Per-generator gaps for the multi-parameter sweep.
    pub multi_delta_e: Vec<f64>,
    /// Rates swept; must include only values >= 0.
    pub gammas: Vec<f64>,
}

impl Default for ToyConfig {
    fn default() -> Self {
        Self {
            delta_e: 0.0,
            delta_ell: 1.0,
            t: 1.0,
            multi_delta_e: vec![1.0, 0.0],
            gammas: (0..=300).map(|k| k as f64 * 0.01).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: CircuitKind,
    pub layers: usize,
    pub dataset: DatasetSpec,
    pub noise: ChannelKind,
    pub grid: GridSpec,
    /// Parameter vectors (scan, genbound) or initializations (train); the
    /// command default applies when absent.
    pub seeds: Option<usize>,
    /// Use only the first N training inputs in scan and genbound.
    pub inputs: Option<usize>,
    pub epochs: usize,
    pub out: PathBuf,
    pub delta: f64,
    pub determinant: DeterminantPolicy,
    pub workers: Option<usize>,
    /// Write gnuplot scripts next to the CSVs.
    pub plots: bool,
    pub toy: ToyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            circuit: CircuitKind::Hea,
            layers: 4,
            dataset: DatasetSpec::default(),
            noise: ChannelKind::Depolarizing,
            grid: GridSpec::Sin,
            seeds: None,
            inputs: None,
            epochs: DEFAULT_EPOCHS,
            out: PathBuf::from("out"),
            delta: DEFAULT_DELTA,
            determinant: DeterminantPolicy::default(),
            workers: None,
            plots: true,
            toy: ToyConfig::default(),
        }
    }
}

/// Parameter vectors per input in a spectrum scan.
pub const DEFAULT_SCAN_SEEDS: usize = 5;
/// Initializations per noise level in training.
pub const DEFAULT_TRAIN_SEEDS: usize = 10;

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn scan_seeds(&self) -> usize {
        self.seeds.unwrap_or(DEFAULT_SCAN_SEEDS)
    }

    pub fn train_seeds(&self) -> usize {
        self.seeds.unwrap_or(DEFAULT_TRAIN_SEEDS)
    }

    pub fn bound_seeds(&self) -> usize {
        self.seeds.unwrap_or(DEFAULT_SEEDS_PER_INPUT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_with_defaults() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"layers": 2, "grid": "custom:0,0.01,0.02", "dataset": {"kind": "sinusoidal2", "seed": 7}}"#,
        )
        .unwrap();
        assert_eq!(cfg.layers, 2);
        assert_eq!(cfg.grid.levels(), vec![0.0, 0.01, 0.02]);
        assert_eq!(cfg.dataset, DatasetSpec::Sinusoidal2 { seed: 7 });
        assert_eq!(cfg.epochs, DEFAULT_EPOCHS);
        assert_eq!(cfg.scan_seeds(), 5);
        assert!(serde_json::from_str::<RunConfig>(r#"{"layer": 2}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"grid": "custom:0.2,0.1"}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let cfg = RunConfig::default();
        let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
