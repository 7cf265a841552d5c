use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use super::gradient::{grad_loss, mse, predict, Engine, GradientMethod};
use super::optim::{adam_step, AdamConfig, AdamState};
use crate::circuits::{CircuitKind, NoiseSetting};
use crate::error::{Error, Result};

/// RNG stream for training initializations.
pub const TRAIN_STREAM: u64 = 2;
/// RNG stream for parameter vectors sampled in spectrum scans.
pub const SCAN_STREAM: u64 = 1;
pub const DEFAULT_EPOCHS: usize = 300;

/// theta ~ U[0, 2 pi)^P from `seed` on the given stream.
pub fn init_params(n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n).map(|_| rng.random_range(0.0..TAU)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub circuit: CircuitKind,
    pub layers: usize,
    pub noise: NoiseSetting,
    pub adam: AdamConfig,
    pub epochs: usize,
    pub seed: u64,
    #[serde(default)]
    pub gradient: GradientMethod,
    #[serde(default)]
    pub engine: Engine,
}

impl TrainConfig {
    pub fn new(circuit: CircuitKind, layers: usize, noise: NoiseSetting, seed: u64) -> Self {
        Self {
            circuit,
            layers,
            noise,
            adam: AdamConfig::default(),
            epochs: DEFAULT_EPOCHS,
            seed,
            gradient: GradientMethod::default(),
            engine: Engine::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    /// Entry e is the MSE before update e; the last entry follows the final update.
    pub train_mse: Vec<f64>,
    pub test_mse: Vec<f64>,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
}

impl TrainHistory {
    pub fn final_train_mse(&self) -> f64 {
        *self.train_mse.last().expect("nonempty history")
    }

    pub fn final_test_mse(&self) -> f64 {
        *self.test_mse.last().expect("nonempty history")
    }
}

/// Full-batch Adam from theta0 ~ U[0, 2 pi); deterministic in (config, dataset).
pub fn train_run(config: &TrainConfig, dataset: &Dataset) -> Result<TrainHistory> {
    config.adam.validate()?;
    config.noise.channel()?;
    let spec = config.circuit.build(config.layers)?;
    if dataset.n_features() != spec.n_features() {
        return Err(Error::DimensionMismatch {
            expected: spec.n_features(),
            actual: dataset.n_features(),
        });
    }
    let (xs, ys) = dataset.train_set();
    let (xt, yt) = dataset.test_set();
    let mut theta = init_params(spec.n_params(), config.seed, TRAIN_STREAM);
    let initial_params = theta.clone();
    let mut state = AdamState::new(theta.len());
    let mut train_mse = Vec::with_capacity(config.epochs + 1);
    let mut test_mse = Vec::with_capacity(config.epochs + 1);
    let test_loss = |theta: &[f64]| -> Result<f64> {
        mse(&predict(&spec, &xt, theta, &config.noise, config.engine)?, &yt)
    };
    for _ in 0..config.epochs {
        let (loss, grad) = grad_loss(
            &spec,
            &xs,
            &ys,
            &theta,
            &config.noise,
            config.gradient,
            config.engine,
        )?;
        train_mse.push(loss);
        test_mse.push(test_loss(&theta)?);
        adam_step(&mut theta, &grad, &mut state, &config.adam);
    }
    train_mse.push(mse(&predict(&spec, &xs, &theta, &config.noise, config.engine)?, &ys)?);
    test_mse.push(test_loss(&theta)?);
    Ok(TrainHistory {
        train_mse,
        test_mse,
        initial_params,
        final_params: theta,
    })
}

/// p*_j = argmin over the grid of the final test MSE of seed j (ties to the
/// smaller level); returns the mean and population standard deviation over j.
///
/// `final_test_mse[j][g]` belongs to seed j and `grid[g]`.
pub fn estimate_p_star_mse(grid: &[f64], final_test_mse: &[Vec<f64>]) -> Result<(f64, f64)> {
    if final_test_mse.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 seeds, got {}",
            final_test_mse.len()
        )));
    }
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let mut argmins = Vec::with_capacity(final_test_mse.len());
    for (j, row) in final_test_mse.iter().enumerate() {
        if row.len() != grid.len() || row.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("missing grid cells for seed {j}")));
        }
        let mut best = 0;
        for (g, v) in row.iter().enumerate() {
            if *v < row[best] {
                best = g;
            }
        }
        argmins.push(grid[best]);
    }
    Ok(crate::nie::mean_std(&argmins))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p_star_mse_examples() {
        let grid = [0.001, 0.002, 0.004];
        let (m, s) =
            estimate_p_star_mse(&grid, &[vec![0.3, 0.1, 0.2], vec![0.5, 0.2, 0.4]]).unwrap();
        assert_eq!((m, s), (0.002, 0.0));
        let (m, _) =
            estimate_p_star_mse(&grid, &[vec![0.1, 0.2, 0.3], vec![0.2, 0.3, 0.4]]).unwrap();
        assert_eq!(m, 0.001);
        assert!(estimate_p_star_mse(&grid, &[vec![0.1, 0.2, 0.3]]).is_err());
        assert!(estimate_p_star_mse(&grid, &[vec![0.1, 0.2], vec![0.1, 0.2, 0.3]]).is_err());
    }

    #[test]
    fn init_streams_are_disjoint() {
        let a = init_params(10, 3, TRAIN_STREAM);
        let b = init_params(10, 3, SCAN_STREAM);
        assert_ne!(a, b);
        assert!(a.iter().all(|v| (0.0..TAU).contains(v)));
    }
}
