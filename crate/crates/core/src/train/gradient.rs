use serde::{Deserialize, Serialize};

use crate::circuits::{CircuitSpec, DensityEngine, NoiseSetting, StateEngine};
use crate::error::{Error, Result};

/// How dL/d theta is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// +-pi/2 shifts per gate occurrence.
    ParameterShift,
    /// One forward and one backward pass per sample.
    #[default]
    Adjoint,
}

/// Which simulator backs noiseless evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Statevector when noiseless, density matrix otherwise.
    #[default]
    Auto,
    Density,
}

pub fn mse(preds: &[f64], labels: &[f64]) -> Result<f64> {
    if preds.is_empty() {
        return Err(Error::InvalidArgument("mse of empty input".into()));
    }
    if preds.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            actual: preds.len(),
        });
    }
    Ok(preds.iter().zip(labels).map(|(f, y)| (f - y).powi(2)).sum::<f64>() / preds.len() as f64)
}

/// f(x, theta) and its parameter gradient.
pub fn model_gradient(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    method: GradientMethod,
    engine: Engine,
) -> Result<(f64, Vec<f64>)> {
    spec.check_inputs(x, theta)?;
    if noise.is_noiseless() && engine == Engine::Auto && method == GradientMethod::Adjoint {
        return Ok(StateEngine::new(spec, x)?.adjoint_gradient(theta));
    }
    let dm = DensityEngine::new(spec, x, noise)?;
    Ok(match method {
        GradientMethod::Adjoint => dm.adjoint_gradient(theta),
        GradientMethod::ParameterShift => dm.parameter_shift_gradient(theta),
    })
}

/// Model outputs over a batch of inputs.
pub fn predict(
    spec: &CircuitSpec,
    xs: &[Vec<f64>],
    theta: &[f64],
    noise: &NoiseSetting,
    engine: Engine,
) -> Result<Vec<f64>> {
    xs.iter()
        .map(|x| {
            spec.check_inputs(x, theta)?;
            if noise.is_noiseless() && engine == Engine::Auto {
                let se = StateEngine::new(spec, x)?;
                Ok(se.expectation(&se.run(theta)))
            } else {
                let dm = DensityEngine::new(spec, x, noise)?;
                Ok(dm.expectation(&dm.run(theta)))
            }
        })
        .collect()
}

/// Full-batch MSE loss and its gradient, chaining dL/df = 2(f - y)/M.
pub fn grad_loss(
    spec: &CircuitSpec,
    xs: &[Vec<f64>],
    ys: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    method: GradientMethod,
    engine: Engine,
) -> Result<(f64, Vec<f64>)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: ys.len(),
            actual: xs.len(),
        });
    }
    let m = xs.len() as f64;
    let mut grad = vec![0.0; spec.n_params()];
    let mut loss = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let (f, g) = model_gradient(spec, x, theta, noise, method, engine)?;
        loss += (f - y).powi(2) / m;
        let w = 2.0 * (f - y) / m;
        for (acc, gi) in grad.iter_mut().zip(g) {
            *acc += w * gi;
        }
    }
    Ok((loss, grad))
}
