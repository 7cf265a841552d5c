//! Noise-dependent term of the covering-number generalization bound.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::circuits::{CircuitSpec, NoiseSetting};
use crate::error::{Error, Result};
use crate::noise::ChannelKind;
use crate::qfim::{
    circuit_qfim, default_rank_tol, effective_dimension, log_determinant, DerivativeMethod,
    QfimResult,
};
use crate::train::{init_params, model_gradient, Engine, GradientMethod, SCAN_STREAM};

pub const DEFAULT_DELTA: f64 = 0.1;
/// Parameter vectors drawn per training input.
pub const DEFAULT_SEEDS_PER_INPUT: usize = 5;

/// Smallest log det F whose determinant is still a normal double.
pub fn log_det_floor() -> f64 {
    f64::MIN_POSITIVE.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotComputable {
    ZeroEffectiveDimension,
    /// Some sampled determinant is zero or below the smallest normal double.
    DeterminantUnderflow,
}

impl std::fmt::Display for NotComputable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::ZeroEffectiveDimension => "effective dimension is zero",
            Self::DeterminantUnderflow => "QFIM determinant underflows",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub d_eff: usize,
    /// log m with m = min over samples of sqrt(det F); `None` when some
    /// sample underflowed.
    pub log_m: Option<f64>,
    pub l_f: f64,
    /// Training-set size.
    pub m_train: usize,
    pub delta: f64,
}

/// sqrt(d) * exp((ln Gamma(d/2 + 1) - log m) / d) * L_f, in log space.
pub fn bound_term_b(inputs: &BoundInputs) -> std::result::Result<f64, NotComputable> {
    if inputs.d_eff == 0 {
        return Err(NotComputable::ZeroEffectiveDimension);
    }
    let log_m = match inputs.log_m {
        Some(v) if v.is_finite() => v,
        _ => return Err(NotComputable::DeterminantUnderflow),
    };
    if inputs.l_f == 0.0 {
        return Ok(0.0);
    }
    let d = inputs.d_eff as f64;
    let log_b = 0.5 * d.ln() + (ln_gamma(d / 2.0 + 1.0) - log_m) / d + inputs.l_f.ln();
    Ok(log_b.exp())
}

/// (24 pi / sqrt(M)) B + 3 sqrt(ln(2/delta) / (2M)).
///
/// The outer error covers invalid M or delta; the inner one a bound that is
/// not computable.
pub fn full_bound(inputs: &BoundInputs) -> Result<std::result::Result<f64, NotComputable>> {
    if inputs.m_train == 0 {
        return Err(Error::InvalidArgument("training-set size must be positive".into()));
    }
    if !(inputs.delta > 0.0 && inputs.delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence delta = {} outside (0, 1)",
            inputs.delta
        )));
    }
    let m = inputs.m_train as f64;
    Ok(bound_term_b(inputs)
        .map(|b| 24.0 * PI / m.sqrt() * b + 3.0 * ((2.0 / inputs.delta).ln() / (2.0 * m)).sqrt()))
}

/// Max over (input, seed) of the Euclidean norm of grad_theta f(x, theta).
pub fn estimate_lipschitz(
    spec: &CircuitSpec,
    inputs: &[Vec<f64>],
    seeds: &[u64],
    noise: &NoiseSetting,
    method: GradientMethod,
) -> Result<f64> {
    if inputs.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidArgument("need at least one (input, seed) pair".into()));
    }
    let mut l_f: f64 = 0.0;
    for &seed in seeds {
        let theta = init_params(spec.n_params(), seed, SCAN_STREAM);
        for x in inputs {
            l_f = l_f.max(gradient_norm(spec, x, &theta, noise, method)?);
        }
    }
    Ok(l_f)
}

fn gradient_norm(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    method: GradientMethod,
) -> Result<f64> {
    let (_, g) = model_gradient(spec, x, theta, noise, method, Engine::Auto)?;
    Ok(g.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Which eigenvalues enter det F.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterminantPolicy {
    /// Product over the eigenvalues above the rank tolerance, i.e. the
    /// volume along the d_eff directions that also set the exponent.
    #[default]
    Effective,
    /// Product over all P eigenvalues; any eigenvalue at or below the rank
    /// tolerance makes the cell not computable.
    Full,
}

/// log det F under `policy`, or `None` when it underflows.
pub fn policy_log_det(q: &QfimResult, policy: DeterminantPolicy) -> Option<f64> {
    let value = match policy {
        DeterminantPolicy::Effective => {
            let tol = default_rank_tol(q);
            let kept: Vec<f64> = q.eigenvalues.iter().copied().filter(|&l| l > tol).collect();
            if kept.is_empty() {
                return None;
            }
            kept.iter().map(|l| l.ln()).sum::<f64>()
        }
        DeterminantPolicy::Full => {
            let ld = log_determinant(q, None);
            if ld.is_effectively_zero {
                return None;
            }
            ld.value
        }
    };
    (value >= log_det_floor()).then_some(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundOptions {
    pub delta: f64,
    pub policy: DeterminantPolicy,
    pub gradient: GradientMethod,
    pub derivative: DerivativeMethod,
}

impl Default for BoundOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            policy: DeterminantPolicy::default(),
            gradient: GradientMethod::ParameterShift,
            derivative: DerivativeMethod::default(),
        }
    }
}

/// What one (input, seed, p) evaluation contributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSample {
    pub input_id: usize,
    pub seed_id: usize,
    /// Ascending QFIM spectrum.
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
    pub log_det: Option<f64>,
    pub grad_norm: f64,
}

pub fn bound_sample(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    ids: (usize, usize),
    options: &BoundOptions,
) -> Result<BoundSample> {
    let q = circuit_qfim(spec, x, theta, noise, &options.derivative)?;
    Ok(BoundSample {
        input_id: ids.0,
        seed_id: ids.1,
        rank: effective_dimension(&q, None),
        log_det: policy_log_det(&q, options.policy),
        grad_norm: gradient_norm(spec, x, theta, noise, options.gradient)?,
        eigenvalues: q.eigenvalues,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub p: f64,
    pub d_eff_mean: f64,
    /// `d_eff_mean` rounded half away from zero.
    pub d_eff: usize,
    pub log_m: Option<f64>,
    pub l_f: f64,
    pub b: Option<f64>,
    pub full_bound: Option<f64>,
    pub not_computable: Option<NotComputable>,
}

impl BoundRow {
    pub fn is_computable(&self) -> bool {
        self.b.is_some()
    }
}

/// Aggregates the samples of one noise level.
pub fn bound_row(p: f64, samples: &[BoundSample], m_train: usize, delta: f64) -> Result<BoundRow> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument(format!("no samples at p = {p}")));
    }
    let d_eff_mean = samples.iter().map(|s| s.rank as f64).sum::<f64>() / samples.len() as f64;
    let d_eff = d_eff_mean.round() as usize;
    let log_m = samples
        .iter()
        .map(|s| s.log_det.map(|v| 0.5 * v))
        .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)));
    let l_f = samples.iter().map(|s| s.grad_norm).fold(0.0, f64::max);
    let inputs = BoundInputs {
        d_eff,
        log_m,
        l_f,
        m_train,
        delta,
    };
    let full = full_bound(&inputs)?;
    Ok(BoundRow {
        p,
        d_eff_mean,
        d_eff,
        log_m,
        l_f,
        b: bound_term_b(&inputs).ok(),
        full_bound: full.ok(),
        not_computable: full.err(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundStatus {
    Ok,
    NotComputableAnywhere,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundScan {
    pub rows: Vec<BoundRow>,
    pub argmin_p: Option<f64>,
    pub argmin_is_interior: bool,
    pub status: BoundStatus,
    pub options: BoundOptions,
}

/// Argmin of B over computable rows (ties to the smaller p).
pub fn summarize_bound(rows: Vec<BoundRow>, options: BoundOptions) -> BoundScan {
    let mut best: Option<usize> = None;
    for (i, row) in rows.iter().enumerate() {
        if let Some(b) = row.b {
            if best.is_none_or(|j| b < rows[j].b.unwrap()) {
                best = Some(i);
            }
        }
    }
    BoundScan {
        argmin_p: best.map(|i| rows[i].p),
        argmin_is_interior: best.is_some_and(|i| i > 0 && i + 1 < rows.len()),
        status: if best.is_some() {
            BoundStatus::Ok
        } else {
            BoundStatus::NotComputableAnywhere
        },
        rows,
        options,
    }
}

/// B(p) over `grid`, sampling every (input, seed) pair at every level.
pub fn scan_bound(
    spec: &CircuitSpec,
    inputs: &[Vec<f64>],
    seeds: &[u64],
    grid: &[f64],
    kind: ChannelKind,
    m_train: usize,
    options: &BoundOptions,
) -> Result<BoundScan> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty noise grid".into()));
    }
    if inputs.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidArgument("need at least one (input, seed) pair".into()));
    }
    let thetas: Vec<Vec<f64>> = seeds
        .iter()
        .map(|&s| init_params(spec.n_params(), s, SCAN_STREAM))
        .collect();
    let rows = grid
        .par_iter()
        .map(|&p| {
            let noise = NoiseSetting::new(kind, p);
            let mut samples = Vec::with_capacity(inputs.len() * seeds.len());
            for (i, x) in inputs.iter().enumerate() {
                for (j, theta) in thetas.iter().enumerate() {
                    samples.push(bound_sample(spec, x, theta, &noise, (i, j), options)?);
                }
            }
            bound_row(p, &samples, m_train, options.delta)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_bound(rows, *options))
}
