//! Two-level system under a Hamiltonian and a commuting dephasing jump
//! operator, prepared in |+>. The QFI is known in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToyParams {
    /// Energy gap of the generator.
    pub delta_e: f64,
    /// Gap of the jump operator.
    pub delta_ell: f64,
    pub gamma: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToyMultiParams {
    /// Per-generator gaps.
    pub delta_e: Vec<f64>,
    pub delta_ell: f64,
    pub gamma: f64,
    /// Total time, the sum of the per-generator times.
    pub t: f64,
}

fn check_rate_time(gamma: f64, t: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("time must be positive, got {t}")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidArgument(format!("rate must be non-negative, got {gamma}")));
    }
    Ok(())
}

/// Gamma(t) = gamma t dl^2 / 2 and its time derivative.
fn decay(gamma: f64, delta_ell: f64, t: f64) -> (f64, f64) {
    let rate = 0.5 * gamma * delta_ell * delta_ell;
    (rate * t, rate)
}

/// Gamma'^2 / (1 - e^{-2 Gamma}), zero in the noiseless limit.
fn dephasing_weight(big_gamma: f64, rate: f64) -> f64 {
    if big_gamma == 0.0 {
        0.0
    } else {
        rate * rate / -(-2.0 * big_gamma).exp_m1()
    }
}

/// F(t) = (Gamma'^2 / (1 - e^{-2 Gamma}) + dE^2) e^{-2 Gamma}.
pub fn toy_single_qfi(params: &ToyParams) -> Result<f64> {
    check_rate_time(params.gamma, params.t)?;
    let (g, rate) = decay(params.gamma, params.delta_ell, params.t);
    let de2 = params.delta_e * params.delta_e;
    Ok((dephasing_weight(g, rate) + de2) * (-2.0 * g).exp())
}

/// Stationary point of the small-rate parabola.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum GammaStar {
    Achievable(f64),
    /// The formula gives a value <= 0.
    NotAchievable(f64),
}

impl GammaStar {
    pub fn value(self) -> f64 {
        match self {
            GammaStar::Achievable(v) | GammaStar::NotAchievable(v) => v,
        }
    }

    pub fn achievable(self) -> Option<f64> {
        match self {
            GammaStar::Achievable(v) => Some(v),
            GammaStar::NotAchievable(_) => None,
        }
    }
}

/// gamma* = (1 - 4 dE^2 t^2) / (2 dl^2 t).
pub fn toy_gamma_star(delta_e: f64, delta_ell: f64, t: f64) -> Result<GammaStar> {
    if delta_ell == 0.0 {
        return Err(Error::InvalidArgument("jump-operator gap must be nonzero".into()));
    }
    check_rate_time(0.0, t)?;
    let v = (1.0 - 4.0 * delta_e * delta_e * t * t) / (2.0 * delta_ell * delta_ell * t);
    Ok(if v > 0.0 {
        GammaStar::Achievable(v)
    } else {
        GammaStar::NotAchievable(v)
    })
}

/// The two nonzero QFIM eigenvalues of the multi-generator toy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiEigvals {
    /// First order in the rate.
    pub approx: (f64, f64),
    /// Roots of lambda^2 - T lambda + D for F_ij = (dE_i dE_j + alpha) e^{-2 Gamma}.
    pub exact: (f64, f64),
}

pub fn toy_multi_eigvals(params: &ToyMultiParams) -> Result<MultiEigvals> {
    check_rate_time(params.gamma, params.t)?;
    let de = &params.delta_e;
    let a: f64 = de.iter().map(|v| v * v).sum();
    if de.is_empty() || a == 0.0 {
        return Err(Error::InvalidArgument(
            "energy gaps are all zero; the noiseless QFIM vanishes".into(),
        ));
    }
    let b: f64 = de.iter().sum();
    let c = de.len() as f64;
    // a c - b^2 as a sum of squares, exactly zero for equal gaps
    let mut spread = 0.0;
    for i in 0..de.len() {
        for j in i + 1..de.len() {
            spread += (de[i] - de[j]).powi(2);
        }
    }

    let (t, gamma, dl2) = (params.t, params.gamma, params.delta_ell * params.delta_ell);
    let alpha = gamma * dl2 / (4.0 * t);
    let approx = ((1.0 - gamma * t * dl2) * a + alpha * b * b / a, alpha * spread / a);

    let (g, rate) = decay(gamma, params.delta_ell, t);
    let alpha_e = dephasing_weight(g, rate);
    let damp = (-2.0 * g).exp();
    let tr = damp * (a + alpha_e * c);
    let det = damp * damp * alpha_e * spread;
    let plus = 0.5 * (tr + (tr * tr - 4.0 * det).max(0.0).sqrt());
    let minus = if plus > 0.0 { det / plus } else { 0.0 };
    Ok(MultiEigvals {
        approx,
        exact: (plus, minus),
    })
}
