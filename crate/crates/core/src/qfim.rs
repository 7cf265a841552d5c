//! Quantum Fisher information matrices of circuit states, their spectra,
//! effective dimension and log-determinant.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuits::{CircuitSpec, DensityEngine, NoiseSetting, StateEngine};
use crate::error::{Error, Result};
use crate::qcore::{hermitian_eig, symmetric_eigenvalues, ComplexMatrix, DensityMatrix, PureState};

pub const DEFAULT_STEP: f64 = 1e-4;
pub const MIN_STEP: f64 = 1e-7;
pub const MAX_STEP: f64 = 1e-2;
/// Pairs with lambda_k + lambda_l at or below this contribute nothing.
pub const DEFAULT_EIG_CUTOFF: f64 = 1e-10;
/// Eigenvalues are clipped here before taking logs.
pub const LOG_CLIP: f64 = 1e-300;
const PURE_NORM_TOL: f64 = 1e-8;

/// Central-difference step policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeStencil {
    h: f64,
}

impl DerivativeStencil {
    pub fn new(h: f64) -> Result<Self> {
        if !(MIN_STEP..=MAX_STEP).contains(&h) {
            return Err(Error::StepOutOfRange { step: h });
        }
        Ok(Self { h })
    }

    pub fn step(&self) -> f64 {
        self.h
    }
}

impl Default for DerivativeStencil {
    fn default() -> Self {
        Self { h: DEFAULT_STEP }
    }
}

/// How d rho / d theta is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMethod {
    Central(DerivativeStencil),
    /// Tangent propagation through the channel sequence; exact up to round-off.
    Tangent,
}

impl Default for DerivativeMethod {
    fn default() -> Self {
        DerivativeMethod::Central(DerivativeStencil::default())
    }
}

/// Where a QFIM was evaluated.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct QfimContext {
    pub x: Vec<f64>,
    pub seed_id: Option<usize>,
    pub p: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QfimResult {
    pub matrix: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub context: QfimContext,
}

impl QfimResult {
    /// Symmetrizes `matrix` and computes its spectrum.
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        let eigenvalues = symmetric_eigenvalues(&matrix);
        Ok(Self {
            matrix,
            eigenvalues,
            context: QfimContext::default(),
        })
    }

    pub fn with_context(mut self, context: QfimContext) -> Self {
        self.context = context;
        self
    }

    pub fn n_params(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Descending copy of the spectrum.
    pub fn descending(&self) -> Vec<f64> {
        self.eigenvalues.iter().rev().copied().collect()
    }
}

/// d rho / d theta_i by central differences, restarting each shifted run from
/// the first gate the parameter drives.
pub fn state_derivatives(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    stencil: &DerivativeStencil,
) -> Result<Vec<ComplexMatrix>> {
    state_and_derivatives(spec, x, theta, noise, &DerivativeMethod::Central(*stencil)).map(|r| r.1)
}

/// rho(theta) together with its P derivatives.
pub fn state_and_derivatives(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    method: &DerivativeMethod,
) -> Result<(DensityMatrix, Vec<ComplexMatrix>)> {
    spec.check_inputs(x, theta)?;
    let engine = DensityEngine::new(spec, x, noise)?;
    let dim = 1usize << spec.n_qubits();
    let (rho, derivs) = match method {
        DerivativeMethod::Tangent => engine.state_and_tangents(theta),
        DerivativeMethod::Central(stencil) => {
            let h = stencil.step();
            let cps = engine.checkpoints(theta);
            let first: Vec<Option<usize>> = spec
                .param_occurrences()
                .iter()
                .map(|occ| occ.first().copied())
                .collect();
            let mut derivs = Vec::with_capacity(spec.n_params());
            let mut shifted = theta.to_vec();
            for (i, start) in first.into_iter().enumerate() {
                let Some(start) = start else {
                    derivs.push(ComplexMatrix::zeros(dim, dim));
                    continue;
                };
                shifted[i] = theta[i] + h;
                let plus = engine.run_from(start, cps[start].clone(), &shifted, None);
                shifted[i] = theta[i] - h;
                let minus = engine.run_from(start, cps[start].clone(), &shifted, None);
                shifted[i] = theta[i];
                derivs.push((&plus - &minus).scale_real(0.5 / h));
            }
            (cps.into_iter().last().expect("final state"), derivs)
        }
    };
    Ok((DensityMatrix::from_matrix_unchecked(rho)?, derivs))
}

/// F_ij = 4 Re{<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>}.
pub fn qfim_pure(psi: &PureState, dpsi: &[Vec<Complex64>]) -> Result<QfimResult> {
    let amps = psi.amplitudes();
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > PURE_NORM_TOL {
        return Err(Error::NormDrift {
            drift: (norm - 1.0).abs(),
        });
    }
    for d in dpsi {
        if d.len() != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: amps.len(),
                actual: d.len(),
            });
        }
    }
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    };
    let overlaps: Vec<Complex64> = dpsi.iter().map(|d| dot(d, amps)).collect();
    let p = dpsi.len();
    let mut f = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v = 4.0 * (dot(&dpsi[i], &dpsi[j]) - overlaps[i] * overlaps[j].conj()).re;
            f[(i, j)] = v;
            f[(j, i)] = v;
        }
    }
    QfimResult::from_matrix(f)
}

/// Mixed-state QFIM in the eigenbasis of rho:
/// F_ij = 2 sum_{k,l} Re(<k|d_i rho|l><l|d_j rho|k>) / (lambda_k + lambda_l)
/// over pairs with lambda_k + lambda_l > `eig_cutoff`.
pub fn qfim_mixed(rho: &DensityMatrix, drho: &[ComplexMatrix], eig_cutoff: f64) -> Result<QfimResult> {
    if !(eig_cutoff > 0.0) {
        return Err(Error::InvalidCutoff(eig_cutoff));
    }
    let dim = rho.dim();
    for d in drho {
        if d.rows() != dim || d.cols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: d.rows(),
            });
        }
    }
    let eig = hermitian_eig(rho.matrix())?;
    let v = &eig.eigenvectors;
    let vh = v.adjoint();
    let lam = &eig.eigenvalues;
    let weights: Vec<f64> = (0..dim * dim)
        .map(|kl| {
            let s = lam[kl / dim] + lam[kl % dim];
            if s > eig_cutoff {
                (2.0 / s).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    // Row i holds sqrt(2/(lk+ll)) <k|d_i rho|l> split into real and imaginary parts.
    let p = drho.len();
    let mut re = DMatrix::<f64>::zeros(p, dim * dim);
    let mut im = DMatrix::<f64>::zeros(p, dim * dim);
    for (i, d) in drho.iter().enumerate() {
        let w = vh.matmul(&d.hermitian_part()).matmul(v);
        for (kl, (z, s)) in w.as_slice().iter().zip(&weights).enumerate() {
            re[(i, kl)] = z.re * s;
            im[(i, kl)] = z.im * s;
        }
    }
    // Re(W_kl W_lk) = Re(W_kl conj(W_kl)) for Hermitian W
    let f = &re * re.transpose() + &im * im.transpose();
    QfimResult::from_matrix(f)
}

/// QFIM of the circuit state at (x, theta) under `noise`.
///
/// Noiseless circuits go through the statevector engine with exact
/// derivatives; noisy ones through `qfim_mixed` with the given method.
pub fn circuit_qfim(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    method: &DerivativeMethod,
) -> Result<QfimResult> {
    let context = QfimContext {
        x: x.to_vec(),
        seed_id: None,
        p: noise.p,
        label: spec.label().to_string(),
    };
    let q = if noise.is_noiseless() {
        circuit_qfim_pure(spec, x, theta)?
    } else {
        let (rho, d) = state_and_derivatives(spec, x, theta, noise, method)?;
        qfim_mixed(&rho, &d, DEFAULT_EIG_CUTOFF)?
    };
    Ok(q.with_context(context))
}

/// Noiseless QFIM from exact statevector derivatives.
pub fn circuit_qfim_pure(spec: &CircuitSpec, x: &[f64], theta: &[f64]) -> Result<QfimResult> {
    spec.check_inputs(x, theta)?;
    let engine = StateEngine::new(spec, x)?;
    let (psi, d) = engine.state_and_derivatives(theta);
    qfim_pure(&PureState::new_with_tol(psi, PURE_NORM_TOL)?, &d)
}

/// Machine epsilon times P times the largest eigenvalue.
pub fn default_rank_tol(q: &QfimResult) -> f64 {
    f64::EPSILON * q.n_params() as f64 * q.max_eigenvalue().max(0.0)
}

/// Number of eigenvalues above `tol` (default: [`default_rank_tol`]).
pub fn effective_dimension(q: &QfimResult, tol: Option<f64>) -> usize {
    let tol = tol.unwrap_or_else(|| default_rank_tol(q));
    q.eigenvalues.iter().filter(|&&l| l > tol).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogDet {
    /// Natural log of the product of eigenvalues clipped at `LOG_CLIP`.
    pub value: f64,
    /// Some eigenvalue is at or below the guard.
    pub is_effectively_zero: bool,
}

/// log det F with eigenvalues clipped at 1e-300. The flag is raised when any
/// eigenvalue is at or below `guard` (default: the rank tolerance).
pub fn log_determinant(q: &QfimResult, guard: Option<f64>) -> LogDet {
    let guard = guard.unwrap_or_else(|| default_rank_tol(q)).max(LOG_CLIP);
    LogDet {
        value: q.eigenvalues.iter().map(|&l| l.max(LOG_CLIP).ln()).sum(),
        is_effectively_zero: q.eigenvalues.iter().any(|&l| l <= guard),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_hea, AngleSource, Gate, GateKind};
    use crate::noise::ChannelKind;
    use crate::qcore::Observable;

    fn single(kind: GateKind) -> CircuitSpec {
        CircuitSpec::new(
            1,
            vec![Gate::rotation(kind, 0, AngleSource::Trainable { param: 0 })],
            1,
            0,
            Observable::z_on(1, 0).unwrap(),
            "single",
        )
        .unwrap()
    }

    fn diag(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(v))
    }

    #[test]
    fn stencil_bounds() {
        assert!(DerivativeStencil::new(1e-8).is_err());
        assert!(DerivativeStencil::new(0.1).is_err());
        assert_eq!(DerivativeStencil::default().step(), 1e-4);
    }

    #[test]
    fn rx_derivative_norm() {
        let spec = single(GateKind::RX);
        let d = state_derivatives(&spec, &[], &[0.0], &NoiseSetting::none(), &Default::default())
            .unwrap();
        assert!((d[0].frobenius_norm() - 0.5f64.sqrt()).abs() < 1e-8);
        assert!(d[0].trace().norm() < 1e-9);
        assert!(d[0].hermiticity_deviation() < 1e-9);
    }

    #[test]
    fn single_qubit_pure_values() {
        let q = circuit_qfim_pure(&single(GateKind::RX), &[], &[0.3]).unwrap();
        assert!((q.matrix[(0, 0)] - 1.0).abs() < 1e-12);
        let q = circuit_qfim_pure(&single(GateKind::RZ), &[], &[0.3]).unwrap();
        assert!(q.matrix[(0, 0)].abs() < 1e-12);
    }

    #[test]
    fn rank_and_log_det() {
        let q = QfimResult::from_matrix(diag(&[1.0, 0.0, 0.0])).unwrap();
        assert_eq!(effective_dimension(&q, None), 1);
        assert!(log_determinant(&q, None).is_effectively_zero);
        let q = QfimResult::from_matrix(diag(&[0.5, 2.0])).unwrap();
        let ld = log_determinant(&q, None);
        assert!(ld.value.abs() < 1e-15 && !ld.is_effectively_zero);
    }

    #[test]
    fn tangent_matches_central() {
        let spec = build_hea(1).unwrap();
        let theta: Vec<f64> = (0..15).map(|i| 0.41 * i as f64).collect();
        let noise = NoiseSetting::new(ChannelKind::AmplitudeDamping, 0.02);
        let (_, a) =
            state_and_derivatives(&spec, &[0.2], &theta, &noise, &DerivativeMethod::Tangent)
                .unwrap();
        let (_, b) =
            state_and_derivatives(&spec, &[0.2], &theta, &noise, &DerivativeMethod::default())
                .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(x.max_abs_diff(y) < 1e-8);
        }
    }

    #[test]
    fn rejects_bad_cutoff() {
        let rho = DensityMatrix::zero(1);
        assert!(qfim_mixed(&rho, &[], 0.0).is_err());
    }
}
