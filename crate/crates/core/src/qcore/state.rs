use num_complex::Complex64;

use super::eig::hermitian_eig;
use super::matrix::{pauli, ComplexMatrix, ONE, ZERO};
use super::Tolerances;
use crate::error::{Error, Result};

/// Normalized state vector on `n_qubits`; qubit 0 is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::new_with_tol(amplitudes, Tolerances::default().state_norm)
    }

    pub fn new_with_tol(amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > tol {
            return Err(Error::NormDrift {
                drift: (norm - 1.0).abs(),
            });
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero vector cannot be normalized".into()));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self::new(amplitudes)
    }

    pub(crate) fn from_raw(n_qubits: usize, amplitudes: Vec<Complex64>) -> Self {
        Self {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
        }
    }

    pub fn expectation(&self, obs: &Observable) -> Result<f64> {
        if obs.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: obs.n_qubits,
            });
        }
        let ov = obs.matrix.mat_vec(&self.amplitudes);
        let value: Complex64 = self
            .amplitudes
            .iter()
            .zip(&ov)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(value.re)
    }
}

/// Hermitian, unit-trace, PSD matrix on `n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant, including PSD via an eigendecomposition.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with_tol(matrix, &Tolerances::default())
    }

    pub fn new_with_tol(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(matrix)?;
        rho.validate(tol)?;
        Ok(rho)
    }

    /// Only checks that the matrix is square with a power-of-two dimension.
    pub fn from_matrix_unchecked(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let n_qubits = qubits_for_dim(matrix.rows())?;
        Ok(Self { n_qubits, matrix })
    }

    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        let deviation = self.matrix.hermiticity_deviation();
        if deviation > tol.hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = self.matrix.trace();
        if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
            return Err(Error::InvalidTrace { trace: trace.re });
        }
        let min = self.min_eigenvalue()?;
        if min < -tol.psd_slack {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    /// (|0><0|)^{(x)n}.
    pub fn zero(n_qubits: usize) -> Self {
        PureState::zero(n_qubits).to_density()
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        Self {
            n_qubits,
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub(crate) fn matrix_mut(&mut self) -> &mut ComplexMatrix {
        &mut self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Tr[rho^2].
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eig = hermitian_eig(&self.matrix)?;
        Ok(eig.eigenvalues[0])
    }
}

/// Hermitian operator on `n_qubits`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl Observable {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let deviation = matrix.hermiticity_deviation();
        if deviation > Tolerances::default().hermitian {
            return Err(Error::NotHermitian { deviation });
        }
        let n_qubits = qubits_for_dim(matrix.rows())?;
        Ok(Self { n_qubits, matrix })
    }

    /// Pauli Z on one qubit, identity elsewhere.
    pub fn z_on(n_qubits: usize, qubit: usize) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n_qubits,
            });
        }
        let factors: Vec<ComplexMatrix> = (0..n_qubits)
            .map(|q| if q == qubit { pauli::z() } else { pauli::id() })
            .collect();
        Self::new(kron_all(&factors))
    }

    /// Z on every qubit.
    pub fn z_all(n_qubits: usize) -> Self {
        let factors: Vec<ComplexMatrix> = (0..n_qubits).map(|_| pauli::z()).collect();
        Self::new(kron_all(&factors)).expect("Z string is Hermitian")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Operator norm (largest |eigenvalue|).
    pub fn operator_norm(&self) -> f64 {
        hermitian_eig(&self.matrix)
            .map(|e| e.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs())))
            .unwrap_or(f64::NAN)
    }
}

pub(crate) fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| acc.kron(f))
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Re Tr[O rho]; rejects a non-negligible imaginary part.
pub fn expectation(rho: &DensityMatrix, obs: &Observable) -> Result<f64> {
    if rho.n_qubits != obs.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: rho.n_qubits,
            actual: obs.n_qubits,
        });
    }
    let value = obs.matrix.trace_product(&rho.matrix);
    if value.im.abs() > Tolerances::default().expectation_imag {
        return Err(Error::ComplexExpectation { imag: value.im });
    }
    Ok(value.re)
}
