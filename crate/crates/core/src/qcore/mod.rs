//! Dense complex linear algebra, quantum states, observables and fidelities.

pub mod eig;
pub mod fidelity;
pub mod kernels;
pub mod matrix;
pub mod state;

pub use eig::{hermitian_eig, symmetric_eigenvalues, EigenDecomposition};
pub use fidelity::{bures_distance, uhlmann_fidelity};
pub use matrix::ComplexMatrix;
pub use state::{expectation, DensityMatrix, Observable, PureState};

/// Numerical tolerances used by validation routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// max |rho - rho^dagger| for states and observables
    pub hermitian: f64,
    /// accepted Hermiticity defect on eigendecomposition input
    pub eig_hermitian: f64,
    pub trace: f64,
    /// most negative eigenvalue still treated as PSD
    pub psd_slack: f64,
    pub state_norm: f64,
    pub expectation_imag: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            eig_hermitian: 1e-10,
            trace: 1e-12,
            psd_slack: 1e-10,
            state_norm: 1e-12,
            expectation_imag: 1e-10,
        }
    }
}
