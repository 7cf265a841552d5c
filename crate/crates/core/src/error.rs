use thiserror::Error;

/// Errors raised across the simulation and analysis stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max |m - m^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("trace is not 1 (got {trace})")]
    InvalidTrace { trace: f64 },

    #[error("not positive semi-definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state norm drifted from 1 by {drift:e}")]
    NormDrift { drift: f64 },

    #[error("expectation value has imaginary part {imag:e}")]
    ComplexExpectation { imag: f64 },

    #[error("noise level p = {p} is outside [0, 1]")]
    InvalidNoiseLevel { p: f64 },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("finite-difference step {step:e} outside [1e-7, 1e-2]")]
    StepOutOfRange { step: f64 },

    #[error("eigenvalue cutoff must be positive (got {0})")]
    InvalidCutoff(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("csv error at row {row}, column '{column}': {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("ill-conditioned finite difference: {0}")]
    IllConditioned(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
