//! Gates, the two built-in QNN architectures and their noisy evaluation.

pub mod gate;
pub mod sim;
pub mod spec;
pub mod statevector;

pub use gate::{AngleSource, Gate, GateKind};
pub use sim::{evaluate, evaluate_f, DensityEngine};
pub use spec::{build_hea, build_ising_qnn, CircuitKind, CircuitSpec, NoiseSetting};
pub use statevector::{evaluate_pure, StateEngine};
