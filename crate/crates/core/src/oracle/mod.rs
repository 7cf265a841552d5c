//! Independent ground truth: closed-form dephasing toys, a Bures-Hessian
//! QFIM, and a naive full-Kronecker evaluator.

pub mod bures;
pub mod reference;
pub mod toy;

pub use bures::{bures_hessian_qfim, BURES_STEP};
pub use reference::{bloch_qfi, bloch_vector, reference_state, rx_bloch_qfi};
pub use toy::{
    toy_gamma_star, toy_multi_eigvals, toy_single_qfi, GammaStar, MultiEigvals, ToyMultiParams,
    ToyParams,
};
