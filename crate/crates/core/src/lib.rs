//! Noisy parameterized quantum circuits in the density-matrix picture, their
//! quantum Fisher information spectra, and the noise level that best
//! equalizes those spectra.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod circuits;
pub mod error;
pub mod genbound;
pub mod noise;
pub mod oracle;
pub mod qcore;
pub mod nie;
pub mod qfim;
pub mod train;

pub use error::{Error, Result};
