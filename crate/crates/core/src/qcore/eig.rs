//! Hermitian eigendecomposition.
//!
//! The dense solver is nalgebra's tridiagonal QR (`SymmetricEigen`), which
//! handles complex Hermitian input directly. Eigenpairs are re-sorted so that
//! eigenvalues come out ascending.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::Tolerances;
use crate::error::{Error, Result};

/// Ascending eigenvalues with eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// V diag(f(lambda)) V^dagger.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, w) in weights.iter().enumerate() {
                if *w != 0.0 {
                    acc += v[(r, k)] * v[(c, k)].conj() * *w;
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    /// Column `k` as a vector.
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..self.eigenvectors.rows())
            .map(|r| self.eigenvectors[(r, k)])
            .collect()
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    hermitian_eig_with_tol(m, Tolerances::default().eig_hermitian)
}

pub fn hermitian_eig_with_tol(m: &ComplexMatrix, tol: f64) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let deviation = m.hermiticity_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows();
    let eig = SymmetricEigen::new(m.hermitian_part().to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues of a real symmetric matrix (symmetrized first).
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = (m + m.transpose()) * 0.5;
    let mut values: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Principal square root of a PSD matrix; eigenvalues below zero are clipped.
pub fn sqrt_psd(m: &ComplexMatrix, psd_slack: f64) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    let min = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if min < -psd_slack {
        return Err(Error::NotPositive {
            min_eigenvalue: min,
        });
    }
    Ok(eig.reconstruct_with(|l| l.max(0.0).sqrt()))
}

/// Sum of singular values.
pub fn nuclear_norm(m: &ComplexMatrix) -> f64 {
    m.to_nalgebra().singular_values().iter().sum()
}
