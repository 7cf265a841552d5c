//! Local (one- and two-qubit) operator kernels on dense state vectors and
//! density matrices. Qubit 0 is the most significant bit of a basis index.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};

/// Linear map on a 2x2 block, acting on the row-major vector (b00, b01, b10, b11).
pub type Superop1 = [[Complex64; 4]; 4];
pub type Mat2 = [[Complex64; 2]; 2];
pub type Mat4 = [[Complex64; 4]; 4];

pub fn mat2_from(m: &ComplexMatrix) -> Mat2 {
    assert_eq!((m.rows(), m.cols()), (2, 2));
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn mat4_from(m: &ComplexMatrix) -> Mat4 {
    assert_eq!((m.rows(), m.cols()), (4, 4));
    let mut out = [[ZERO; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = m[(r, c)];
        }
    }
    out
}

/// Superoperator of B -> sum_k K B K^dagger.
pub fn superop_from_kraus(ops: &[Mat2]) -> Superop1 {
    let mut s = [[ZERO; 4]; 4];
    for k in ops {
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        s[2 * a + b][2 * c + d] += k[a][c] * k[b][d].conj();
                    }
                }
            }
        }
    }
    s
}

/// Superoperator of the Heisenberg-picture map B -> sum_k K^dagger B K.
pub fn adjoint_superop_from_kraus(ops: &[Mat2]) -> Superop1 {
    let daggers: Vec<Mat2> = ops.iter().map(dagger2).collect();
    superop_from_kraus(&daggers)
}

pub fn dagger2(m: &Mat2) -> Mat2 {
    [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]]
}

pub fn dagger4(m: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = m[c][r].conj();
        }
    }
    out
}

/// `outer` applied after `inner`.
pub fn compose(outer: &Superop1, inner: &Superop1) -> Superop1 {
    let mut out = [[ZERO; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = (0..4).map(|k| outer[r][k] * inner[k][c]).sum();
        }
    }
    out
}

#[inline]
fn stride(n_qubits: usize, qubit: usize) -> usize {
    1 << (n_qubits - 1 - qubit)
}

/// Applies a single-qubit superoperator to `rho` in place.
pub fn apply_superop_1q(rho: &mut ComplexMatrix, n_qubits: usize, qubit: usize, s: &Superop1) {
    let d = rho.rows();
    let st = stride(n_qubits, qubit);
    let data = rho.as_mut_slice();
    for r0 in (0..d).filter(|r| r & st == 0) {
        let r1 = r0 + st;
        for c0 in (0..d).filter(|c| c & st == 0) {
            let c1 = c0 + st;
            let b = [
                data[r0 * d + c0],
                data[r0 * d + c1],
                data[r1 * d + c0],
                data[r1 * d + c1],
            ];
            let mut out = [ZERO; 4];
            for (o, row) in out.iter_mut().zip(s) {
                *o = row[0] * b[0] + row[1] * b[1] + row[2] * b[2] + row[3] * b[3];
            }
            data[r0 * d + c0] = out[0];
            data[r0 * d + c1] = out[1];
            data[r1 * d + c0] = out[2];
            data[r1 * d + c1] = out[3];
        }
    }
}

/// m <- (U on `qubit`) m, acting on row indices.
pub fn left_multiply_1q(m: &mut ComplexMatrix, n_qubits: usize, qubit: usize, u: &Mat2) {
    let d = m.rows();
    let cols = m.cols();
    let st = stride(n_qubits, qubit);
    let data = m.as_mut_slice();
    for r0 in (0..d).filter(|r| r & st == 0) {
        let r1 = r0 + st;
        for c in 0..cols {
            let a = data[r0 * cols + c];
            let b = data[r1 * cols + c];
            data[r0 * cols + c] = u[0][0] * a + u[0][1] * b;
            data[r1 * cols + c] = u[1][0] * a + u[1][1] * b;
        }
    }
}

fn two_qubit_indices(base: usize, s_hi: usize, s_lo: usize) -> [usize; 4] {
    [base, base + s_lo, base + s_hi, base + s_hi + s_lo]
}

/// m <- (U on qubits `hi`, `lo`) m. The 4x4 matrix uses |hi lo> ordering.
pub fn left_multiply_2q(m: &mut ComplexMatrix, n_qubits: usize, hi: usize, lo: usize, u: &Mat4) {
    let d = m.rows();
    let cols = m.cols();
    let (s_hi, s_lo) = (stride(n_qubits, hi), stride(n_qubits, lo));
    let data = m.as_mut_slice();
    for base in (0..d).filter(|i| i & s_hi == 0 && i & s_lo == 0) {
        let idx = two_qubit_indices(base, s_hi, s_lo);
        for c in 0..cols {
            let v = idx.map(|i| data[i * cols + c]);
            for (a, &row) in idx.iter().enumerate() {
                data[row * cols + c] =
                    u[a][0] * v[0] + u[a][1] * v[1] + u[a][2] * v[2] + u[a][3] * v[3];
            }
        }
    }
}

/// m <- m (U on qubits `hi`, `lo`)^dagger, acting on column indices.
pub fn right_multiply_dagger_2q(
    m: &mut ComplexMatrix,
    n_qubits: usize,
    hi: usize,
    lo: usize,
    u: &Mat4,
) {
    let rows = m.rows();
    let d = m.cols();
    let (s_hi, s_lo) = (stride(n_qubits, hi), stride(n_qubits, lo));
    let uc: Mat4 = {
        let mut t = [[ZERO; 4]; 4];
        for r in 0..4 {
            for c in 0..4 {
                t[r][c] = u[r][c].conj();
            }
        }
        t
    };
    let data = m.as_mut_slice();
    for r in 0..rows {
        let row = &mut data[r * d..(r + 1) * d];
        for base in (0..d).filter(|i| i & s_hi == 0 && i & s_lo == 0) {
            let idx = two_qubit_indices(base, s_hi, s_lo);
            let v = idx.map(|i| row[i]);
            for (a, &col) in idx.iter().enumerate() {
                row[col] = uc[a][0] * v[0] + uc[a][1] * v[1] + uc[a][2] * v[2] + uc[a][3] * v[3];
            }
        }
    }
}

/// rho <- U rho U^dagger for a two-qubit unitary.
pub fn conjugate_2q(rho: &mut ComplexMatrix, n_qubits: usize, hi: usize, lo: usize, u: &Mat4) {
    left_multiply_2q(rho, n_qubits, hi, lo, u);
    right_multiply_dagger_2q(rho, n_qubits, hi, lo, u);
}

pub fn apply_1q_vec(psi: &mut [Complex64], n_qubits: usize, qubit: usize, u: &Mat2) {
    let st = stride(n_qubits, qubit);
    for i0 in (0..psi.len()).filter(|i| i & st == 0) {
        let i1 = i0 + st;
        let (a, b) = (psi[i0], psi[i1]);
        psi[i0] = u[0][0] * a + u[0][1] * b;
        psi[i1] = u[1][0] * a + u[1][1] * b;
    }
}

pub fn apply_2q_vec(psi: &mut [Complex64], n_qubits: usize, hi: usize, lo: usize, u: &Mat4) {
    let (s_hi, s_lo) = (stride(n_qubits, hi), stride(n_qubits, lo));
    for base in (0..psi.len()).filter(|i| i & s_hi == 0 && i & s_lo == 0) {
        let idx = two_qubit_indices(base, s_hi, s_lo);
        let v = idx.map(|i| psi[i]);
        for (a, &i) in idx.iter().enumerate() {
            psi[i] = u[a][0] * v[0] + u[a][1] * v[1] + u[a][2] * v[2] + u[a][3] * v[3];
        }
    }
}
