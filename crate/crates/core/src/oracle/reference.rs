//! Slow evaluator that builds every gate and Kraus operator on the full
//! Hilbert space, plus single-qubit Bloch-vector QFIs.

use num_complex::Complex64;

use crate::circuits::{gate::gate_matrix, CircuitSpec, NoiseSetting};
use crate::error::{Error, Result};
use crate::noise::ChannelKind;
use crate::qcore::matrix::ZERO;
use crate::qcore::{ComplexMatrix, DensityMatrix};

/// Lifts `op` acting on `wires` (first wire = most significant) to n qubits.
pub fn embed(op: &ComplexMatrix, wires: &[usize], n_qubits: usize) -> ComplexMatrix {
    let dim = 1usize << n_qubits;
    let bit = |i: usize, q: usize| (i >> (n_qubits - 1 - q)) & 1;
    let local = |i: usize| wires.iter().fold(0, |acc, &w| (acc << 1) | bit(i, w));
    let mask: usize = wires.iter().map(|&w| 1usize << (n_qubits - 1 - w)).sum();
    ComplexMatrix::from_fn(dim, dim, |r, c| {
        if r & !mask == c & !mask {
            op[(local(r), local(c))]
        } else {
            ZERO
        }
    })
}

/// rho(theta) from |0...0>, each gate followed by the channel on its wires.
pub fn reference_state(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
) -> Result<DensityMatrix> {
    spec.check_inputs(x, theta)?;
    let n = spec.n_qubits();
    let channel = noise.channel()?;
    let mut rho = DensityMatrix::zero(n).into_matrix();
    for gate in spec.gates() {
        let u = embed(&gate_matrix(gate.kind, gate.resolve_angle(x, theta)), &gate.wires, n);
        rho = u.matmul(&rho).matmul(&u.adjoint());
        if let Some(ch) = &channel {
            for &w in &gate.wires {
                let mut next = ComplexMatrix::zeros(rho.rows(), rho.cols());
                for k in ch.kraus_ops() {
                    let kf = embed(k, &[w], n);
                    let term = kf.matmul(&rho).matmul(&kf.adjoint());
                    for (a, b) in next.as_mut_slice().iter_mut().zip(term.as_slice()) {
                        *a += b;
                    }
                }
                rho = next;
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(rho)
}

/// (Tr rho X, Tr rho Y, Tr rho Z) of a single-qubit state.
pub fn bloch_vector(rho: &ComplexMatrix) -> Result<[f64; 3]> {
    if rho.rows() != 2 || rho.cols() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho.rows(),
        });
    }
    let off: Complex64 = rho[(0, 1)];
    Ok([2.0 * off.re, -2.0 * off.im, (rho[(0, 0)] - rho[(1, 1)]).re])
}

/// |dr|^2 + (r . dr)^2 / (1 - |r|^2); the second term is dropped for pure states.
pub fn bloch_qfi(r: [f64; 3], dr: [f64; 3]) -> f64 {
    let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let purity_gap = 1.0 - dot(r, r);
    let mixed = if purity_gap > 1e-12 {
        dot(r, dr).powi(2) / purity_gap
    } else {
        0.0
    };
    dot(dr, dr) + mixed
}

/// QFI of theta for RX(theta)|0> followed by one use of the channel, from
/// the channel's affine action on the Bloch vector.
pub fn rx_bloch_qfi(kind: ChannelKind, p: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    // r = (0, -sin, cos) before noise; (sx, sz, shift_z) afterwards
    let (sx, sz, shift) = match kind {
        ChannelKind::Depolarizing => (1.0 - p, 1.0 - p, 0.0),
        ChannelKind::Dephasing => ((1.0 - p).sqrt(), 1.0, 0.0),
        ChannelKind::AmplitudeDamping => ((1.0 - p).sqrt(), 1.0 - p, p),
    };
    let r = [0.0, -sx * s, sz * c + shift];
    let dr = [0.0, -sx * c, -sz * s];
    bloch_qfi(r, dr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{build_hea, build_ising_qnn, evaluate};
    use crate::train::{init_params, SCAN_STREAM};

    #[test]
    fn matches_engine_on_small_circuits() {
        let spec = build_ising_qnn(2).unwrap();
        let theta = init_params(spec.n_params(), 4, SCAN_STREAM);
        let x = [0.4, -1.3];
        for kind in [ChannelKind::Depolarizing, ChannelKind::Dephasing, ChannelKind::AmplitudeDamping] {
            let noise = NoiseSetting::new(kind, 0.07);
            let (fast, _) = evaluate(&spec, &x, &theta, &noise).unwrap();
            let slow = reference_state(&spec, &x, &theta, &noise).unwrap();
            assert!(fast.matrix().max_abs_diff(slow.matrix()) < 1e-12, "{kind:?}");
        }
        let spec = build_hea(1).unwrap();
        let theta = init_params(spec.n_params(), 1, SCAN_STREAM);
        let noise = NoiseSetting::new(ChannelKind::Depolarizing, 0.02);
        let (fast, _) = evaluate(&spec, &[0.3], &theta, &noise).unwrap();
        let slow = reference_state(&spec, &[0.3], &theta, &noise).unwrap();
        assert!(fast.matrix().max_abs_diff(slow.matrix()) < 1e-12);
    }

    #[test]
    fn bloch_closed_forms() {
        for theta in [0.3, 1.1, 2.4] {
            for p in [0.05, 0.1, 0.2] {
                let dp = rx_bloch_qfi(ChannelKind::Depolarizing, p, theta);
                assert!((dp - (1.0 - p).powi(2)).abs() < 1e-12);
                let ph = rx_bloch_qfi(ChannelKind::Dephasing, p, theta);
                assert!((ph - 1.0).abs() < 1e-12);
            }
        }
        assert!((rx_bloch_qfi(ChannelKind::AmplitudeDamping, 0.0, 0.7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bloch_vector_of_plus_state() {
        let h = Complex64::new(0.5, 0.0);
        let rho = ComplexMatrix::from_vec(2, 2, vec![h, h, h, h]).unwrap();
        assert_eq!(bloch_vector(&rho).unwrap(), [1.0, 0.0, 0.0]);
    }
}
