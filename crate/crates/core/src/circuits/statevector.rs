//! Noiseless statevector engine.

use num_complex::Complex64;

use super::gate::{generator, single_qubit_matrix, two_qubit_matrix, Gate, Generator};
use super::spec::CircuitSpec;
use crate::error::Result;
use crate::qcore::kernels::{apply_1q_vec, apply_2q_vec, dagger2, dagger4};
use crate::qcore::matrix::{I, ZERO};
use crate::qcore::PureState;

#[derive(Debug, Clone)]
pub struct StateEngine<'a> {
    spec: &'a CircuitSpec,
    x: Vec<f64>,
}

impl<'a> StateEngine<'a> {
    pub fn new(spec: &'a CircuitSpec, x: &[f64]) -> Result<Self> {
        spec.check_inputs(x, &vec![0.0; spec.n_params()])?;
        Ok(Self {
            spec,
            x: x.to_vec(),
        })
    }

    fn apply(&self, psi: &mut [Complex64], gate: &Gate, phi: f64, dagger: bool) {
        let n = self.spec.n_qubits();
        match gate.wires[..] {
            [q] => {
                let u = single_qubit_matrix(gate.kind, phi);
                apply_1q_vec(psi, n, q, &if dagger { dagger2(&u) } else { u });
            }
            [hi, lo] => {
                let u = two_qubit_matrix(gate.kind, phi);
                apply_2q_vec(psi, n, hi, lo, &if dagger { dagger4(&u) } else { u });
            }
            _ => unreachable!("validated arity"),
        }
    }

    fn apply_generator(&self, psi: &mut [Complex64], gate: &Gate) {
        let n = self.spec.n_qubits();
        match (generator(gate.kind), &gate.wires[..]) {
            (Some(Generator::One(g)), [q]) => apply_1q_vec(psi, n, *q, &g),
            (Some(Generator::Two(g)), [hi, lo]) => apply_2q_vec(psi, n, *hi, *lo, &g),
            _ => unreachable!("trainable gates have generators"),
        }
    }

    fn zero(&self) -> Vec<Complex64> {
        let mut v = vec![ZERO; 1 << self.spec.n_qubits()];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn run_from(&self, start: usize, mut psi: Vec<Complex64>, theta: &[f64]) -> Vec<Complex64> {
        for gate in self.spec.gates().iter().skip(start) {
            self.apply(&mut psi, gate, gate.resolve_angle(&self.x, theta), false);
        }
        psi
    }

    pub fn run(&self, theta: &[f64]) -> Vec<Complex64> {
        self.run_from(0, self.zero(), theta)
    }

    pub fn expectation(&self, psi: &[Complex64]) -> f64 {
        let ov = self.spec.observable().matrix().mat_vec(psi);
        psi.iter().zip(&ov).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Final state and exact derivatives d|psi>/d theta_i.
    pub fn state_and_derivatives(&self, theta: &[f64]) -> (Vec<Complex64>, Vec<Vec<Complex64>>) {
        let gates = self.spec.gates();
        let dim = 1 << self.spec.n_qubits();
        let mut derivs = vec![vec![ZERO; dim]; self.spec.n_params()];
        let mut psi = self.zero();
        for (k, gate) in gates.iter().enumerate() {
            self.apply(&mut psi, gate, gate.resolve_angle(&self.x, theta), false);
            if let Some(p) = gate.param() {
                // dU/dphi = (-i/2) G U
                let mut d = psi.clone();
                self.apply_generator(&mut d, gate);
                for a in &mut d {
                    *a *= -0.5 * I;
                }
                let d = self.run_from(k + 1, d, theta);
                for (acc, v) in derivs[p].iter_mut().zip(d) {
                    *acc += v;
                }
            }
        }
        (psi, derivs)
    }

    pub fn adjoint_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let mut phi = self.run(theta);
        let f = self.expectation(&phi);
        let mut lam = self.spec.observable().matrix().mat_vec(&phi);
        let mut grad = vec![0.0; self.spec.n_params()];
        for gate in self.spec.gates().iter().rev() {
            let angle = gate.resolve_angle(&self.x, theta);
            if let Some(p) = gate.param() {
                // df/dphi = Im <lam| G |phi>
                let mut g_phi = phi.clone();
                self.apply_generator(&mut g_phi, gate);
                let v: Complex64 = lam.iter().zip(&g_phi).map(|(a, b)| a.conj() * b).sum();
                grad[p] += v.im;
            }
            self.apply(&mut phi, gate, angle, true);
            self.apply(&mut lam, gate, angle, true);
        }
        (f, grad)
    }
}

/// Noiseless statevector evaluation.
pub fn evaluate_pure(spec: &CircuitSpec, x: &[f64], theta: &[f64]) -> Result<(PureState, f64)> {
    spec.check_inputs(x, theta)?;
    let engine = StateEngine::new(spec, x)?;
    let psi = engine.run(theta);
    let f = engine.expectation(&psi);
    Ok((PureState::from_raw(spec.n_qubits(), psi), f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::sim::{evaluate, DensityEngine};
    use crate::circuits::spec::{build_hea, build_ising_qnn, NoiseSetting};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_density_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for spec in [build_hea(2).unwrap(), build_ising_qnn(3).unwrap()] {
            let theta: Vec<f64> = (0..spec.n_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            let x: Vec<f64> = (0..spec.n_features()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let (psi, f) = evaluate_pure(&spec, &x, &theta).unwrap();
            let (rho, g) = evaluate(&spec, &x, &theta, &NoiseSetting::none()).unwrap();
            assert!((f - g).abs() < 1e-10);
            assert!(psi.to_density().matrix().max_abs_diff(rho.matrix()) < 1e-10);

            let (_, ga) = StateEngine::new(&spec, &x).unwrap().adjoint_gradient(&theta);
            let (_, gd) = DensityEngine::new(&spec, &x, &NoiseSetting::none())
                .unwrap()
                .adjoint_gradient(&theta);
            for (a, b) in ga.iter().zip(&gd) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let spec = build_ising_qnn(1).unwrap();
        let engine = StateEngine::new(&spec, &[0.3, 0.8]).unwrap();
        let theta: Vec<f64> = (0..8).map(|i| 0.37 * i as f64 - 1.0).collect();
        let (_, d) = engine.state_and_derivatives(&theta);
        let h = 1e-6;
        for i in 0..8 {
            let mut tp = theta.clone();
            let mut tm = theta.clone();
            tp[i] += h;
            tm[i] -= h;
            let (a, b) = (engine.run(&tp), engine.run(&tm));
            for j in 0..a.len() {
                let fd = (a[j] - b[j]) / (2.0 * h);
                assert!((fd - d[i][j]).norm() < 1e-8);
            }
        }
    }
}
