//! Density-matrix forward evaluation, checkpointed prefixes and analytic
//! gradients under parameter-independent noise.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::gate::{generator, single_qubit_matrix, two_qubit_matrix, Gate, Generator};
use super::spec::{CircuitSpec, NoiseSetting};
use crate::error::Result;
use crate::qcore::kernels::{
    apply_superop_1q, compose, conjugate_2q, dagger2, dagger4, left_multiply_1q,
    left_multiply_2q, superop_from_kraus, Superop1,
};
use crate::qcore::{ComplexMatrix, DensityMatrix, Observable};

/// A circuit bound to one input `x` and one noise setting.
#[derive(Debug, Clone)]
pub struct DensityEngine<'a> {
    spec: &'a CircuitSpec,
    x: Vec<f64>,
    noise: Option<(Superop1, Superop1)>,
}

impl<'a> DensityEngine<'a> {
    pub fn new(spec: &'a CircuitSpec, x: &[f64], noise: &NoiseSetting) -> Result<Self> {
        spec.check_inputs(x, &vec![0.0; spec.n_params()])?;
        let noise = noise.channel()?.map(|ch| (ch.superop(), ch.adjoint_superop()));
        Ok(Self {
            spec,
            x: x.to_vec(),
            noise,
        })
    }

    pub fn spec(&self) -> &CircuitSpec {
        self.spec
    }

    pub fn initial_state(&self) -> ComplexMatrix {
        DensityMatrix::zero(self.spec.n_qubits()).into_matrix()
    }

    fn angle(&self, gate: &Gate, theta: &[f64]) -> f64 {
        gate.resolve_angle(&self.x, theta)
    }

    /// Applies gate `k` (with its trailing noise) at the given angle.
    fn apply_gate(&self, rho: &mut ComplexMatrix, k: usize, phi: f64) {
        let n = self.spec.n_qubits();
        let gate = &self.spec.gates()[k];
        match gate.wires[..] {
            [q] => {
                let u = superop_from_kraus(&[single_qubit_matrix(gate.kind, phi)]);
                let s = match &self.noise {
                    Some((ch, _)) => compose(ch, &u),
                    None => u,
                };
                apply_superop_1q(rho, n, q, &s);
            }
            [hi, lo] => {
                conjugate_2q(rho, n, hi, lo, &two_qubit_matrix(gate.kind, phi));
                if let Some((ch, _)) = &self.noise {
                    apply_superop_1q(rho, n, hi, ch);
                    apply_superop_1q(rho, n, lo, ch);
                }
            }
            _ => unreachable!("validated arity"),
        }
    }

    /// Runs gates `start..` on `rho`. `shift` adds an offset to one gate's angle.
    pub fn run_from(
        &self,
        start: usize,
        mut rho: ComplexMatrix,
        theta: &[f64],
        shift: Option<(usize, f64)>,
    ) -> ComplexMatrix {
        for (k, gate) in self.spec.gates().iter().enumerate().skip(start) {
            let mut phi = self.angle(gate, theta);
            if let Some((g, d)) = shift {
                if g == k {
                    phi += d;
                }
            }
            self.apply_gate(&mut rho, k, phi);
        }
        rho
    }

    pub fn run(&self, theta: &[f64]) -> ComplexMatrix {
        self.run_from(0, self.initial_state(), theta, None)
    }

    /// States before each gate; entry `len(gates)` is the final state.
    pub fn checkpoints(&self, theta: &[f64]) -> Vec<ComplexMatrix> {
        let mut out = Vec::with_capacity(self.spec.gates().len() + 1);
        let mut rho = self.initial_state();
        for (k, gate) in self.spec.gates().iter().enumerate() {
            out.push(rho.clone());
            self.apply_gate(&mut rho, k, self.angle(gate, theta));
        }
        out.push(rho);
        out
    }

    pub fn expectation(&self, rho: &ComplexMatrix) -> f64 {
        observable_value(self.spec.observable(), rho)
    }

    /// f and its gradient by one forward and one Heisenberg-picture backward pass.
    pub fn adjoint_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let n = self.spec.n_qubits();
        let gates = self.spec.gates();
        // sigma_k = U_k rho U_k^dagger before noise, for trainable gates only
        let mut sigmas: Vec<Option<ComplexMatrix>> = vec![None; gates.len()];
        let mut rho = self.initial_state();
        for (k, gate) in gates.iter().enumerate() {
            let phi = self.angle(gate, theta);
            if gate.param().is_none() {
                self.apply_gate(&mut rho, k, phi);
                continue;
            }
            match gate.wires[..] {
                [q] => {
                    let u = superop_from_kraus(&[single_qubit_matrix(gate.kind, phi)]);
                    apply_superop_1q(&mut rho, n, q, &u);
                    sigmas[k] = Some(rho.clone());
                    if let Some((ch, _)) = &self.noise {
                        apply_superop_1q(&mut rho, n, q, ch);
                    }
                }
                [hi, lo] => {
                    conjugate_2q(&mut rho, n, hi, lo, &two_qubit_matrix(gate.kind, phi));
                    sigmas[k] = Some(rho.clone());
                    if let Some((ch, _)) = &self.noise {
                        apply_superop_1q(&mut rho, n, hi, ch);
                        apply_superop_1q(&mut rho, n, lo, ch);
                    }
                }
                _ => unreachable!(),
            }
        }
        let f = self.expectation(&rho);

        let mut grad = vec![0.0; self.spec.n_params()];
        let mut q_op = self.spec.observable().matrix().clone();
        for (k, gate) in gates.iter().enumerate().rev() {
            if let Some((_, adj)) = &self.noise {
                for &w in &gate.wires {
                    apply_superop_1q(&mut q_op, n, w, adj);
                }
            }
            let phi = self.angle(gate, theta);
            if let (Some(p), Some(sigma)) = (gate.param(), sigmas[k].take()) {
                // d/dphi Tr[Q U s U^dag] = Im Tr[Q G sigma]
                let mut gs = sigma;
                match (generator(gate.kind), &gate.wires[..]) {
                    (Some(Generator::One(g)), [q]) => left_multiply_1q(&mut gs, n, *q, &g),
                    (Some(Generator::Two(g)), [hi, lo]) => {
                        left_multiply_2q(&mut gs, n, *hi, *lo, &g)
                    }
                    _ => unreachable!(),
                }
                grad[p] += q_op.trace_product(&gs).im;
            }
            match gate.wires[..] {
                [q] => {
                    let ud = superop_from_kraus(&[dagger2(&single_qubit_matrix(gate.kind, phi))]);
                    apply_superop_1q(&mut q_op, n, q, &ud);
                }
                [hi, lo] => {
                    conjugate_2q(&mut q_op, n, hi, lo, &dagger4(&two_qubit_matrix(gate.kind, phi)))
                }
                _ => unreachable!(),
            }
        }
        (f, grad)
    }

    /// Final state and exact derivatives d rho / d theta_i, propagating the
    /// tangent (-i/2)[G, sigma] of every trainable gate through the rest of the
    /// circuit.
    pub fn state_and_tangents(&self, theta: &[f64]) -> (ComplexMatrix, Vec<ComplexMatrix>) {
        let n = self.spec.n_qubits();
        let dim = 1 << n;
        let mut tangents = vec![ComplexMatrix::zeros(dim, dim); self.spec.n_params()];
        let mut rho = self.initial_state();
        for (k, gate) in self.spec.gates().iter().enumerate() {
            let phi = self.angle(gate, theta);
            let Some(p) = gate.param() else {
                self.apply_gate(&mut rho, k, phi);
                continue;
            };
            match gate.wires[..] {
                [q] => apply_superop_1q(
                    &mut rho,
                    n,
                    q,
                    &superop_from_kraus(&[single_qubit_matrix(gate.kind, phi)]),
                ),
                [hi, lo] => conjugate_2q(&mut rho, n, hi, lo, &two_qubit_matrix(gate.kind, phi)),
                _ => unreachable!(),
            }
            let mut a = rho.clone();
            match (generator(gate.kind), &gate.wires[..]) {
                (Some(Generator::One(g)), [q]) => left_multiply_1q(&mut a, n, *q, &g),
                (Some(Generator::Two(g)), [hi, lo]) => left_multiply_2q(&mut a, n, *hi, *lo, &g),
                _ => unreachable!(),
            }
            // (-i/2)(A - A^dagger) with A = G sigma
            let mut t = ComplexMatrix::from_fn(dim, dim, |r, c| {
                (a[(r, c)] - a[(c, r)].conj()) * Complex64::new(0.0, -0.5)
            });
            if let Some((ch, _)) = &self.noise {
                for &w in &gate.wires {
                    apply_superop_1q(&mut rho, n, w, ch);
                    apply_superop_1q(&mut t, n, w, ch);
                }
            }
            let t = self.run_from(k + 1, t, theta, None);
            tangents[p] = &tangents[p] + &t;
        }
        (rho, tangents)
    }

    /// f and its gradient by +-pi/2 shifts of every trainable gate occurrence.
    pub fn parameter_shift_gradient(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let cps = self.checkpoints(theta);
        let f = self.expectation(cps.last().expect("final state"));
        let mut grad = vec![0.0; self.spec.n_params()];
        for (k, gate) in self.spec.gates().iter().enumerate() {
            let Some(p) = gate.param() else { continue };
            let plus = self.run_from(k, cps[k].clone(), theta, Some((k, FRAC_PI_2)));
            let minus = self.run_from(k, cps[k].clone(), theta, Some((k, -FRAC_PI_2)));
            grad[p] += 0.5 * (self.expectation(&plus) - self.expectation(&minus));
        }
        (f, grad)
    }
}

/// Re Tr[O rho] without validation, for hot loops.
pub(crate) fn observable_value(obs: &Observable, rho: &ComplexMatrix) -> f64 {
    obs.matrix().trace_product(rho).re
}

/// Noisy forward evaluation from |0...0><0...0|; returns rho and f = Tr[O rho].
pub fn evaluate(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
) -> Result<(DensityMatrix, f64)> {
    spec.check_inputs(x, theta)?;
    let engine = DensityEngine::new(spec, x, noise)?;
    let rho = DensityMatrix::from_matrix_unchecked(engine.run(theta))?;
    let f = crate::qcore::expectation(&rho, spec.observable())?;
    Ok((rho, f))
}

/// Output f only.
pub fn evaluate_f(spec: &CircuitSpec, x: &[f64], theta: &[f64], noise: &NoiseSetting) -> Result<f64> {
    evaluate(spec, x, theta, noise).map(|(_, f)| f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::gate::{AngleSource, GateKind};
    use crate::circuits::spec::{build_hea, build_ising_qnn};
    use crate::noise::ChannelKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_theta(p: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..p).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
    }

    #[test]
    fn ising_identity_point() {
        let spec = build_ising_qnn(1).unwrap();
        let (_, f) = evaluate(&spec, &[0.0, 0.0], &[0.0; 8], &NoiseSetting::none()).unwrap();
        assert!((f - 1.0).abs() < 1e-14);
    }

    #[test]
    fn full_depolarizing_flattens_output() {
        let spec = build_hea(2).unwrap();
        let theta = random_theta(30, 3);
        let noise = NoiseSetting::new(ChannelKind::Depolarizing, 1.0);
        let (rho, f) = evaluate(&spec, &[0.4], &theta, &noise).unwrap();
        assert!(f.abs() < 1e-10);
        assert!((rho.purity() - 1.0 / 32.0).abs() < 1e-12);
    }

    #[test]
    fn output_is_valid_state() {
        for kind in ChannelKind::ALL {
            let spec = build_ising_qnn(2).unwrap();
            let theta = random_theta(16, 5);
            let (rho, f) =
                evaluate(&spec, &[0.3, -1.1], &theta, &NoiseSetting::new(kind, 0.05)).unwrap();
            rho.validate(&Default::default()).unwrap();
            assert!(f.abs() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn adjoint_matches_parameter_shift() {
        for (i, kind) in ChannelKind::ALL.into_iter().enumerate() {
            let spec = build_hea(1).unwrap();
            let theta = random_theta(15, 10 + i as u64);
            let engine =
                DensityEngine::new(&spec, &[0.7], &NoiseSetting::new(kind, 0.03)).unwrap();
            let (fa, ga) = engine.adjoint_gradient(&theta);
            let (fp, gp) = engine.parameter_shift_gradient(&theta);
            assert!((fa - fp).abs() < 1e-12);
            for (a, b) in ga.iter().zip(&gp) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn shared_parameter_sums_occurrences() {
        let obs = Observable::z_on(2, 1).unwrap();
        let t = |param| AngleSource::Trainable { param };
        let spec = CircuitSpec::new(
            2,
            vec![
                Gate::rotation(GateKind::RY, 0, t(0)),
                Gate::cnot(0, 1),
                Gate::rotation(GateKind::RX, 1, t(0)),
                Gate::rxx(0, 1, t(1)),
            ],
            2,
            0,
            obs,
            "shared",
        )
        .unwrap();
        let noise = NoiseSetting::new(ChannelKind::AmplitudeDamping, 0.1);
        let engine = DensityEngine::new(&spec, &[], &noise).unwrap();
        let theta = [0.4, -0.9];
        let (_, g) = engine.adjoint_gradient(&theta);
        let h = 1e-5;
        for i in 0..2 {
            let mut tp = theta;
            let mut tm = theta;
            tp[i] += h;
            tm[i] -= h;
            let fd = (evaluate_f(&spec, &[], &tp, &noise).unwrap()
                - evaluate_f(&spec, &[], &tm, &noise).unwrap())
                / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn checkpoint_restart_is_exact() {
        let spec = build_ising_qnn(2).unwrap();
        let theta = random_theta(16, 1);
        let engine = DensityEngine::new(
            &spec,
            &[0.2, 0.5],
            &NoiseSetting::new(ChannelKind::Dephasing, 0.02),
        )
        .unwrap();
        let cps = engine.checkpoints(&theta);
        let full = engine.run(&theta);
        let resumed = engine.run_from(7, cps[7].clone(), &theta, None);
        assert_eq!(full, resumed);
        assert_eq!(&full, cps.last().unwrap());
    }
}
