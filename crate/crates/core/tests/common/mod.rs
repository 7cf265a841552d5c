#![allow(dead_code)]

use nie_lab_core::circuits::{AngleSource, CircuitSpec, Gate, GateKind};
use nie_lab_core::qcore::Observable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two-qubit, four-parameter circuit: a random rotation per parameter on
/// alternating wires, entangled by a CNOT after the second rotation.
pub fn random_two_qubit(seed: u64) -> (CircuitSpec, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [GateKind::RX, GateKind::RY, GateKind::RZ];
    let mut gates = vec![
        Gate::rotation(GateKind::RY, 0, AngleSource::Fixed { angle: rng.random_range(0.0..3.0) }),
        Gate::rotation(GateKind::RX, 1, AngleSource::Fixed { angle: rng.random_range(0.0..3.0) }),
    ];
    for param in 0..4 {
        let kind = kinds[rng.random_range(0..3)];
        gates.push(Gate::rotation(kind, param % 2, AngleSource::Trainable { param }));
        if param == 1 {
            gates.push(Gate::cnot(0, 1));
        }
    }
    let theta = (0..4).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
    let spec = CircuitSpec::new(2, gates, 4, 0, Observable::z_all(2), "random2").unwrap();
    (spec, theta)
}

pub fn max_abs_diff(a: &nalgebra::DMatrix<f64>, b: &nalgebra::DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
