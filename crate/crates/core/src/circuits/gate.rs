use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::qcore::kernels::{Mat2, Mat4};
use crate::qcore::matrix::{ComplexMatrix, I, ONE, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    RX,
    RY,
    RZ,
    CNOT,
    RXX,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::RX | GateKind::RY | GateKind::RZ => 1,
            GateKind::CNOT | GateKind::RXX => 2,
        }
    }

    pub fn is_parametric(self) -> bool {
        !matches!(self, GateKind::CNOT)
    }
}

/// Where a rotation angle comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSource {
    Trainable { param: usize },
    /// `scale * x[feature]`
    Encoded { feature: usize, scale: f64 },
    Fixed { angle: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    /// `None` only for CNOT.
    pub angle: Option<AngleSource>,
}

impl Gate {
    pub fn rotation(kind: GateKind, wire: usize, angle: AngleSource) -> Self {
        Self {
            kind,
            wires: vec![wire],
            angle: Some(angle),
        }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::CNOT,
            wires: vec![control, target],
            angle: None,
        }
    }

    pub fn rxx(a: usize, b: usize, angle: AngleSource) -> Self {
        Self {
            kind: GateKind::RXX,
            wires: vec![a, b],
            angle: Some(angle),
        }
    }

    pub fn param(&self) -> Option<usize> {
        match self.angle {
            Some(AngleSource::Trainable { param }) => Some(param),
            _ => None,
        }
    }

    /// Resolves the rotation angle (0 for CNOT).
    pub fn resolve_angle(&self, x: &[f64], theta: &[f64]) -> f64 {
        match self.angle {
            None => 0.0,
            Some(AngleSource::Trainable { param }) => theta[param],
            Some(AngleSource::Encoded { feature, scale }) => scale * x[feature],
            Some(AngleSource::Fixed { angle }) => angle,
        }
    }
}

/// exp(-i phi G / 2) for G in {X, Y, Z}.
pub fn single_qubit_matrix(kind: GateKind, phi: f64) -> Mat2 {
    let (s, c) = (phi / 2.0).sin_cos();
    let c = Complex64::new(c, 0.0);
    match kind {
        GateKind::RX => [[c, -I * s], [-I * s, c]],
        GateKind::RY => [[c, Complex64::new(-s, 0.0)], [Complex64::new(s, 0.0), c]],
        GateKind::RZ => [
            [Complex64::from_polar(1.0, -phi / 2.0), ZERO],
            [ZERO, Complex64::from_polar(1.0, phi / 2.0)],
        ],
        _ => panic!("{kind:?} is not a single-qubit gate"),
    }
}

/// Two-qubit gate matrix in |w0 w1> ordering.
pub fn two_qubit_matrix(kind: GateKind, phi: f64) -> Mat4 {
    match kind {
        GateKind::CNOT => [
            [ONE, ZERO, ZERO, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
        ],
        GateKind::RXX => {
            let (s, c) = (phi / 2.0).sin_cos();
            let c = Complex64::new(c, 0.0);
            let m = -I * s;
            [
                [c, ZERO, ZERO, m],
                [ZERO, c, m, ZERO],
                [ZERO, m, c, ZERO],
                [m, ZERO, ZERO, c],
            ]
        }
        _ => panic!("{kind:?} is not a two-qubit gate"),
    }
}

/// Hermitian generator G with U = exp(-i phi G / 2).
pub enum Generator {
    One(Mat2),
    Two(Mat4),
}

pub fn generator(kind: GateKind) -> Option<Generator> {
    match kind {
        GateKind::RX => Some(Generator::One([[ZERO, ONE], [ONE, ZERO]])),
        GateKind::RY => Some(Generator::One([[ZERO, -I], [I, ZERO]])),
        GateKind::RZ => Some(Generator::One([[ONE, ZERO], [ZERO, -ONE]])),
        GateKind::RXX => Some(Generator::Two([
            [ZERO, ZERO, ZERO, ONE],
            [ZERO, ZERO, ONE, ZERO],
            [ZERO, ONE, ZERO, ZERO],
            [ONE, ZERO, ZERO, ZERO],
        ])),
        GateKind::CNOT => None,
    }
}

/// Gate matrix as a dense `ComplexMatrix`.
pub fn gate_matrix(kind: GateKind, phi: f64) -> ComplexMatrix {
    if kind.arity() == 1 {
        let m = single_qubit_matrix(kind, phi);
        ComplexMatrix::from_fn(2, 2, |r, c| m[r][c])
    } else {
        let m = two_qubit_matrix(kind, phi);
        ComplexMatrix::from_fn(4, 4, |r, c| m[r][c])
    }
}
