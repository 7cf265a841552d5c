use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::gate::{AngleSource, Gate, GateKind};
use crate::error::{Error, Result};
use crate::noise::{make_channel, ChannelKind, KrausChannel};
use crate::qcore::Observable;

/// A parameterized circuit f(x, theta) = Tr[O rho(x, theta)].
#[derive(Debug, Clone)]
pub struct CircuitSpec {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
    n_features: usize,
    observable: Observable,
    label: String,
}

impl CircuitSpec {
    pub fn new(
        n_qubits: usize,
        gates: Vec<Gate>,
        n_params: usize,
        n_features: usize,
        observable: Observable,
        label: impl Into<String>,
    ) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::InvalidCircuit("no qubits".into()));
        }
        if observable.n_qubits() != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                actual: observable.n_qubits(),
            });
        }
        let mut seen = vec![false; n_params];
        for (i, g) in gates.iter().enumerate() {
            if g.wires.len() != g.kind.arity() {
                return Err(Error::InvalidCircuit(format!(
                    "gate {i} ({:?}) has {} wires",
                    g.kind,
                    g.wires.len()
                )));
            }
            if let Some(&w) = g.wires.iter().find(|&&w| w >= n_qubits) {
                return Err(Error::QubitOutOfRange { index: w, n_qubits });
            }
            if g.wires.len() == 2 && g.wires[0] == g.wires[1] {
                return Err(Error::InvalidCircuit(format!("gate {i} repeats wire {}", g.wires[0])));
            }
            match (g.kind.is_parametric(), g.angle) {
                (true, None) => {
                    return Err(Error::InvalidCircuit(format!("gate {i} needs an angle")))
                }
                (false, Some(_)) => {
                    return Err(Error::InvalidCircuit(format!("gate {i} takes no angle")))
                }
                _ => {}
            }
            match g.angle {
                Some(AngleSource::Trainable { param }) => {
                    if param >= n_params {
                        return Err(Error::InvalidCircuit(format!(
                            "gate {i} references parameter {param} >= {n_params}"
                        )));
                    }
                    seen[param] = true;
                }
                Some(AngleSource::Encoded { feature, .. }) if feature >= n_features => {
                    return Err(Error::InvalidCircuit(format!(
                        "gate {i} references feature {feature} >= {n_features}"
                    )));
                }
                _ => {}
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidCircuit(format!("parameter {p} is never used")));
        }
        Ok(Self {
            n_qubits,
            gates,
            n_params,
            n_features,
            observable,
            label: label.into(),
        })
    }

    /// Like [`CircuitSpec::new`] but allows parameters that drive no gate.
    pub fn with_unused_params(
        n_qubits: usize,
        gates: Vec<Gate>,
        n_params: usize,
        n_features: usize,
        observable: Observable,
        label: impl Into<String>,
    ) -> Result<Self> {
        let used = gates.iter().filter_map(Gate::param).max().map_or(0, |m| m + 1);
        let mut spec = Self::new(n_qubits, gates, used, n_features, observable, label)?;
        if n_params < used {
            return Err(Error::InvalidCircuit(format!(
                "n_params {n_params} below highest referenced parameter"
            )));
        }
        spec.n_params = n_params;
        Ok(spec)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn check_inputs(&self, x: &[f64], theta: &[f64]) -> Result<()> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        if theta.len() != self.n_params {
            return Err(Error::DimensionMismatch {
                expected: self.n_params,
                actual: theta.len(),
            });
        }
        Ok(())
    }

    /// Gate indices driven by each parameter.
    pub fn param_occurrences(&self) -> Vec<Vec<usize>> {
        let mut occ = vec![Vec::new(); self.n_params];
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(p) = g.param() {
                occ[p].push(i);
            }
        }
        occ
    }

    /// Relabels qubits: wire `q` becomes `perm[q]`. The observable must be
    /// supplied already conjugated by the same permutation.
    pub fn permuted(&self, perm: &[usize], observable: Observable) -> Result<Self> {
        if perm.len() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: perm.len(),
            });
        }
        let gates = self
            .gates
            .iter()
            .map(|g| Gate {
                kind: g.kind,
                wires: g.wires.iter().map(|&w| perm[w]).collect(),
                angle: g.angle,
            })
            .collect();
        Self::new(
            self.n_qubits,
            gates,
            self.n_params,
            self.n_features,
            observable,
            format!("{}-permuted", self.label),
        )
    }
}

/// The two built-in architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitKind {
    Hea,
    Ising,
}

impl CircuitKind {
    pub fn build(self, n_layers: usize) -> Result<CircuitSpec> {
        match self {
            CircuitKind::Hea => build_hea(n_layers),
            CircuitKind::Ising => build_ising_qnn(n_layers),
        }
    }
}

impl fmt::Display for CircuitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CircuitKind::Hea => "hea",
            CircuitKind::Ising => "ising",
        })
    }
}

impl FromStr for CircuitKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hea" => Ok(CircuitKind::Hea),
            "ising" => Ok(CircuitKind::Ising),
            other => Err(Error::InvalidArgument(format!("unknown circuit '{other}'"))),
        }
    }
}

pub const HEA_QUBITS: usize = 5;
pub const ISING_QUBITS: usize = 4;

/// Hardware-efficient ansatz on 5 qubits with 15 parameters per layer.
///
/// Encoding: RY(pi x) then RZ(pi x) on every qubit, once. Each layer applies
/// RX, RZ, RX sublayers, each followed by the open CNOT chain 0->1->...->4.
/// Output is Z on qubit 0.
pub fn build_hea(n_layers: usize) -> Result<CircuitSpec> {
    if n_layers == 0 {
        return Err(Error::InvalidArgument("n_layers must be >= 1".into()));
    }
    let n = HEA_QUBITS;
    let enc = AngleSource::Encoded {
        feature: 0,
        scale: PI,
    };
    let mut gates = Vec::new();
    for kind in [GateKind::RY, GateKind::RZ] {
        gates.extend((0..n).map(|q| Gate::rotation(kind, q, enc)));
    }
    let mut param = 0;
    for _ in 0..n_layers {
        for kind in [GateKind::RX, GateKind::RZ, GateKind::RX] {
            for q in 0..n {
                gates.push(Gate::rotation(kind, q, AngleSource::Trainable { param }));
                param += 1;
            }
            gates.extend((0..n - 1).map(|q| Gate::cnot(q, q + 1)));
        }
    }
    CircuitSpec::new(
        n,
        gates,
        param,
        1,
        Observable::z_on(n, 0)?,
        format!("hea-L{n_layers}"),
    )
}

/// Four-qubit Ising-style QNN with 8 parameters per layer.
///
/// Encoding: RX(x0) on qubit 0 and RX(x1) on qubit 2, once; features are
/// expected already scaled to rotation angles. Each layer applies RY on every
/// qubit then the RXX ring (0,1), (1,2), (2,3), (3,0). Output is Z^(x)4.
pub fn build_ising_qnn(n_layers: usize) -> Result<CircuitSpec> {
    if n_layers == 0 {
        return Err(Error::InvalidArgument("n_layers must be >= 1".into()));
    }
    let n = ISING_QUBITS;
    let mut gates = vec![
        Gate::rotation(
            GateKind::RX,
            0,
            AngleSource::Encoded {
                feature: 0,
                scale: 1.0,
            },
        ),
        Gate::rotation(
            GateKind::RX,
            2,
            AngleSource::Encoded {
                feature: 1,
                scale: 1.0,
            },
        ),
    ];
    let mut param = 0;
    for _ in 0..n_layers {
        for q in 0..n {
            gates.push(Gate::rotation(GateKind::RY, q, AngleSource::Trainable { param }));
            param += 1;
        }
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 0)] {
            gates.push(Gate::rxx(a, b, AngleSource::Trainable { param }));
            param += 1;
        }
    }
    CircuitSpec::new(
        n,
        gates,
        param,
        2,
        Observable::z_all(n),
        format!("ising-L{n_layers}"),
    )
}

/// Uniform noise applied after every gate on each wire it touches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSetting {
    pub kind: Option<ChannelKind>,
    pub p: f64,
}

impl NoiseSetting {
    pub fn none() -> Self {
        Self { kind: None, p: 0.0 }
    }

    pub fn new(kind: ChannelKind, p: f64) -> Self {
        Self {
            kind: Some(kind),
            p,
        }
    }

    pub fn is_noiseless(&self) -> bool {
        self.kind.is_none() || self.p == 0.0
    }

    /// The channel to apply, or `None` when noiseless.
    pub fn channel(&self) -> Result<Option<KrausChannel>> {
        if !(0.0..=1.0).contains(&self.p) || self.p.is_nan() {
            return Err(Error::InvalidNoiseLevel { p: self.p });
        }
        match self.kind {
            Some(kind) if self.p > 0.0 => Ok(Some(make_channel(kind, self.p)?)),
            _ => Ok(None),
        }
    }
}

impl Default for NoiseSetting {
    fn default() -> Self {
        Self::none()
    }
}
