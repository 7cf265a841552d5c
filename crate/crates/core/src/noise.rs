//! Single-qubit Kraus channels: depolarizing, dephasing and amplitude damping.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::kernels::{
    adjoint_superop_from_kraus, apply_superop_1q, mat2_from, superop_from_kraus, Mat2, Superop1,
};
use crate::qcore::matrix::{pauli, ComplexMatrix, ONE, ZERO};
use crate::qcore::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "dp")]
    Depolarizing,
    #[serde(rename = "pd")]
    Dephasing,
    #[serde(rename = "ad")]
    AmplitudeDamping,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::Depolarizing,
        ChannelKind::Dephasing,
        ChannelKind::AmplitudeDamping,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            ChannelKind::Depolarizing => "dp",
            ChannelKind::Dephasing => "pd",
            ChannelKind::AmplitudeDamping => "ad",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dp" | "depolarizing" => Ok(ChannelKind::Depolarizing),
            "pd" | "dephasing" | "phase_damping" => Ok(ChannelKind::Dephasing),
            "ad" | "amplitude_damping" => Ok(ChannelKind::AmplitudeDamping),
            other => Err(Error::InvalidArgument(format!("unknown channel kind '{other}'"))),
        }
    }
}

/// A single-qubit channel at noise level `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kind: ChannelKind,
    p: f64,
    kraus_ops: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.kraus_ops
    }

    /// Frobenius norm of sum_k K^dagger K - I.
    pub fn completeness_residual(&self) -> f64 {
        let sum = self
            .kraus_ops
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |acc, k| &acc + &k.adjoint().matmul(k));
        (&sum - &ComplexMatrix::identity(2)).frobenius_norm()
    }

    pub fn is_identity(&self) -> bool {
        self.p == 0.0
    }

    pub(crate) fn mat2_ops(&self) -> Vec<Mat2> {
        self.kraus_ops.iter().map(mat2_from).collect()
    }

    pub fn superop(&self) -> Superop1 {
        superop_from_kraus(&self.mat2_ops())
    }

    pub fn adjoint_superop(&self) -> Superop1 {
        adjoint_superop_from_kraus(&self.mat2_ops())
    }
}

/// Builds the Kraus set for `kind` at level `p`.
///
/// Depolarizing uses the convex form p I/2 + (1 - p) rho, realized by
/// {sqrt(1 - 3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}.
pub fn make_channel(kind: ChannelKind, p: f64) -> Result<KrausChannel> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidNoiseLevel { p });
    }
    let c = |v: f64| Complex64::new(v, 0.0);
    let kraus_ops = match kind {
        ChannelKind::Depolarizing => {
            let a = (1.0 - 0.75 * p).sqrt();
            let b = (0.25 * p).sqrt();
            vec![
                pauli::id().scale_real(a),
                pauli::x().scale_real(b),
                pauli::y().scale_real(b),
                pauli::z().scale_real(b),
            ]
        }
        ChannelKind::Dephasing => vec![
            ComplexMatrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, c((1.0 - p).sqrt())])?,
            ComplexMatrix::from_vec(2, 2, vec![ZERO, ZERO, ZERO, c(p.sqrt())])?,
        ],
        ChannelKind::AmplitudeDamping => vec![
            ComplexMatrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, c((1.0 - p).sqrt())])?,
            ComplexMatrix::from_vec(2, 2, vec![ZERO, c(p.sqrt()), ZERO, ZERO])?,
        ],
    };
    Ok(KrausChannel { kind, p, kraus_ops })
}

/// rho -> sum_k (I (x) K_k (x) I) rho (I (x) K_k (x) I)^dagger on `target_qubit`.
pub fn apply_channel(
    rho: &DensityMatrix,
    ch: &KrausChannel,
    target_qubit: usize,
) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    if target_qubit >= n {
        return Err(Error::QubitOutOfRange {
            index: target_qubit,
            n_qubits: n,
        });
    }
    let mut out = rho.clone();
    if !ch.is_identity() {
        apply_superop_1q(out.matrix_mut(), n, target_qubit, &ch.superop());
    }
    Ok(out)
}
