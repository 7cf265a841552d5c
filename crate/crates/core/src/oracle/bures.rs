//! QFIM as the Hessian of 4 (1 - sqrt F(rho(theta), rho(theta + d))) at d = 0,
//! the convention under which pure states give 4 Re[<di|dj> - <di|psi><psi|dj>].

use nalgebra::DMatrix;

use super::reference::reference_state;
use crate::circuits::{CircuitSpec, NoiseSetting};
use crate::error::{Error, Result};
use crate::qcore::uhlmann_fidelity;
use crate::qfim::QfimResult;

pub const BURES_STEP: f64 = 1e-3;
/// Largest parameter count accepted; cost grows as P^2 fidelity evaluations.
pub const MAX_PARAMS: usize = 8;
const MAX_ASYMMETRY: f64 = 1e-4;

pub fn bures_hessian_qfim(
    spec: &CircuitSpec,
    x: &[f64],
    theta: &[f64],
    noise: &NoiseSetting,
    step: f64,
) -> Result<QfimResult> {
    let p = spec.n_params();
    if p > MAX_PARAMS {
        return Err(Error::InvalidArgument(format!(
            "Bures-Hessian oracle takes at most {MAX_PARAMS} parameters, got {p}"
        )));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::StepOutOfRange { step });
    }
    let rho = reference_state(spec, x, theta, noise)?;
    let contrast = |moves: &[(usize, f64)]| -> Result<f64> {
        let mut shifted = theta.to_vec();
        for &(i, d) in moves {
            shifted[i] += d;
        }
        let sigma = reference_state(spec, x, &shifted, noise)?;
        Ok(4.0 * (1.0 - uhlmann_fidelity(&rho, &sigma)?.sqrt()))
    };

    let h = step;
    let g0 = contrast(&[])?;
    let mut hess = DMatrix::zeros(p, p);
    for i in 0..p {
        hess[(i, i)] = (contrast(&[(i, h)])? + contrast(&[(i, -h)])? - 2.0 * g0) / (h * h);
        for j in 0..p {
            if j == i {
                continue;
            }
            let mut acc = 0.0;
            for (si, sj, sign) in [(h, h, 1.0), (h, -h, -1.0), (-h, h, -1.0), (-h, -h, 1.0)] {
                acc += sign * contrast(&[(i, si), (j, sj)])?;
            }
            hess[(i, j)] = acc / (4.0 * h * h);
        }
    }
    let asym = (&hess - hess.transpose()).abs().max();
    if asym > MAX_ASYMMETRY {
        return Err(Error::IllConditioned(format!(
            "Hessian asymmetry {asym:e} at step {step:e}"
        )));
    }
    QfimResult::from_matrix((&hess + hess.transpose()) * 0.5)
}
