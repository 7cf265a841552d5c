use super::eig::{nuclear_norm, sqrt_psd};
use super::state::DensityMatrix;
use super::Tolerances;
use crate::error::{Error, Result};

/// Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
///
/// Evaluated as the squared nuclear norm of sqrt(rho) sqrt(sigma), which has the
/// same value but keeps near-zero singular values accurate for low-rank states.
/// Both square roots clip slightly negative eigenvalues to zero.
pub fn uhlmann_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    let slack = Tolerances::default().psd_slack;
    let sqrt_rho = sqrt_psd(rho.matrix(), slack)?;
    let sqrt_sigma = sqrt_psd(sigma.matrix(), slack)?;
    let root_fidelity = nuclear_norm(&sqrt_rho.matmul(&sqrt_sigma));
    Ok((root_fidelity * root_fidelity).clamp(0.0, 1.0))
}

/// sqrt(2 (1 - sqrt(F))).
pub fn bures_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = uhlmann_fidelity(rho, sigma)?;
    Ok(bures_from_fidelity(f))
}

pub fn bures_from_fidelity(f: f64) -> f64 {
    (2.0 * (1.0 - f.sqrt())).max(0.0).sqrt()
}
