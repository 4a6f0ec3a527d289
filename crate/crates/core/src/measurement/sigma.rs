//! Added noise of the σ-deformed network on its best quadratures.

use crate::error::{Error, Result};
use crate::fock::smear::SIGMA_RANGE;
use crate::network::{run_cloner, BackendConfig, CloneInput, CloningNetworkSpec, FOCK_LAMBDA_MAX};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaReport {
    pub sigma: f64,
    pub lambda: f64,
    /// Quadrature angle `φ` with `tan φ = σ²`.
    pub angle: f64,
    /// Variance of `X_c(φ)` and `X_a(−φ)` above vacuum, vacuum input.
    pub added_noise_c: f64,
    pub added_noise_a: f64,
}

impl SigmaReport {
    /// Large-λ value `σ²/(2(1 + σ⁴))`.
    pub fn asymptotic_noise(&self) -> f64 {
        let s2 = self.sigma * self.sigma;
        s2 / (2.0 * (1.0 + s2 * s2))
    }
}

pub fn sigma_variant_report(sigma: f64, lambda: f64) -> Result<SigmaReport> {
    if !(sigma >= SIGMA_RANGE.0 && sigma <= SIGMA_RANGE.1) {
        return Err(Error::Unsupported(format!(
            "sigma must lie in [{}, {}], got {sigma}",
            SIGMA_RANGE.0, SIGMA_RANGE.1
        )));
    }
    if !(lambda > 0.0 && lambda <= FOCK_LAMBDA_MAX) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0, {FOCK_LAMBDA_MAX}], got {lambda}")));
    }
    let spec = CloningNetworkSpec::new(lambda, sigma)?;
    let result = run_cloner(&CloneInput::Coherent(num_complex::Complex64::new(0.0, 0.0)), &spec, &BackendConfig::Gaussian)?;
    let angle = (sigma * sigma).atan();
    let (_, vc) = result.clone_c.quadrature_moments(angle)?;
    let (_, va) = result.clone_a.quadrature_moments(-angle)?;
    Ok(SigmaReport { sigma, lambda, angle, added_noise_c: vc - 0.25, added_noise_a: va - 0.25 })
}
