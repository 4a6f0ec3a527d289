//! Gaussian displacement mixtures evaluated by tensor Gauss–Hermite rules.
//!
//! Matrix elements of `D(z)` are `e^{−|z|²/2}` times a polynomial in
//! `(x, y)`. Folding that Gaussian factor into the quadrature weight leaves a
//! pure polynomial integrand, so a rule with enough nodes is exact.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::density::DensityMatrix;
use super::operators::displacement_polynomial;
use super::FockVector;
use crate::error::{invalid, Error, Result};
use crate::quadrature::gauss_hermite;

/// Fewest nodes per axis accepted by the smearing routines.
pub const MIN_NODES: usize = 41;

/// Largest trace lost by a smeared mixture before it is rejected.
pub const TRACE_TOL: f64 = 1e-4;

/// Supported squeezing range of the σ-deformed twin beam.
pub const SIGMA_RANGE: (f64, f64) = (0.25, 4.0);

/// Centered Gaussian weight `|f(z)|²` with standard deviations `sx`, `sy`
/// along `Re z` and `Im z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearKernel {
    pub sx: f64,
    pub sy: f64,
}

impl SmearKernel {
    pub fn new(sx: f64, sy: f64) -> Result<Self> {
        if !(sx > 0.0 && sy > 0.0 && sx.is_finite() && sy.is_finite()) {
            return Err(invalid(format!("kernel widths must be positive, got ({sx}, {sy})")));
        }
        Ok(Self { sx, sy })
    }

    /// `|f|² = (2/π) e^{−2|z|²}`.
    pub fn symmetric() -> Self {
        Self { sx: 0.5, sy: 0.5 }
    }

    /// `|f|² = (2/π) exp(−2x²/σ² − 2σ²y²)`.
    pub fn sigma(sigma: f64) -> Result<Self> {
        Self::new(0.5 * sigma, 0.5 / sigma)
    }

    /// Variance added to each quadrature of a smeared state.
    pub fn added_variances(&self) -> (f64, f64) {
        (self.sx * self.sx, self.sy * self.sy)
    }
}

/// Tensor rule for `∫ g(x, y) exp(−ax·x² − ay·y²) dx dy`, nodes as complex `x + iy`.
fn scaled_rule(nodes: usize, ax: f64, ay: f64) -> Vec<(Complex64, f64)> {
    let (t, w) = gauss_hermite(nodes);
    let (kx, ky) = (ax.sqrt(), ay.sqrt());
    let mut out = Vec::with_capacity(nodes * nodes);
    for (ti, wi) in t.iter().zip(&w) {
        for (tj, wj) in t.iter().zip(&w) {
            out.push((Complex64::new(ti / kx, tj / ky), wi * wj / (kx * ky)));
        }
    }
    out
}

/// `∫ d²z |f(z)|² D†(z) ρ D(z)` on the lowest `out_dim` levels.
///
/// `nodes` is raised to `out_dim + ρ.dim()` when smaller, which makes the
/// rule exact. Fails with [`Error::QuadratureTooCoarse`] when the result
/// loses more than [`TRACE_TOL`] of the input trace.
pub fn smeared_mixture(phi: &DensityMatrix, kernel: SmearKernel, out_dim: usize, nodes: usize) -> Result<DensityMatrix> {
    if phi.dims().len() != 1 {
        return Err(invalid("smearing acts on single-mode states"));
    }
    if nodes < MIN_NODES {
        return Err(invalid(format!("smearing needs at least {MIN_NODES} nodes per axis, got {nodes}")));
    }
    let in_dim = phi.dim();
    let n = nodes.max(out_dim + in_dim);
    let ax = 1.0 + 0.5 / (kernel.sx * kernel.sx);
    let ay = 1.0 + 0.5 / (kernel.sy * kernel.sy);
    let norm = 1.0 / (2.0 * std::f64::consts::PI * kernel.sx * kernel.sy);
    let rho = phi.matrix();
    // |f|² is even, so D†(z)ρD(z) can be replaced by D(z)ρD†(z)
    let acc = scaled_rule(n, ax, ay)
        .into_par_iter()
        .fold(
            || DMatrix::<Complex64>::zeros(out_dim, out_dim),
            |mut acc, (z, w)| {
                let p = displacement_polynomial(z, out_dim, in_dim);
                acc += (&p * rho * p.adjoint()) * Complex64::new(w * norm, 0.0);
                acc
            },
        )
        .reduce(|| DMatrix::zeros(out_dim, out_dim), |a, b| a + b);
    let out = DensityMatrix::single_mode(acc)?;
    let lost = phi.trace() - out.trace();
    if lost > TRACE_TOL {
        return Err(Error::QuadratureTooCoarse { trace_error: lost, limit: TRACE_TOL });
    }
    Ok(out)
}

/// Largest covariance error accepted from [`sigma_twin_beam`].
pub const SIGMA_PREP_TOL: f64 = 1e-3;

fn check_sigma(sigma: f64) -> Result<()> {
    if !(SIGMA_RANGE.0..=SIGMA_RANGE.1).contains(&sigma) {
        return Err(Error::Unsupported(format!(
            "sigma {sigma} outside [{}, {}]",
            SIGMA_RANGE.0, SIGMA_RANGE.1
        )));
    }
    Ok(())
}

/// Covariance of the σ-deformed twin beam on `(a, b)`, ordered
/// `(x_a, y_a, x_b, y_b)`.
///
/// `D_a(z)` shifts `u = x_a + x_b` by `Re z` and `v = y_a − y_b` by `Im z`,
/// and `Σ (−1)ⁿ |n, n⟩` has `u = v = 0`, so the state is the wavefunction
/// `f(u + iv)` in those commuting variables: `var u = sx²`, `var v = sy²`,
/// with the conjugate pairs `y_a + y_b` and `x_a − x_b` at minimum
/// uncertainty.
pub fn sigma_twin_beam_covariance(sigma: f64) -> Result<DMatrix<f64>> {
    check_sigma(sigma)?;
    let k = SmearKernel::sigma(sigma)?;
    let (vu, vv) = (k.sx * k.sx, k.sy * k.sy);
    let (vt, vw) = (0.25 / vu, 0.25 / vv);
    let mut cov = DMatrix::zeros(4, 4);
    for (i, j, val) in [
        (0, 0, (vu + vw) / 4.0),
        (2, 2, (vu + vw) / 4.0),
        (0, 2, (vu - vw) / 4.0),
        (1, 1, (vv + vt) / 4.0),
        (3, 3, (vv + vt) / 4.0),
        (1, 3, (vt - vv) / 4.0),
    ] {
        cov[(i, j)] = val;
        cov[(j, i)] = val;
    }
    Ok(cov)
}

/// Two-mode state `∝ ∫ d²z f(z) D_a(z) Σₙ (−1)ⁿ |n⟩_a|n⟩_b` with the
/// σ-deformed kernel, on dims `(dim, dim)` and normalized.
///
/// For σ = 1 this is the twin beam `(2√2/3) Σ (−1/3)ⁿ |n, n⟩`. The
/// displacement polynomials lose precision beyond roughly 40 levels, and
/// strongly deformed kernels need more levels than that, so the result is
/// checked against [`sigma_twin_beam_covariance`] and rejected with
/// [`Error::NotConverged`] when any entry is off by more than
/// [`SIGMA_PREP_TOL`].
pub fn sigma_twin_beam(sigma: f64, dim: usize) -> Result<FockVector> {
    check_sigma(sigma)?;
    super::check_dims(&[dim])?;
    let k = SmearKernel::sigma(sigma)?;
    // f = √|f|², times the e^{−|z|²/2} of the displacement elements
    let ax = 0.5 + 0.25 / (k.sx * k.sx);
    let ay = 0.5 + 0.25 / (k.sy * k.sy);
    let n = MIN_NODES.max(2 * dim);
    let chi = scaled_rule(n, ax, ay)
        .into_par_iter()
        .fold(
            || DMatrix::<Complex64>::zeros(dim, dim),
            |mut acc, (z, w)| {
                acc += displacement_polynomial(z, dim, dim) * Complex64::new(w, 0.0);
                acc
            },
        )
        .reduce(|| DMatrix::zeros(dim, dim), |a, b| a + b);
    // chi[(m, n)] multiplies |m⟩_a|n⟩_b
    let amps = nalgebra::DVector::from_fn(dim * dim, |i, _| {
        let (m, nb) = (i / dim, i % dim);
        let sign = if nb % 2 == 0 { 1.0 } else { -1.0 };
        chi[(m, nb)] * sign
    });
    let mut v = FockVector::new(vec![dim, dim], amps)?;
    v.normalize();
    let want = sigma_twin_beam_covariance(sigma)?;
    let got = super::network::gaussian_moments(&v)?;
    let deviation = (got.cov() - want).amax().max(got.mean().amax());
    if !(deviation <= SIGMA_PREP_TOL) {
        return Err(Error::NotConverged { what: format!("sigma twin beam at {dim} levels"), deviation, limit: SIGMA_PREP_TOL });
    }
    Ok(v)
}
