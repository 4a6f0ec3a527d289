//! Closed-form POVM of the joint quadrature measurement at finite λ.
//!
//! The outcome density is
//! `F(x, x′) = (1/4π)·(C|δ|²/√(CD − E²))·S†(ξ) D(αδ) ρ_t D†(αδ) S(ξ)`
//! with `ρ_t = (1 − t) Σ tⁿ |n⟩⟨n|`, `t = (C|δ|² − 2)/(C|δ|² + 2)`, and
//! `α = −(i/2)x + (Cx′ − Ex)/(2√(CD − E²))`.
//!
//! Conventions fixed against exact network statistics:
//! - `ε = −2e^{−λ}` inside this parameter block (the network itself runs
//!   with `+2e^{−λ}`); with the positive sign `|γ| < |β|` and `δ` is undefined.
//! - `S(ξ) = exp(½(ξ c†² − ξ* c²))`.
//! - Outcomes relate to the measured quadratures by
//!   `(x, x′) = (−X_c(φ), −X_a(θ))`.
//!
//! With these choices the density reproduces the exact joint statistics of
//! the network when `θ − φ = π/2`. For other angle differences it does not,
//! and results there should be treated as the formula's value only.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fock::operators::{displacement_matrix, squeeze_matrix};
use crate::fock::DensityMatrix;
use crate::network::twin_beam_squeezing;

/// Extra Fock levels kept above the input when squeezing it.
const SQUEEZE_MARGIN: usize = 40;
/// Squeeze matrices are exponentiated in a space this much larger still.
const SQUEEZE_WORK_MARGIN: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmParams {
    pub lambda: f64,
    pub phi: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub lambda_prime: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub delta: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
    pub xi: Complex64,
    pub thermal_base: f64,
}

/// Evaluate every closed-form parameter for `(λ, φ, θ)`.
pub fn povm_params(lambda: f64, phi: f64, theta: f64) -> Result<PovmParams> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let gap = theta - phi;
    if !(gap > 0.0 && gap < std::f64::consts::PI) {
        return Err(Error::Domain(format!("0 < theta - phi < pi violated: theta - phi = {gap}")));
    }
    let eps = -2.0 * (-lambda).exp();
    let lp = lambda - twin_beam_squeezing();
    let r0 = twin_beam_squeezing();
    let (se, ce) = (eps.sinh(), eps.cosh());
    let sl = lambda.sinh();
    let slp = lp.sinh();
    let half_eps = 2.0 * (0.5 * eps).sinh().powi(2); // cosh ε − 1
    // cosh λ cosh λ′ − sinh λ cosh ε sinh λ′, rearranged to avoid cancellation
    let k = r0.cosh() - sl * slp * half_eps;
    let c = (se * slp).powi(2) + 0.5 * se * se;
    let d = k * k + 0.5 * (sl * se).powi(2) - 0.5;
    let e = (phi - theta).cos() * (se * slp * k - 0.5 * ce * sl * se);
    let det = c * d - e * e;
    if !(det > 0.0) {
        return Err(Error::Domain(format!("CD - E^2 = {det:.6e} is not positive")));
    }
    let r = det.sqrt();
    let i = Complex64::i();
    let side = Complex64::from_polar(0.25 * sl * se * c / r, theta);
    let beta = Complex64::from_polar(0.25 * ce, phi) * (i + e / r) + side;
    let gamma = Complex64::from_polar(0.25 * ce, phi) * (-i + e / r) + side;
    let gap2 = gamma.norm_sqr() - beta.norm_sqr();
    if !(gap2 > 0.0) {
        return Err(Error::Domain(format!(
            "|gamma| > |beta| violated: |gamma| = {:.6e}, |beta| = {:.6e}",
            gamma.norm(),
            beta.norm()
        )));
    }
    let delta = -Complex64::from_polar(gap2.powf(-0.5), -gamma.arg());
    let xi = Complex64::from_polar((gamma * delta).norm().acosh(), gamma.arg() + beta.arg());
    let cd2 = c * delta.norm_sqr();
    Ok(PovmParams {
        lambda,
        phi,
        theta,
        epsilon: eps,
        lambda_prime: lp,
        c,
        d,
        e,
        delta,
        beta,
        gamma,
        xi,
        thermal_base: (cd2 - 2.0) / (cd2 + 2.0),
    })
}

impl PovmParams {
    pub fn sqrt_det(&self) -> f64 {
        (self.c * self.d - self.e * self.e).sqrt()
    }

    /// `α(x, x′) = −(i/2)x + (Cx′ − Ex)/(2√(CD − E²))`.
    pub fn alpha_of(&self, x: f64, x_prime: f64) -> Complex64 {
        Complex64::new((self.c * x_prime - self.e * x) / (2.0 * self.sqrt_det()), -0.5 * x)
    }

    /// `(1/4π)·C|δ|²/√(CD − E²)`.
    pub fn prefactor(&self) -> f64 {
        self.c * self.delta.norm_sqr() / (4.0 * std::f64::consts::PI * self.sqrt_det())
    }

    /// POVM outcome pair for measured quadrature values `X_c(φ)`, `X_a(θ)`.
    pub fn outcome_from_quadratures(xc: f64, xa: f64) -> (f64, f64) {
        (-xc, -xa)
    }
}

/// Outcome density for a fixed input, with the squeezed input cached.
#[derive(Debug, Clone)]
pub struct PovmDensity {
    params: PovmParams,
    squeezed: DMatrix<Complex64>,
    weights: Vec<f64>,
}

impl PovmDensity {
    pub fn new(params: PovmParams, input: &DensityMatrix) -> Result<Self> {
        if input.dims().len() != 1 {
            return Err(invalid("the POVM acts on single-mode states"));
        }
        let t = params.thermal_base;
        if !(t > -1.0 && t < 1.0) {
            return Err(Error::Domain(format!("thermal base {t:.6e} outside (-1, 1)")));
        }
        let d_in = input.dim();
        let work = d_in + SQUEEZE_MARGIN;
        let s = squeeze_matrix(params.xi, work, work + SQUEEZE_WORK_MARGIN)?;
        let s_cols = s.columns(0, d_in).into_owned();
        let squeezed = &s_cols * input.matrix() * s_cols.adjoint();
        // thermal weights (1 − t)tⁿ until they stop mattering
        let mut weights = Vec::new();
        let mut w = 1.0 - t;
        while weights.len() < work && w.abs() > 1e-17 {
            weights.push(w);
            w *= t;
        }
        Ok(Self { params, squeezed, weights })
    }

    pub fn params(&self) -> &PovmParams {
        &self.params
    }

    /// `Tr[ρ F(x, x′)]`.
    pub fn density(&self, x: f64, x_prime: f64) -> f64 {
        let beta = self.params.alpha_of(x, x_prime) * self.params.delta;
        let work = self.squeezed.nrows();
        let dm = displacement_matrix(beta, work, self.weights.len());
        let sd = &self.squeezed * &dm;
        let tr: f64 = self
            .weights
            .iter()
            .enumerate()
            .map(|(n, w)| w * dm.column(n).dotc(&sd.column(n)).re)
            .sum();
        self.params.prefactor() * tr
    }

    /// Density on the tensor grid `xs × ys`; entry `(i, j)` is at `(xs[i], ys[j])`.
    pub fn grid(&self, xs: &[f64], ys: &[f64]) -> DMatrix<f64> {
        let rows: Vec<Vec<f64>> = xs.par_iter().map(|&x| ys.iter().map(|&y| self.density(x, y)).collect()).collect();
        DMatrix::from_fn(xs.len(), ys.len(), |i, j| rows[i][j])
    }

    /// Probability of the cell `[x0, x0 + w) × [y0, y0 + w)`, by a `k × k`
    /// midpoint rule.
    pub fn cell_probability(&self, x0: f64, y0: f64, w: f64, k: usize) -> f64 {
        let h = w / k as f64;
        let mut p = 0.0;
        for u in 0..k {
            for v in 0..k {
                p += self.density(x0 + h * (u as f64 + 0.5), y0 + h * (v as f64 + 0.5));
            }
        }
        p * h * h
    }

    /// L¹ distance between the cell probabilities of this density and the
    /// empirical histogram of `outcomes` on `bins × bins` square cells over
    /// `[lo, hi)²`, together with the density's total mass on that window.
    pub fn histogram_l1(&self, outcomes: &[(f64, f64)], lo: f64, hi: f64, bins: usize) -> (f64, f64) {
        let w = (hi - lo) / bins as f64;
        let mut counts = vec![0usize; bins * bins];
        for &(x, y) in outcomes {
            let (i, j) = (((x - lo) / w).floor(), ((y - lo) / w).floor());
            if i >= 0.0 && j >= 0.0 && (i as usize) < bins && (j as usize) < bins {
                counts[i as usize * bins + j as usize] += 1;
            }
        }
        let n = outcomes.len() as f64;
        let cells: Vec<f64> = (0..bins * bins)
            .into_par_iter()
            .map(|k| self.cell_probability(lo + w * (k / bins) as f64, lo + w * (k % bins) as f64, w, 4))
            .collect();
        let l1 = cells.iter().zip(&counts).map(|(p, &c)| (p - c as f64 / n).abs()).sum();
        (l1, cells.iter().sum())
    }
}

/// One-shot evaluation of `Tr[ρ F(x, x′)]`.
pub fn povm_density(params: &PovmParams, x: f64, x_prime: f64, input: &DensityMatrix) -> Result<f64> {
    Ok(PovmDensity::new(*params, input)?.density(x, x_prime))
}
