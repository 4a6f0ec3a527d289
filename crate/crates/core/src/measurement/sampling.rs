//! Monte-Carlo sampling of joint clone quadratures from Gaussian outputs.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::fock::operators::{MODE_A, MODE_C};
use crate::network::{run_cloner, BackendConfig, CloneInput, CloneResult, CloningNetworkSpec, NetworkOutput};

/// Draw `n` pairs `(X_c(φ), X_a(θ))` from a Gaussian-backend result.
pub fn sample_joint_quadratures(result: &CloneResult, phi: f64, theta: f64, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let NetworkOutput::Gaussian(state) = &result.output else {
        return Err(Error::Unsupported("sampling needs a Gaussian-backend result".into()));
    };
    if n == 0 {
        return Err(invalid("sample count must be positive"));
    }
    let dim = 2 * state.n_modes();
    let mut u = DVector::zeros(dim);
    u[2 * MODE_C] = phi.cos();
    u[2 * MODE_C + 1] = phi.sin();
    let mut v = DVector::zeros(dim);
    v[2 * MODE_A] = theta.cos();
    v[2 * MODE_A + 1] = theta.sin();
    let (mu, mv, vu, vv, cuv) = state.linear_moments(&u, &v);
    // 2×2 Cholesky
    let l11 = vu.sqrt();
    let l21 = if l11 > 0.0 { cuv / l11 } else { 0.0 };
    let l22 = (vv - l21 * l21).max(0.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            (mu + l11 * z1, mv + l21 * z1 + l22 * z2)
        })
        .collect())
}

/// Sample mean, variance pair and covariance.
pub fn sample_moments(samples: &[(f64, f64)]) -> (f64, f64, f64, f64, f64) {
    let n = samples.len() as f64;
    let (mx, my) = samples.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (mx / n, my / n);
    let (vx, vy, c) = samples.iter().fold((0.0, 0.0, 0.0), |(a, b, c), (x, y)| {
        let (dx, dy) = (x - mx, y - my);
        (a + dx * dx, b + dy * dy, c + dx * dy)
    });
    (mx, my, vx / n, vy / n, c / n)
}

/// Largest deviation of the sampled `(X_c, Y_a)` moments from those of the
/// Husimi function of `|α⟩` (means `Re α`, `Im α`, variances ½, no
/// correlation). The pair is used as is: the second clone already carries
/// `+α` and both quadratures are on the same scale.
pub fn husimi_limit_check(alpha: Complex64, lambda: f64, n: usize, seed: u64) -> Result<f64> {
    if lambda < 4.0 {
        return Err(invalid(format!("the Husimi limit check needs lambda >= 4, got {lambda}")));
    }
    let spec = CloningNetworkSpec::new(lambda, 1.0)?;
    let result = run_cloner(&CloneInput::Coherent(alpha), &spec, &BackendConfig::Gaussian)?;
    let samples = sample_joint_quadratures(&result, 0.0, std::f64::consts::FRAC_PI_2, n, seed)?;
    let (mx, my, vx, vy, c) = sample_moments(&samples);
    Ok([mx - alpha.re, my - alpha.im, vx - 0.5, vy - 0.5, c]
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max))
}
