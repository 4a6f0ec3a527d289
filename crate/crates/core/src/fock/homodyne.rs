//! Quadrature-basis projections for direct measurement statistics.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::FockVector;
use crate::error::{invalid, Result};

/// `⟨x|n⟩` for `n < dim`, where `x` is the eigenvalue of `(c + c†)/2`.
///
/// These are Hermite functions of `q = √2·x`, rescaled so that
/// `∫|⟨x|n⟩|² dx = 1`.
pub fn quadrature_wavefunctions(x: f64, dim: usize) -> Vec<f64> {
    let q = std::f64::consts::SQRT_2 * x;
    let scale = 2f64.powf(0.25);
    let mut h = vec![0.0; dim];
    if dim == 0 {
        return h;
    }
    h[0] = std::f64::consts::PI.powf(-0.25) * (-0.5 * q * q).exp();
    if dim > 1 {
        h[1] = std::f64::consts::SQRT_2 * q * h[0];
    }
    for n in 2..dim {
        let nf = n as f64;
        h[n] = (2.0 / nf).sqrt() * q * h[n - 1] - ((nf - 1.0) / nf).sqrt() * h[n - 2];
    }
    h.iter_mut().for_each(|v| *v *= scale);
    h
}

/// Rows `⟨x_φ|n⟩ = e^{−inφ}⟨x|n⟩` for every `x` in `xs`.
fn rotated_rows(xs: &[f64], dim: usize, phase: f64) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(xs.len(), dim);
    for (i, &x) in xs.iter().enumerate() {
        for (n, h) in quadrature_wavefunctions(x, dim).into_iter().enumerate() {
            m[(i, n)] = Complex64::from_polar(h, -(n as f64) * phase);
        }
    }
    m
}

/// Joint density of the rotated quadratures `X_c(φ)` and `X_a(θ)` of a
/// three-mode state `(c, a, b)`, with mode `b` traced out. Entry `(i, j)`
/// is the density at `(xs[i], ys[j])`.
pub fn joint_quadrature_density(state: &FockVector, phi: f64, theta: f64, xs: &[f64], ys: &[f64]) -> Result<DMatrix<f64>> {
    let dims = state.dims();
    if dims.len() != 3 {
        return Err(invalid(format!("expected a three-mode state, got dims {dims:?}")));
    }
    let (dc, da, db) = (dims[0], dims[1], dims[2]);
    let f = rotated_rows(xs, dc, phi);
    let g = rotated_rows(ys, da, theta);
    let amp = state.amplitudes();
    let mut out = DMatrix::zeros(xs.len(), ys.len());
    for b in 0..db {
        let m = DMatrix::from_fn(dc, da, |c, a| amp[(c * da + a) * db + b]);
        let proj = &f * m * g.transpose();
        out += proj.map(|v| v.norm_sqr());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavefunctions_are_orthonormal() {
        let h = 0.01;
        let dim = 12;
        let mut gram = DMatrix::<f64>::zeros(dim, dim);
        for i in -1000..=1000 {
            let w = quadrature_wavefunctions(i as f64 * h, dim);
            for m in 0..dim {
                for n in 0..dim {
                    gram[(m, n)] += w[m] * w[n] * h;
                }
            }
        }
        assert!((gram - DMatrix::identity(dim, dim)).amax() < 1e-10);
    }

    #[test]
    fn vacuum_quadrature_variance_is_quarter() {
        let h = 0.01;
        let (mut m2, mut tot) = (0.0, 0.0);
        for i in -600..=600 {
            let x = i as f64 * h;
            let p = quadrature_wavefunctions(x, 1)[0].powi(2);
            m2 += p * x * x * h;
            tot += p * h;
        }
        assert!((tot - 1.0).abs() < 1e-12);
        assert!((m2 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn coherent_product_density() {
        let (a0, a1) = (Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.6));
        let s = FockVector::coherent(25, a0)
            .unwrap()
            .tensor(&FockVector::coherent(25, a1).unwrap())
            .tensor(&FockVector::vacuum(vec![3]).unwrap());
        let (phi, theta) = (0.4, 1.9);
        let d = joint_quadrature_density(&s, phi, theta, &[0.1, 0.7], &[-0.2]).unwrap();
        let gauss = |x: f64, m: f64| (2.0 / std::f64::consts::PI).sqrt() * (-2.0 * (x - m).powi(2)).exp();
        let m0 = a0.re * phi.cos() + a0.im * phi.sin();
        let m1 = a1.re * theta.cos() + a1.im * theta.sin();
        for (i, x) in [0.1, 0.7].into_iter().enumerate() {
            assert!((d[(i, 0)] - gauss(x, m0) * gauss(-0.2, m1)).abs() < 1e-12);
        }
    }
}
