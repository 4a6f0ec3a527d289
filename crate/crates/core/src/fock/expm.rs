//! Matrix exponentials by scaling and squaring with a truncated Taylor core.
//!
//! Truncated bosonic generators are non-normal at the Fock edge, so no
//! eigendecomposition is used anywhere.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::sparse::CsrMatrix;
use crate::error::{invalid, Result};

/// Norm the scaled matrix is reduced below before the Taylor core.
const SCALED_NORM: f64 = 0.5;
const MAX_TERMS: usize = 60;
const TERM_TOL: f64 = 1e-17;

fn dense_one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(a)` for a dense square matrix.
pub fn matrix_exponential(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if a.nrows() != a.ncols() {
        return Err(invalid(format!("matrix exponential needs a square matrix, got {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(invalid("matrix has non-finite entries"));
    }
    let n = a.nrows();
    let norm = dense_one_norm(a);
    let squarings = if norm > SCALED_NORM { (norm / SCALED_NORM).log2().ceil() as i32 } else { 0 };
    let b = a * Complex64::new(0.5f64.powi(squarings), 0.0);

    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=MAX_TERMS {
        term = &term * &b / Complex64::new(k as f64, 0.0);
        result += &term;
        if term.camax() <= TERM_TOL * result.camax() {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    Ok(result)
}

/// `exp(t·a)·v` without forming the exponential.
///
/// The interval is split into steps with `|h|·‖a‖₁ ≤ 2`, and each step sums
/// the Taylor series of the action until the terms stop contributing.
pub fn expm_multiply(a: &CsrMatrix, v: &DVector<Complex64>, t: f64) -> Result<DVector<Complex64>> {
    if a.nrows() != a.ncols() || a.ncols() != v.len() {
        return Err(invalid(format!(
            "shape mismatch: {}x{} operator on vector of length {}",
            a.nrows(),
            a.ncols(),
            v.len()
        )));
    }
    if !t.is_finite() {
        return Err(invalid(format!("non-finite exponent scale {t}")));
    }
    let scaled = a.one_norm() * t.abs();
    if !scaled.is_finite() {
        return Err(invalid("operator has non-finite entries"));
    }
    if scaled == 0.0 {
        return Ok(v.clone());
    }
    let steps = (scaled / 2.0).ceil().max(1.0) as usize;
    let h = Complex64::new(t / steps as f64, 0.0);
    let mut x = v.clone();
    for _ in 0..steps {
        let mut acc = x.clone();
        let mut term = x;
        let mut small = 0;
        for k in 1..=MAX_TERMS {
            term = a.matvec(&term) * (h / k as f64);
            acc += &term;
            // two consecutive negligible terms, since odd/even terms can vanish separately
            if term.norm() <= TERM_TOL * acc.norm() {
                small += 1;
                if small == 2 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        x = acc;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let z = DMatrix::<Complex64>::zeros(5, 5);
        assert_eq!(matrix_exponential(&z).unwrap(), DMatrix::identity(5, 5));
    }

    #[test]
    fn rotation_generator() {
        // exp(θ [[0,1],[-1,0]]) is a rotation
        let th = 2.7;
        let g = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(th, 0.0), c(-th, 0.0), c(0.0, 0.0)]);
        let e = matrix_exponential(&g).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[c(th.cos(), 0.0), c(th.sin(), 0.0), c(-th.sin(), 0.0), c(th.cos(), 0.0)]);
        assert!((e - want).camax() < 1e-14);
    }

    #[test]
    fn agrees_with_nalgebra_exp() {
        let a = DMatrix::from_fn(6, 6, |r, k| c(((r * 7 + k * 3) % 5) as f64 - 2.0, ((r + 2 * k) % 3) as f64 * 0.7));
        let ours = matrix_exponential(&a).unwrap();
        let theirs = a.clone().exp();
        assert!((&ours - &theirs).camax() < 1e-9 * theirs.camax(), "{}", (&ours - &theirs).camax());
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = DMatrix::<Complex64>::zeros(2, 2);
        a[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matrix_exponential(&a).is_err());
        assert!(matrix_exponential(&DMatrix::<Complex64>::zeros(2, 3)).is_err());
    }

    #[test]
    fn action_matches_dense_exponential() {
        let d = DMatrix::from_fn(8, 8, |r, k| {
            if r.abs_diff(k) == 1 {
                c(((r + k) as f64).sqrt(), 0.3 * r as f64 - 0.2 * k as f64)
            } else {
                c(0.0, 0.0)
            }
        });
        let s = CsrMatrix::from_dense(&d);
        let v = DVector::from_fn(8, |i, _| c(1.0 / (1.0 + i as f64), 0.1 * i as f64));
        for t in [0.0, 0.4, -1.3, 3.0] {
            let want = matrix_exponential(&(&d * c(t, 0.0))).unwrap() * &v;
            let got = expm_multiply(&s, &v, t).unwrap();
            assert!((&got - &want).camax() < 1e-11 * want.camax(), "t={t}");
        }
    }
}
