//! Closed-form input/output moment relations of the network.

use crate::error::{invalid, Result};
use crate::network::twin_beam_squeezing;

/// First and second moments of `X` and `Y` on the input mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputMoments {
    pub mean_x: f64,
    pub mean_y: f64,
    pub second_x: f64,
    pub second_y: f64,
}

impl InputMoments {
    pub fn coherent(alpha: num_complex::Complex64) -> Self {
        Self {
            mean_x: alpha.re,
            mean_y: alpha.im,
            second_x: alpha.re * alpha.re + 0.25,
            second_y: alpha.im * alpha.im + 0.25,
        }
    }

    pub fn var_x(&self) -> f64 {
        self.second_x - self.mean_x * self.mean_x
    }

    pub fn var_y(&self) -> f64 {
        self.second_y - self.mean_y * self.mean_y
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub lambda: f64,
    pub input: InputMoments,
    /// `⟨X_c⟩` and `⟨Y_a⟩` on the clones.
    pub mean_xc: f64,
    pub mean_ya: f64,
    pub second_xc: f64,
    pub second_ya: f64,
    pub var_xc: f64,
    pub var_ya: f64,
    /// Output variance minus input variance.
    pub added_x: f64,
    pub added_y: f64,
    pub variance_product: f64,
}

/// Output moments of `X_c` and `Y_a` for an arbitrary input, with
/// `ε = 2e^{−λ}` and `λ′ = λ − atanh(1/3)`.
pub fn expected_moments(lambda: f64, input: InputMoments) -> Result<MomentReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    if input.var_x() < 0.0 || input.var_y() < 0.0 {
        return Err(invalid("second moments below the squared means"));
    }
    let r0 = twin_beam_squeezing();
    let eps = 2.0 * (-lambda).exp();
    let lp = lambda - r0;
    let (se, ce) = (eps.sinh(), eps.cosh());
    let sl = lambda.sinh();
    let (slp, clp) = (lp.sinh(), lp.cosh());
    let cm1 = 2.0 * (0.5 * eps).sinh().powi(2); // cosh ε − 1
    // cosh λ cosh λ′ − sinh λ sinh λ′ cosh ε and
    // sinh λ cosh λ′ cosh ε − cosh λ sinh λ′ without cancellation
    let k1 = r0.cosh() - sl * slp * cm1;
    let k2 = r0.sinh() + sl * clp * cm1;

    let mean_xc = ce * input.mean_x;
    let gain_y = sl * se;
    let mean_ya = gain_y * input.mean_y;
    let second_xc = ce * ce * input.second_x + 0.25 * se * se * (2.0 * slp * slp + 1.0);
    let second_ya = gain_y * gain_y * input.second_y + 0.25 * (k1 * k1 + k2 * k2);
    let var_xc = second_xc - mean_xc * mean_xc;
    let var_ya = second_ya - mean_ya * mean_ya;
    Ok(MomentReport {
        lambda,
        input,
        mean_xc,
        mean_ya,
        second_xc,
        second_ya,
        var_xc,
        var_ya,
        added_x: var_xc - input.var_x(),
        added_y: var_ya - input.var_y(),
        variance_product: var_xc * var_ya,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn literal_form_agrees_at_moderate_lambda() {
        let lambda: f64 = 1.7;
        let inp = InputMoments { mean_x: 0.3, mean_y: -0.8, second_x: 0.5, second_y: 0.9 };
        let r = expected_moments(lambda, inp).unwrap();
        let eps = 2.0 * (-lambda).exp();
        let lp = lambda - (1.0f64 / 3.0).atanh();
        let (sl, cl) = (lambda.sinh(), lambda.cosh());
        let a = cl * lp.cosh() - sl * lp.sinh() * eps.cosh();
        let b = sl * lp.cosh() * eps.cosh() - cl * lp.sinh();
        let want = (sl * eps.sinh()).powi(2) * 0.9 + 0.25 * (a * a + b * b);
        assert!((r.second_ya - want).abs() < 1e-12);
    }

    #[test]
    fn large_lambda_adds_one_vacuum_unit() {
        let r = expected_moments(10.0, InputMoments::coherent(Complex64::new(1.0, 2.0))).unwrap();
        assert!((r.added_x - 0.25).abs() < 1e-7);
        assert!((r.added_y - 0.25).abs() < 1e-7);
        assert!((r.mean_ya - 2.0).abs() < 1e-7);
    }

    #[test]
    fn rejects_impossible_input() {
        let inp = InputMoments { mean_x: 1.0, mean_y: 0.0, second_x: 0.5, second_y: 0.25 };
        assert!(expected_moments(2.0, inp).is_err());
    }
}
