//! The three-amplifier cloning network and its two simulation backends.
//!
//! Modes are ordered `(c, a, b)`: `c` carries the input and the first clone,
//! `a` the second clone and `b` the ancilla. The network applies, right to
//! left, `e^{s₃C} e^{s₂A} e^{s₁C}` with `s₁ = atanh(1/3) − λ`, `s₂ = 2e^{−λ}`
//! and `s₃ = λ`. The `atanh(1/3)` part of `s₁` prepares the twin beam on
//! `(a, b)` from vacuum.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::network::{apply_network_fock, Evaluation, TruncationReport};
use crate::fock::operators::{MODE_A, MODE_B, MODE_C};
use crate::fock::smear::{sigma_twin_beam, sigma_twin_beam_covariance, SIGMA_RANGE};
use crate::fock::{reduced_density, DensityMatrix, FockVector};
use crate::gaussian::{GaussianState, SymplecticTransform};

/// Largest accepted amplification parameter.
pub const LAMBDA_MAX: f64 = 12.0;

/// Largest λ accepted by the Fock backend.
pub const FOCK_LAMBDA_MAX: f64 = 6.0;

/// Twin-beam squeezing `atanh(1/3)`: total photon number 1/4.
pub fn twin_beam_squeezing() -> f64 {
    (1.0f64 / 3.0).atanh()
}

/// One gate `exp(strength · G)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub generator: crate::fock::operators::GeneratorKind,
    pub strength: f64,
}

/// Amplifier gains `Gₖ = cosh²(sₖ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloningNetworkSpec {
    lambda: f64,
    sigma: f64,
    stages: [Stage; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Gaussian,
    Fock,
}

/// Backend selection together with its numerical settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BackendConfig {
    Gaussian,
    Fock { truncation: usize, evaluation: Evaluation },
}

impl BackendConfig {
    pub fn fock(truncation: usize) -> Self {
        BackendConfig::Fock { truncation, evaluation: Evaluation::Folded }
    }

    pub fn backend(&self) -> Backend {
        match self {
            BackendConfig::Gaussian => Backend::Gaussian,
            BackendConfig::Fock { .. } => Backend::Fock,
        }
    }
}

/// State fed into mode `c`.
#[derive(Debug, Clone, PartialEq)]
pub enum CloneInput {
    Coherent(Complex64),
    Gaussian(GaussianState),
    Fock(FockVector),
}

/// Two-mode `(a, b)` state consumed by the network before its first gate.
#[derive(Debug, Clone, PartialEq)]
pub enum Preparation {
    Gaussian(GaussianState),
    Fock(FockVector),
}

/// Single-mode reduced state from either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum ReducedState {
    Gaussian(GaussianState),
    Fock(DensityMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NetworkOutput {
    Gaussian(GaussianState),
    Fock { state: FockVector, report: TruncationReport },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloneResult {
    pub backend: Backend,
    pub output: NetworkOutput,
    pub clone_c: ReducedState,
    pub clone_a: ReducedState,
    pub ancilla_b: ReducedState,
}

impl CloningNetworkSpec {
    /// Network for amplification `lambda`; `sigma ≠ 1` swaps the twin beam
    /// for the σ-deformed preparation, so stage one is `−λ`.
    pub fn new(lambda: f64, sigma: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= LAMBDA_MAX) {
            return Err(invalid(format!("lambda must lie in (0, {LAMBDA_MAX}], got {lambda}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        let s1 = if sigma == 1.0 { twin_beam_squeezing() - lambda } else { -lambda };
        Ok(Self::from_strengths(lambda, sigma, [s1, 2.0 * (-lambda).exp(), lambda]))
    }

    /// Network with arbitrary stage strengths.
    pub fn from_strengths(lambda: f64, sigma: f64, strengths: [f64; 3]) -> Self {
        use crate::fock::operators::GeneratorKind::{A, C};
        Self {
            lambda,
            sigma,
            stages: [
                Stage { generator: C, strength: strengths[0] },
                Stage { generator: A, strength: strengths[1] },
                Stage { generator: C, strength: strengths[2] },
            ],
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn stages(&self) -> &[Stage; 3] {
        &self.stages
    }

    pub fn strengths(&self) -> [f64; 3] {
        self.stages.map(|s| s.strength)
    }

    /// Whether the `(a, b)` preparation is folded into stage one.
    pub fn prepares_twin_beam_in_stage_one(&self) -> bool {
        self.sigma == 1.0
    }

    pub fn gains(&self) -> Gains {
        let [g1, g2, g3] = self.stages.map(|s| s.strength.cosh().powi(2));
        Gains { g1, g2, g3 }
    }
}

/// Shorthand for [`CloningNetworkSpec::new`].
pub fn network_from_lambda(lambda: f64, sigma: f64) -> Result<CloningNetworkSpec> {
    CloningNetworkSpec::new(lambda, sigma)
}

/// The `(a, b)` preparation for the given σ.
///
/// For σ = 1 this is the twin beam `e^{atanh(1/3)·C}|0,0⟩`; otherwise the
/// σ-deformed state, built numerically in the Fock basis or taken from its
/// closed-form covariance on the Gaussian backend.
pub fn preparation_state(sigma: f64, backend: &BackendConfig) -> Result<Preparation> {
    if !(SIGMA_RANGE.0..=SIGMA_RANGE.1).contains(&sigma) {
        return Err(Error::Unsupported(format!(
            "sigma {sigma} outside [{}, {}]",
            SIGMA_RANGE.0, SIGMA_RANGE.1
        )));
    }
    let r = twin_beam_squeezing();
    match (*backend, sigma == 1.0) {
        (BackendConfig::Gaussian, true) => {
            Ok(Preparation::Gaussian(GaussianState::vacuum(2)?.apply_two_mode_squeezer(0, 1, r)?))
        }
        (BackendConfig::Gaussian, false) => {
            Ok(Preparation::Gaussian(GaussianState::new(nalgebra::DVector::zeros(4), sigma_twin_beam_covariance(sigma)?)?))
        }
        (BackendConfig::Fock { truncation, .. }, true) => Ok(Preparation::Fock(twin_beam_fock(r, truncation)?)),
        (BackendConfig::Fock { truncation, .. }, false) => Ok(Preparation::Fock(sigma_twin_beam(sigma, truncation)?)),
    }
}

/// `e^{r(ab − a†b†)}|0,0⟩ = Σ (−tanh r)ⁿ/cosh r |n,n⟩`, truncated.
pub fn twin_beam_fock(r: f64, dim: usize) -> Result<FockVector> {
    let t = -r.tanh();
    let amps = nalgebra::DVector::from_fn(dim * dim, |i, _| {
        let (m, n) = (i / dim, i % dim);
        if m == n {
            Complex64::new(t.powi(n as i32) / r.cosh(), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    FockVector::new(vec![dim, dim], amps)
}

fn embed_with_preparation(spec: &CloningNetworkSpec, input: &GaussianState) -> Result<GaussianState> {
    if input.n_modes() != 1 {
        return Err(invalid("the Gaussian input must be a single-mode state"));
    }
    let prep = if spec.prepares_twin_beam_in_stage_one() {
        GaussianState::vacuum(2)?
    } else {
        match preparation_state(spec.sigma, &BackendConfig::Gaussian)? {
            Preparation::Gaussian(g) => g,
            Preparation::Fock(_) => unreachable!("Gaussian backend requested"),
        }
    };
    let mean = nalgebra::DVector::from_iterator(6, input.mean().iter().chain(prep.mean().iter()).copied());
    let mut cov = nalgebra::DMatrix::zeros(6, 6);
    cov.view_mut((0, 0), (2, 2)).copy_from(input.cov());
    cov.view_mut((2, 2), (4, 4)).copy_from(prep.cov());
    GaussianState::new(mean, cov)
}

fn gaussian_network(spec: &CloningNetworkSpec, input: GaussianState) -> Result<GaussianState> {
    let mut s = embed_with_preparation(spec, &input)?;
    // Folded as in the Fock backend: e^{s3 C} e^{s2 A} e^{s1 C} equals
    // exp(s2(cosh s3·A + sinh s3·B))·e^{(s1+s3)C}. Applying the stages one by
    // one multiplies matrices with entries ~e^{λ} that nearly cancel, which
    // costs about 2λ/ln 10 digits in the clone covariances.
    let [s1, s2, s3] = spec.strengths();
    s = s.apply_two_mode_squeezer(MODE_A, MODE_B, s1 + s3)?;
    let k_a = SymplecticTransform::two_mode_squeezer_generator(3, MODE_B, MODE_C)?;
    let k_b = SymplecticTransform::beam_splitter_generator(3, MODE_A, MODE_C)?;
    let rotated = k_a * s3.cosh() + k_b * s3.sinh();
    s.apply(&SymplecticTransform::from_generator(&rotated, s2)?)
}

/// The three stages applied one after another, without folding. Loses
/// precision at large λ; kept as an independent reference.
pub fn gaussian_network_stagewise(spec: &CloningNetworkSpec, input: &GaussianState) -> Result<GaussianState> {
    let mut s = embed_with_preparation(spec, input)?;
    let [s1, s2, s3] = spec.strengths();
    s = s.apply_two_mode_squeezer(MODE_A, MODE_B, s1)?;
    s = s.apply_two_mode_squeezer(MODE_B, MODE_C, s2)?;
    s.apply_two_mode_squeezer(MODE_A, MODE_B, s3)
}

/// Run the network on `input` (mode `c`) with the `(a, b)` preparation.
pub fn run_cloner(input: &CloneInput, spec: &CloningNetworkSpec, backend: &BackendConfig) -> Result<CloneResult> {
    match backend {
        BackendConfig::Gaussian => {
            let g = match input {
                CloneInput::Coherent(alpha) => GaussianState::coherent(*alpha),
                CloneInput::Gaussian(g) => g.clone(),
                CloneInput::Fock(_) => {
                    return Err(invalid("the Gaussian backend needs a coherent or Gaussian input"));
                }
            };
            let out = gaussian_network(spec, g)?;
            Ok(CloneResult {
                backend: Backend::Gaussian,
                clone_c: ReducedState::Gaussian(out.reduce(&[MODE_C])?),
                clone_a: ReducedState::Gaussian(out.reduce(&[MODE_A])?),
                ancilla_b: ReducedState::Gaussian(out.reduce(&[MODE_B])?),
                output: NetworkOutput::Gaussian(out),
            })
        }
        BackendConfig::Fock { truncation, evaluation } => {
            if spec.lambda > FOCK_LAMBDA_MAX {
                return Err(invalid(format!(
                    "the Fock backend supports lambda <= {FOCK_LAMBDA_MAX}, got {}",
                    spec.lambda
                )));
            }
            let d = *truncation;
            let phi = match input {
                CloneInput::Coherent(alpha) => FockVector::coherent(d, *alpha)?,
                CloneInput::Fock(v) if v.dims().len() == 1 && v.dims()[0] == d => v.clone(),
                CloneInput::Fock(v) => {
                    return Err(invalid(format!("Fock input dims {:?} do not match truncation {d}", v.dims())));
                }
                CloneInput::Gaussian(_) => {
                    return Err(invalid("the Fock backend takes a coherent or Fock-vector input"));
                }
            };
            let prep = if spec.prepares_twin_beam_in_stage_one() {
                FockVector::vacuum(vec![d, d])?
            } else {
                match preparation_state(spec.sigma, backend)? {
                    Preparation::Fock(v) => v,
                    Preparation::Gaussian(_) => unreachable!("Fock backend requested"),
                }
            };
            let (state, report) = apply_network_fock(spec, &phi.tensor(&prep), *evaluation)?;
            Ok(CloneResult {
                backend: Backend::Fock,
                clone_c: ReducedState::Fock(reduced_density(&state, MODE_C)?),
                clone_a: ReducedState::Fock(reduced_density(&state, MODE_A)?),
                ancilla_b: ReducedState::Fock(reduced_density(&state, MODE_B)?),
                output: NetworkOutput::Fock { state, report },
            })
        }
    }
}

impl ReducedState {
    pub fn quadrature_moments(&self, phase: f64) -> Result<(f64, f64)> {
        match self {
            ReducedState::Gaussian(g) => g.quadrature_moments(0, phase),
            ReducedState::Fock(r) => r.quadrature_moments(phase),
        }
    }

    pub fn fidelity_with_coherent(&self, alpha: Complex64) -> Result<f64> {
        match self {
            ReducedState::Gaussian(g) => g.fidelity_with_coherent(alpha),
            ReducedState::Fock(r) => r.fidelity_with_coherent(alpha),
        }
    }

    pub fn mean_photon_number(&self) -> Result<f64> {
        match self {
            ReducedState::Gaussian(g) => g.mean_photon_number(0),
            ReducedState::Fock(r) => r.mean_photon_number(),
        }
    }

    /// `(⟨x⟩, ⟨y⟩)`.
    pub fn mean(&self) -> Result<(f64, f64)> {
        let (x, _) = self.quadrature_moments(0.0)?;
        let (y, _) = self.quadrature_moments(std::f64::consts::FRAC_PI_2)?;
        Ok((x, y))
    }

    pub fn density(&self) -> Option<&DensityMatrix> {
        match self {
            ReducedState::Fock(r) => Some(r),
            ReducedState::Gaussian(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_strengths_and_gains() {
        let s = network_from_lambda(2.0, 1.0).unwrap();
        let [s1, s2, s3] = s.strengths();
        assert_eq!(s1, twin_beam_squeezing() - 2.0);
        assert_eq!(s2, 2.0 * (-2.0f64).exp());
        assert_eq!(s3, 2.0);
        assert!((s.gains().g3 - 14.154).abs() < 1e-3);
        let at_prep = network_from_lambda(twin_beam_squeezing(), 1.0).unwrap();
        assert_eq!(at_prep.gains().g1, 1.0);
        assert!((network_from_lambda(12.0, 1.0).unwrap().gains().g2 - 1.0) < 1e-9);
    }

    #[test]
    fn lambda_bounds() {
        assert!(network_from_lambda(0.0, 1.0).is_err());
        assert!(network_from_lambda(-1.0, 1.0).is_err());
        assert!(network_from_lambda(12.5, 1.0).is_err());
        assert!(network_from_lambda(f64::NAN, 1.0).is_err());
        assert!(network_from_lambda(1.0, 0.0).is_err());
        assert!(network_from_lambda(12.0, 1.0).is_ok());
    }

    #[test]
    fn twin_beam_preparations_agree() {
        let g = match preparation_state(1.0, &BackendConfig::Gaussian).unwrap() {
            Preparation::Gaussian(g) => g,
            _ => unreachable!(),
        };
        let n = g.mean_photon_number(0).unwrap() + g.mean_photon_number(1).unwrap();
        assert!((n - 0.25).abs() < 1e-15);
        let v = twin_beam_fock(twin_beam_squeezing(), 20).unwrap();
        for k in 0..5 {
            let want = (2.0 * 2f64.sqrt() / 3.0) * (-1.0f64 / 3.0).powi(k);
            assert!((v.amplitudes()[k as usize * 21].re - want).abs() < 1e-15);
        }
        assert!(matches!(preparation_state(0.1, &BackendConfig::Gaussian), Err(Error::Unsupported(_))));
    }

    #[test]
    fn folded_gaussian_matches_stagewise() {
        let spec = CloningNetworkSpec::new(2.0, 1.0).unwrap();
        let input = GaussianState::coherent(Complex64::new(0.4, -0.9));
        let folded = gaussian_network(&spec, input.clone()).unwrap();
        let staged = gaussian_network_stagewise(&spec, &input).unwrap();
        assert!((folded.cov() - staged.cov()).amax() < 1e-11);
        assert!((folded.mean() - staged.mean()).amax() < 1e-12);
    }

    #[test]
    fn backend_input_mismatch() {
        let spec = network_from_lambda(1.0, 1.0).unwrap();
        let v = FockVector::vacuum(vec![8]).unwrap();
        assert!(run_cloner(&CloneInput::Fock(v), &spec, &BackendConfig::Gaussian).is_err());
        let g = GaussianState::vacuum(1).unwrap();
        assert!(run_cloner(&CloneInput::Gaussian(g), &spec, &BackendConfig::fock(8)).is_err());
        let far = network_from_lambda(7.0, 1.0).unwrap();
        assert!(run_cloner(&CloneInput::Coherent(Complex64::new(0.0, 0.0)), &far, &BackendConfig::fock(8)).is_err());
    }
}
