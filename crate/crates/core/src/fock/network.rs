//! Fock-space evaluation of the cloning network.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::{reduced_density_modes, trace_distance, DensityMatrix};
use super::operators::{beam_splitter_generator, build_generator, displacement_matrix, quadrature_operator, GeneratorKind, MODE_A, MODE_C};
use super::{FockOperator, FockVector};
use crate::error::{invalid, Error, Result};
use crate::gaussian::GaussianState;
use crate::network::{run_cloner, BackendConfig, CloneInput, CloneResult, CloningNetworkSpec, NetworkOutput};

/// Edge population that triggers a warning.
pub const EDGE_WARN: f64 = 1e-3;
/// Edge population that aborts the run.
pub const EDGE_LIMIT: f64 = 1e-2;

/// How the three gate exponentials are applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evaluation {
    /// `e^{s₃C}e^{s₂A}e^{s₁C} = exp(s₂(cosh s₃·A + sinh s₃·B))·e^{(s₁+s₃)C}`.
    ///
    /// Avoids the strongly amplified intermediate state between the stages,
    /// which no desk-scale truncation can hold once λ is large.
    #[default]
    Folded,
    /// Each gate in turn, right to left.
    StageByStage,
}

/// Weight that reached the outermost level of each mode, maximized over
/// every intermediate state of the evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationReport {
    pub edge_populations: Vec<f64>,
    pub final_norm: f64,
}

impl TruncationReport {
    pub fn max_edge_population(&self) -> f64 {
        self.edge_populations.iter().copied().fold(0.0, f64::max)
    }
}

fn track_edges(state: &FockVector, worst: &mut [f64]) -> Result<()> {
    for (m, w) in worst.iter_mut().enumerate() {
        *w = w.max(state.edge_population(m)?);
    }
    Ok(())
}

/// Apply the network gates to a three-mode state `(c, a, b)`.
///
/// Logs a warning when any mode carries more than [`EDGE_WARN`] on its top
/// level and fails with [`Error::TruncationOverflow`] above [`EDGE_LIMIT`].
pub fn apply_network_fock(
    spec: &CloningNetworkSpec,
    input: &FockVector,
    evaluation: Evaluation,
) -> Result<(FockVector, TruncationReport)> {
    let dims = input.dims().to_vec();
    if dims.len() != 3 {
        return Err(invalid(format!("network input must have three modes, got dims {dims:?}")));
    }
    let [s1, s2, s3] = spec.strengths();
    let a = build_generator(GeneratorKind::A, &dims)?;
    let c = build_generator(GeneratorKind::C, &dims)?;
    let mut worst = vec![0.0; 3];
    track_edges(input, &mut worst)?;
    let state = match evaluation {
        Evaluation::Folded => {
            let b = build_generator(GeneratorKind::B, &dims)?;
            let rotated = a.lin_comb(s3.cosh(), &b, s3.sinh());
            let mid = c.exp_apply(input, s1 + s3)?;
            track_edges(&mid, &mut worst)?;
            rotated.exp_apply(&mid, s2)?
        }
        Evaluation::StageByStage => {
            let mut v = input.clone();
            for (gen, s) in [(&c, s1), (&a, s2), (&c, s3)] {
                v = gen.exp_apply(&v, s)?;
                track_edges(&v, &mut worst)?;
            }
            v
        }
    };
    track_edges(&state, &mut worst)?;
    let report = TruncationReport { edge_populations: worst.clone(), final_norm: state.norm() };
    let (mode, edge) = worst
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0), |acc, (m, w)| if w > acc.1 { (m, w) } else { acc });
    if edge > EDGE_LIMIT {
        return Err(Error::TruncationOverflow { mode, edge_population: edge, limit: EDGE_LIMIT });
    }
    if edge > EDGE_WARN {
        log::warn!("Fock truncation {dims:?}: edge population {edge:.3e} on mode {mode}");
    }
    Ok((state, report))
}

/// Gaussian state with the first and second quadrature moments of `state`.
pub fn gaussian_moments(state: &FockVector) -> Result<GaussianState> {
    let dims = state.dims().to_vec();
    let n = dims.len();
    let psi = state.amplitudes();
    let mut applied = Vec::with_capacity(2 * n);
    for m in 0..n {
        for phase in [0.0, std::f64::consts::FRAC_PI_2] {
            applied.push(quadrature_operator(&dims, m, phase)?.matrix().matvec(psi));
        }
    }
    let norm2 = psi.norm_squared();
    let mean = DVector::from_iterator(2 * n, applied.iter().map(|v| psi.dotc(v).re / norm2));
    let cov = DMatrix::from_fn(2 * n, 2 * n, |i, j| applied[i].dotc(&applied[j]).re / norm2 - mean[i] * mean[j]);
    GaussianState::new(mean, cov)
}

/// Trace distance between the two-clone state `Tr_b` of the network output
/// and the normalized `½ P (|φ⟩⟨φ| ⊗ I) P`, where
/// `P = V(|0⟩⟨0| ⊗ I)V†` and `V = exp[(π/4)(c†a − ca†)]` on `(c, a)`.
pub fn projector_form_check(phi: &FockVector, lambda: f64, truncation: usize) -> Result<f64> {
    let spec = CloningNetworkSpec::new(lambda, 1.0)?;
    let result = run_cloner(&CloneInput::Fock(phi.clone()), &spec, &BackendConfig::fock(truncation))?;
    let NetworkOutput::Fock { state, .. } = &result.output else {
        unreachable!("Fock backend requested")
    };
    let network = reduced_density_modes(state, &[MODE_C, MODE_A])?;
    let limit = projector_form_state(phi, truncation)?;
    trace_distance(&network, &limit)
}

/// Normalized `½ P (|φ⟩⟨φ| ⊗ I) P` on dims `(d, d)`.
///
/// `V` conserves total photon number, so each column `W_k = V|0, k⟩` is
/// computed exactly in a working space with `2d − 1` levels per mode.
pub fn projector_form_state(phi: &FockVector, d: usize) -> Result<DensityMatrix> {
    if phi.dims().len() != 1 || phi.dims()[0] > d {
        return Err(invalid(format!("phi must be single-mode with at most {d} levels")));
    }
    let k_max = 2 * d - 2;
    let w = k_max + 1;
    let work = [w, w];
    let v_gen: FockOperator = beam_splitter_generator(&work, 0, 1)?;
    let theta = std::f64::consts::FRAC_PI_4;
    let columns: Vec<FockVector> = (0..=k_max)
        .map(|k| v_gen.exp_apply(&FockVector::basis(work.to_vec(), &[0, k])?, theta))
        .collect::<Result<_>>()?;
    // u[k][j] = (⟨φ|_c ⊗ ⟨j|_a) W_k
    let phi_amp = phi.amplitudes();
    let u = DMatrix::from_fn(w, k_max + 1, |j, k| {
        (0..phi_amp.len()).map(|c| phi_amp[c].conj() * columns[k].amplitudes()[c * w + j]).sum::<Complex64>()
    });
    let gram = u.adjoint() * &u;
    let crop = DMatrix::from_fn(d * d, k_max + 1, |i, k| columns[k].amplitudes()[(i / d) * w + i % d]);
    let rho = (&crop * gram * crop.adjoint()) * Complex64::new(0.5, 0.0);
    let out = DensityMatrix::new(vec![d, d], rho)?;
    log::debug!("projector form: raw trace {:.6}", out.trace());
    Ok(out.normalized())
}

/// `D(α)ρD†(α)` restricted to the first `ρ.dim()` levels.
pub fn displace_density(rho: &DensityMatrix, alpha: Complex64) -> Result<DensityMatrix> {
    let d = rho.dim();
    let dm = displacement_matrix(alpha, d, d);
    DensityMatrix::single_mode(&dm * rho.matrix() * dm.adjoint())
}

/// Largest trace distance between the clones of `D(α)|φ⟩` and the
/// correspondingly displaced clones of `|φ⟩`, for the λ network.
pub fn covariance_check(phi: &FockVector, alpha: Complex64, lambda: f64, truncation: usize) -> Result<f64> {
    if phi.dims().len() != 1 || phi.dims()[0] != truncation {
        return Err(invalid(format!("phi must be single-mode with {truncation} levels")));
    }
    let spec = CloningNetworkSpec::new(lambda, 1.0)?;
    let backend = BackendConfig::fock(truncation);
    let shifted = displacement_matrix(alpha, truncation, truncation) * phi.amplitudes();
    let mut shifted = FockVector::new(vec![truncation], shifted)?;
    let lost = 1.0 - shifted.norm().powi(2);
    if lost > 1e-6 {
        log::warn!("displaced input loses {lost:.2e} of its norm at truncation {truncation}");
    }
    shifted.normalize();
    let plain = run_cloner(&CloneInput::Fock(phi.clone()), &spec, &backend)?;
    let moved = run_cloner(&CloneInput::Fock(shifted), &spec, &backend)?;
    let mut worst: f64 = 0.0;
    for (p, m) in [(&plain.clone_c, &moved.clone_c), (&plain.clone_a, &moved.clone_a)] {
        let (Some(p), Some(m)) = (p.density(), m.density()) else {
            unreachable!("Fock backend requested")
        };
        worst = worst.max(trace_distance(&displace_density(p, alpha)?.normalized(), m)?);
    }
    Ok(worst)
}

/// Clone trace distance and edge report from a Fock run, for diagnostics.
pub fn clone_distance(result: &CloneResult) -> Option<f64> {
    match (&result.clone_c, &result.clone_a) {
        (crate::network::ReducedState::Fock(c), crate::network::ReducedState::Fock(a)) => trace_distance(c, a).ok(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::reduced_density;

    #[test]
    fn identity_network_leaves_input() {
        let spec = CloningNetworkSpec::from_strengths(1.0, 1.0, [0.0, 0.0, 0.0]);
        let phi = FockVector::coherent(8, Complex64::new(0.5, 0.1)).unwrap();
        let input = phi.tensor(&FockVector::vacuum(vec![8, 8]).unwrap());
        for ev in [Evaluation::Folded, Evaluation::StageByStage] {
            let (out, report) = apply_network_fock(&spec, &input, ev).unwrap();
            assert_eq!(out, input);
            assert!((report.final_norm - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn folded_matches_stage_by_stage() {
        // strengths mild enough that neither evaluation feels the truncation
        let spec = CloningNetworkSpec::from_strengths(0.5, 1.0, [0.1, 0.3, 0.2]);
        let d = 25;
        let phi = FockVector::coherent(d, Complex64::new(0.3, -0.2)).unwrap();
        let input = phi.tensor(&FockVector::vacuum(vec![d, d]).unwrap());
        let (f, _) = apply_network_fock(&spec, &input, Evaluation::Folded).unwrap();
        let (s, _) = apply_network_fock(&spec, &input, Evaluation::StageByStage).unwrap();
        let rf = reduced_density(&f, MODE_C).unwrap();
        let rs = reduced_density(&s, MODE_C).unwrap();
        let td = trace_distance(&rf, &rs).unwrap();
        assert!(td < 1e-12, "{td}");
    }

    #[test]
    fn overflow_is_reported() {
        let spec = CloningNetworkSpec::new(3.0, 1.0).unwrap();
        let input = FockVector::vacuum(vec![6, 6, 6]).unwrap();
        let err = apply_network_fock(&spec, &input, Evaluation::StageByStage).unwrap_err();
        assert!(matches!(err, Error::TruncationOverflow { .. }), "{err:?}");
    }

    #[test]
    fn moments_of_coherent_product() {
        let v = FockVector::coherent(30, Complex64::new(0.4, 0.7))
            .unwrap()
            .tensor(&FockVector::vacuum(vec![5]).unwrap());
        let g = gaussian_moments(&v).unwrap();
        assert!((g.mean()[0] - 0.4).abs() < 1e-12 && (g.mean()[1] - 0.7).abs() < 1e-12);
        assert!((g.cov() - DMatrix::identity(4, 4) * 0.25).amax() < 1e-12);
    }

    #[test]
    fn projector_state_is_valid() {
        let phi = FockVector::vacuum(vec![10]).unwrap();
        let r = projector_form_state(&phi, 10).unwrap();
        assert!(r.is_valid());
    }
}
