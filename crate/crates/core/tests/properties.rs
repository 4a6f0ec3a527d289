use cvclone::fock::network::gaussian_moments;
use cvclone::fock::operators::{beam_splitter_generator, two_mode_squeeze_generator};
use cvclone::fock::{DensityMatrix, FockVector};
use cvclone::gaussian::{GaussianState, SymplecticTransform};
use cvclone::measurement::{povm_params, PovmDensity};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

#[derive(Debug, Clone, Copy)]
enum Gate {
    Squeeze(usize, usize, f64),
    Split(usize, usize, f64),
    Shift(usize, f64, f64),
}

fn pair() -> impl Strategy<Value = (usize, usize)> {
    (0usize..3, 1usize..3).prop_map(|(i, k)| (i, (i + k) % 3))
}

fn gate(max_r: f64) -> impl Strategy<Value = Gate> {
    prop_oneof![
        (pair(), -max_r..max_r).prop_map(|((i, j), r)| Gate::Squeeze(i, j, r)),
        (pair(), -3.2f64..3.2).prop_map(|((i, j), t)| Gate::Split(i, j, t)),
        (0usize..3, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(m, re, im)| Gate::Shift(m, re, im)),
    ]
}

fn transform(g: Gate) -> SymplecticTransform {
    match g {
        Gate::Squeeze(i, j, r) => SymplecticTransform::two_mode_squeezer(3, i, j, r).unwrap(),
        Gate::Split(i, j, t) => SymplecticTransform::beam_splitter(3, i, j, t).unwrap(),
        Gate::Shift(m, re, im) => SymplecticTransform::displacement(3, m, Complex64::new(re, im)).unwrap(),
    }
}

fn coherent_product(alphas: &[Complex64]) -> GaussianState {
    alphas
        .iter()
        .enumerate()
        .fold(GaussianState::vacuum(3).unwrap(), |s, (m, a)| s.displace(m, *a).unwrap())
}

fn alpha() -> impl Strategy<Value = Complex64> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transforms_stay_symplectic_and_invert(gates in prop::collection::vec(gate(1.5), 1..5), a in alpha()) {
        let total = gates.iter().fold(SymplecticTransform::identity(3), |acc, &g| transform(g).compose(&acc));
        prop_assert!(total.is_symplectic(), "defect {}", total.symplectic_defect());
        let s0 = coherent_product(&[a, Complex64::new(0.0, 0.0), a.conj()]);
        let back = s0.apply(&total).unwrap().apply(&total.inverse()).unwrap();
        prop_assert!((back.mean() - s0.mean()).amax() < 1e-10);
        prop_assert!((back.cov() - s0.cov()).amax() < 1e-10);
    }

    #[test]
    fn uncertainty_principle_survives_gates(gates in prop::collection::vec(gate(1.5), 0..6), nbar in 0.0f64..2.0) {
        let thermal = GaussianState::thermal(nbar).unwrap();
        let mut cov = DMatrix::identity(6, 6) * 0.25;
        cov.view_mut((0, 0), (2, 2)).copy_from(thermal.cov());
        let mut s = GaussianState::new(DVector::zeros(6), cov).unwrap();
        for g in gates {
            s = s.apply(&transform(g)).unwrap();
        }
        prop_assert!(s.uncertainty_margin() >= -1e-10, "margin {}", s.uncertainty_margin());
    }

    #[test]
    fn gates_preserve_purity(gates in prop::collection::vec(gate(0.8), 0..5), a in alpha()) {
        let mut s = coherent_product(&[a, a * 0.5, -a]);
        for g in gates {
            s = s.apply(&transform(g)).unwrap();
        }
        prop_assert!((s.purity_determinant() - 1.0).abs() < 1e-9, "det {}", s.purity_determinant());
    }

    #[test]
    fn marginals_agree_with_full_state(gates in prop::collection::vec(gate(1.0), 0..5), m in 0usize..3, phase in -3.2f64..3.2) {
        let mut s = GaussianState::vacuum(3).unwrap();
        for g in gates {
            s = s.apply(&transform(g)).unwrap();
        }
        let full = s.quadrature_moments(m, phase).unwrap();
        let marginal = s.reduce(&[m]).unwrap().quadrature_moments(0, phase).unwrap();
        prop_assert_eq!(full, marginal);
    }
}

/// Squeezing strengths are limited to 0.2 per gate: with four gates of
/// strength 1.5 on coherent inputs the photon distribution reaches far past
/// 25 levels and the truncated oracle is no longer exact.
const ORACLE_DIM: usize = 25;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn fock_oracle_matches_symplectic_backend(
        gates in prop::collection::vec(gate(0.2).prop_filter("displacements are inputs", |g| !matches!(g, Gate::Shift(..))), 1..5),
        alphas in prop::collection::vec(alpha(), 3),
    ) {
        let dims = vec![ORACLE_DIM; 3];
        let mut v = FockVector::coherent(ORACLE_DIM, alphas[0]).unwrap()
            .tensor(&FockVector::coherent(ORACLE_DIM, alphas[1]).unwrap())
            .tensor(&FockVector::coherent(ORACLE_DIM, alphas[2]).unwrap());
        let mut g = coherent_product(&alphas);
        for gate in gates {
            match gate {
                Gate::Squeeze(i, j, r) => {
                    v = two_mode_squeeze_generator(&dims, i, j).unwrap().exp_apply(&v, r).unwrap();
                    g = g.apply_two_mode_squeezer(i, j, r).unwrap();
                }
                Gate::Split(i, j, t) => {
                    v = beam_splitter_generator(&dims, i, j).unwrap().exp_apply(&v, t).unwrap();
                    g = g.apply_beam_splitter(i, j, t).unwrap();
                }
                Gate::Shift(..) => unreachable!(),
            }
        }
        let f = gaussian_moments(&v).unwrap();
        prop_assert!((f.mean() - g.mean()).amax() < 1e-6, "means {} vs {}", f.mean(), g.mean());
        prop_assert!((f.cov() - g.cov()).amax() < 1e-6, "covariances {} vs {}", f.cov(), g.cov());
    }
}

fn random_density(seed_amps: &[(f64, f64)], dim: usize) -> DensityMatrix {
    // mixture of two pure states built from the supplied amplitudes
    let half = seed_amps.len() / 2;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    for (k, chunk) in [&seed_amps[..half], &seed_amps[half..]].into_iter().enumerate() {
        let v = DVector::from_iterator(dim, chunk.iter().map(|&(re, im)| Complex64::new(re, im)));
        let v = &v / Complex64::new(v.norm().max(1e-12), 0.0);
        let w = if k == 0 { 0.7 } else { 0.3 };
        rho += &v * v.adjoint() * Complex64::new(w, 0.0);
    }
    DensityMatrix::single_mode(rho).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn povm_density_is_nonnegative(
        lambda in 0.5f64..8.0,
        phi in -1.0f64..1.0,
        gap in 0.05f64..3.09,
        amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        x in -3.0f64..3.0,
        y in -3.0f64..3.0,
    ) {
        let params = povm_params(lambda, phi, phi + gap);
        prop_assume!(params.is_ok());
        let f = PovmDensity::new(params.unwrap(), &random_density(&amps, 8));
        prop_assume!(f.is_ok());
        let p = f.unwrap().density(x, y);
        prop_assert!(p >= -1e-14, "density {p}");
    }
}
