//! Ladder operators, bilinear generators and displacement/squeeze matrices
//! on truncated Fock spaces.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::expm::matrix_exponential;
use super::sparse::CsrMatrix;
use super::{check_dims, occupations, strides, FockOperator};
use crate::error::{invalid, Result};

/// Mode indices of the three-mode cloning network.
pub const MODE_C: usize = 0;
pub const MODE_A: usize = 1;
pub const MODE_B: usize = 2;

/// The three bilinear generators of the network:
/// `A = bc − b†c†`, `B = ca† − c†a`, `C = ab − a†b†`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    A,
    B,
    C,
}

impl FromStr for GeneratorKind {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Self::A),
            "B" | "b" => Ok(Self::B),
            "C" | "c" => Ok(Self::C),
            other => Err(invalid(format!("unknown generator kind {other:?} (expected A, B or C)"))),
        }
    }
}

/// Single-mode annihilation operator, `⟨n−1|a|n⟩ = √n`.
pub fn annihilation_matrix(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(invalid(format!("annihilation operator needs dim >= 2, got {dim}")));
    }
    lowering(&[dim], 0)
}

/// Annihilation operator of `mode` embedded in the product space.
pub fn lowering(dims: &[usize], mode: usize) -> Result<FockOperator> {
    check_dims(dims)?;
    if mode >= dims.len() {
        return Err(invalid(format!("mode {mode} out of range for {} modes", dims.len())));
    }
    let total: usize = dims.iter().product();
    let stride = strides(dims)[mode];
    let t = (0..total)
        .filter_map(|i| {
            let n = (i / stride) % dims[mode];
            (n > 0).then(|| (i - stride, i, Complex64::new((n as f64).sqrt(), 0.0)))
        })
        .collect();
    FockOperator::new(dims.to_vec(), CsrMatrix::from_triplets(total, total, t))
}

/// Diagonal number operator of `mode`.
pub fn number_operator(dims: &[usize], mode: usize) -> Result<FockOperator> {
    check_dims(dims)?;
    if mode >= dims.len() {
        return Err(invalid(format!("mode {mode} out of range for {} modes", dims.len())));
    }
    let total: usize = dims.iter().product();
    let t = (0..total)
        .map(|i| (i, i, Complex64::new(occupations(dims, i)[mode] as f64, 0.0)))
        .collect();
    FockOperator::new(dims.to_vec(), CsrMatrix::from_triplets(total, total, t))
}

/// `ij − i†j†`; its exponential is the two-mode squeezer.
pub fn two_mode_squeeze_generator(dims: &[usize], i: usize, j: usize) -> Result<FockOperator> {
    if i == j {
        return Err(invalid("two-mode generator needs distinct modes"));
    }
    let pair = lowering(dims, i)?.mul(&lowering(dims, j)?);
    Ok(pair.lin_comb(1.0, &pair.adjoint(), -1.0))
}

/// `i†j − ij†`; its exponential is the beam splitter.
pub fn beam_splitter_generator(dims: &[usize], i: usize, j: usize) -> Result<FockOperator> {
    if i == j {
        return Err(invalid("two-mode generator needs distinct modes"));
    }
    let hop = lowering(dims, i)?.adjoint().mul(&lowering(dims, j)?);
    Ok(hop.lin_comb(1.0, &hop.adjoint(), -1.0))
}

/// One of the network generators on the three-mode space `(c, a, b)`.
pub fn build_generator(kind: GeneratorKind, dims: &[usize]) -> Result<FockOperator> {
    if dims.len() != 3 {
        return Err(invalid(format!("network generators act on three modes, got dims {dims:?}")));
    }
    match kind {
        GeneratorKind::A => two_mode_squeeze_generator(dims, MODE_B, MODE_C),
        GeneratorKind::B => beam_splitter_generator(dims, MODE_A, MODE_C),
        GeneratorKind::C => two_mode_squeeze_generator(dims, MODE_A, MODE_B),
    }
}

/// Rotated quadrature `(c e^{−iφ} + c† e^{iφ})/2` of `mode`.
pub fn quadrature_operator(dims: &[usize], mode: usize, phase: f64) -> Result<FockOperator> {
    let c = lowering(dims, mode)?;
    let ph = Complex64::from_polar(0.5, -phase);
    let m = c.matrix().axpby(ph, &c.adjoint().matrix().clone(), ph.conj());
    FockOperator::new(dims.to_vec(), m)
}

/// Columns of `D(z)` without the Gaussian factor: entry `(m, n)` is
/// `e^{|z|²/2}⟨m|D(z)|n⟩`, a polynomial in `z, z*`.
///
/// Built from `D(z)|n⟩ = (c† − z*)ⁿ D(z)|0⟩/√n!`, which is exact for every
/// row `m < rows` regardless of truncation.
pub fn displacement_polynomial(z: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut d = DMatrix::zeros(rows, cols);
    if cols == 0 || rows == 0 {
        return d;
    }
    d[(0, 0)] = Complex64::new(1.0, 0.0);
    for m in 1..rows {
        d[(m, 0)] = d[(m - 1, 0)] * z / (m as f64).sqrt();
    }
    let zc = z.conj();
    for n in 1..cols {
        let inv = 1.0 / (n as f64).sqrt();
        for m in 0..rows {
            let raise = if m > 0 { d[(m - 1, n - 1)] * (m as f64).sqrt() } else { Complex64::new(0.0, 0.0) };
            d[(m, n)] = (raise - zc * d[(m, n - 1)]) * inv;
        }
    }
    d
}

/// `⟨m|D(z)|n⟩` for `m < rows`, `n < cols`.
pub fn displacement_matrix(z: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    displacement_polynomial(z, rows, cols) * Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0)
}

/// `exp(½(ξ c†² − ξ* c²))` on the lowest `dim` levels, computed in a
/// working space of dimension `work_dim` and cropped.
pub fn squeeze_matrix(xi: Complex64, dim: usize, work_dim: usize) -> Result<DMatrix<Complex64>> {
    if work_dim < dim {
        return Err(invalid(format!("working dimension {work_dim} below target {dim}")));
    }
    let c = annihilation_matrix(work_dim)?.matrix().to_dense();
    let cd = c.adjoint();
    let g = (&cd * &cd * xi - &c * &c * xi.conj()) * Complex64::new(0.5, 0.0);
    let s = matrix_exponential(&g)?;
    Ok(s.view((0, 0), (dim, dim)).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interior_max(op: &FockOperator, guard: usize) -> f64 {
        let m = op.interior_mask(guard);
        op.matrix().max_abs_masked(&m, &m)
    }

    #[test]
    fn annihilation_dim_two() {
        let a = annihilation_matrix(2).unwrap().matrix().to_dense();
        assert_eq!(a[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(a.iter().filter(|v| v.norm() > 0.0).count(), 1);
        assert!(annihilation_matrix(1).is_err());
    }

    #[test]
    fn number_spectrum_and_canonical_commutator() {
        let d = 9;
        let a = annihilation_matrix(d).unwrap();
        let n = a.adjoint().mul(&a).matrix().to_dense();
        for k in 0..d {
            assert!((n[(k, k)].re - k as f64).abs() < 1e-14);
        }
        let comm = a.commutator(&a.adjoint()).matrix().to_dense();
        for r in 0..d - 1 {
            for c in 0..d - 1 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((comm[(r, c)] - want).norm() < 1e-14);
            }
        }
        // the last level breaks [a, a†] = 1
        assert!((comm[(d - 1, d - 1)].re + (d - 1) as f64).abs() < 1e-12);
    }

    #[test]
    fn generators_are_anti_hermitian() {
        let dims = [5, 6, 4];
        for kind in [GeneratorKind::A, GeneratorKind::B, GeneratorKind::C] {
            let g = build_generator(kind, &dims).unwrap();
            assert!(g.matrix().add(g.adjoint().matrix()).max_abs() < 1e-15);
        }
        assert!(build_generator(GeneratorKind::A, &[4, 4]).is_err());
        assert!("D".parse::<GeneratorKind>().is_err());
        assert_eq!("B".parse::<GeneratorKind>().unwrap(), GeneratorKind::B);
    }

    #[test]
    fn c_on_vacuum_is_minus_one_one() {
        let dims = vec![3, 4, 4];
        let c = build_generator(GeneratorKind::C, &dims).unwrap();
        let out = c.apply(&super::super::FockVector::vacuum(dims.clone()).unwrap()).unwrap();
        let want = super::super::FockVector::basis(dims, &[0, 1, 1]).unwrap();
        assert!((out.amplitudes() + want.amplitudes()).norm() < 1e-15);
    }

    #[test]
    fn commutation_relations_on_interior() {
        let dims = [7, 7, 7];
        let a = build_generator(GeneratorKind::A, &dims).unwrap();
        let b = build_generator(GeneratorKind::B, &dims).unwrap();
        let c = build_generator(GeneratorKind::C, &dims).unwrap();
        assert!(interior_max(&c.commutator(&a).lin_comb(1.0, &b, -1.0), 1) < 1e-12);
        assert!(interior_max(&c.commutator(&b).lin_comb(1.0, &a, -1.0), 1) < 1e-12);
        assert!(interior_max(&b.commutator(&a).lin_comb(1.0, &c, -1.0), 1) < 1e-12);
    }

    #[test]
    fn displacement_matches_exponential() {
        let z = Complex64::new(0.7, -0.4);
        let big = 60;
        let a = annihilation_matrix(big).unwrap().matrix().to_dense();
        let g = a.adjoint() * z - &a * z.conj();
        let exact = matrix_exponential(&g).unwrap();
        let ours = displacement_matrix(z, 12, 10);
        assert!((ours - exact.view((0, 0), (12, 10))).camax() < 1e-13);
    }

    #[test]
    fn squeeze_vacuum_coefficients() {
        // for real ξ = r: ⟨0|S|0⟩ = 1/√cosh r and ⟨2|S|0⟩ = tanh r/(√2·√cosh r)
        let r = 0.4;
        let s = squeeze_matrix(Complex64::new(r, 0.0), 6, 80).unwrap();
        let c0 = 1.0 / r.cosh().sqrt();
        assert!((s[(0, 0)].re - c0).abs() < 1e-13);
        assert!((s[(2, 0)].re - c0 * r.tanh() * 2f64.sqrt() / 2.0).abs() < 1e-13);
    }
}
