//! Numerical checks of the generator algebra on truncated spaces.
//!
//! Products of two bilinear generators only move each occupation by one
//! level per factor, so commutators are exact on states whose occupations
//! stay one level below the edge. Exponentials are not: `e^{λC}` spreads
//! amplitude to arbitrarily high levels. The conjugation identity
//! `e^{λC} A e^{−λC} = cosh λ·A + sinh λ·B` is therefore checked with the
//! exponentials evaluated on long sector chains and only the matrix elements
//! inside the truncated block compared.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::operators::{build_generator, GeneratorKind};
use super::{interior_mask, FockVector};
use crate::error::{invalid, Result};

/// Working chain length for the sector exponentials.
pub const CHAIN_LEN: usize = 480;

/// Largest interior entries of `[C,A] − B`, `[C,B] − A` and `[B,A] − C`,
/// with the interior excluding the top `guard` levels of every mode.
pub fn commutator_residuals(dims: &[usize], guard: usize) -> Result<[f64; 3]> {
    let a = build_generator(GeneratorKind::A, dims)?;
    let b = build_generator(GeneratorKind::B, dims)?;
    let c = build_generator(GeneratorKind::C, dims)?;
    let mask = interior_mask(dims, guard);
    let res = |lhs: super::FockOperator, rhs: &super::FockOperator| lhs.lin_comb(1.0, rhs, -1.0).matrix().max_abs_masked(&mask, &mask);
    Ok([res(c.commutator(&a), &b), res(c.commutator(&b), &a), res(b.commutator(&a), &c)])
}

/// Basis states of the `(a, b)` sector `n_a − n_b = delta` are
/// `|j + max(δ,0), j + max(−δ,0)⟩`, `j = 0, 1, …`.
fn sector_occupation(delta: i64, j: usize) -> (usize, usize) {
    (j + delta.max(0) as usize, j + (-delta).max(0) as usize)
}

/// Eigenpairs of the chain matrix of one `(a, b)` sector.
///
/// `C = ab − a†b†` is real, antisymmetric and tridiagonal on the chain;
/// with `D = diag(iʲ)` it satisfies `D⁻¹CD = i·S` for the real symmetric `S`
/// with the same upper diagonal, so `exp(tC) = D·U e^{itΛ} Uᵀ·D⁻¹`. The
/// matrix depends on `|δ|` only.
struct SectorChain {
    eig: SymmetricEigen<f64, nalgebra::Dyn>,
}

impl SectorChain {
    fn new(delta: i64, len: usize) -> Self {
        let off = delta.unsigned_abs() as usize;
        // ⟨j|C|j+1⟩ = ⟨j|ab|j+1⟩ = √((j+1)(j+1+|δ|))
        let mut s = DMatrix::<f64>::zeros(len, len);
        for j in 0..len - 1 {
            let w = (((j + 1) * (j + 1 + off)) as f64).sqrt();
            s[(j, j + 1)] = w;
            s[(j + 1, j)] = w;
        }
        Self { eig: SymmetricEigen::new(s) }
    }

    /// `exp(t·C)` applied to the first `count` chain states.
    fn columns(&self, count: usize, t: f64) -> Vec<Vec<f64>> {
        let u = &self.eig.eigenvectors;
        let len = u.nrows();
        let phases: Vec<Complex64> = self.eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, t * l)).collect();
        let ipow = [Complex64::new(1.0, 0.0), Complex64::i(), Complex64::new(-1.0, 0.0), -Complex64::i()];
        (0..count)
            .map(|j0| {
                let weights: Vec<Complex64> = (0..len).map(|k| phases[k] * u[(j0, k)]).collect();
                (0..len)
                    .map(|j| {
                        let sum: Complex64 = (0..len).map(|k| weights[k] * u[(j, k)]).sum();
                        (ipow[(j + 4 - j0 % 4) % 4] * sum).re
                    })
                    .collect()
            })
            .collect()
    }
}

/// Residual of `e^{λC} A e^{−λC} = cosh λ·A + sinh λ·B` on the block where
/// every occupation is at most `d − 1 − guard`, with `dims = (d_c, d_a, d_b)`.
///
/// Since `C` acts on `(a, b)` only, the residual is `c ⊗ X − c† ⊗ X†` with
/// `X = E b E⁻¹ − (cosh λ·b + sinh λ·a†)`, `E = e^{λC}`. The entries of `X`
/// are `⟨v_m| b |v_n⟩` with `v_n = e^{−λC}|n⟩` taken from [`CHAIN_LEN`]-long
/// sector chains, so no truncation enters the exponential.
pub fn bch_residual(dims: &[usize], lambda: f64, guard: usize) -> Result<f64> {
    Ok(bch_residuals(dims, &[lambda], guard)?[0])
}

/// [`bch_residual`] for several λ, sharing the chain eigendecompositions.
pub fn bch_residuals(dims: &[usize], lambdas: &[f64], guard: usize) -> Result<Vec<f64>> {
    if dims.len() != 3 {
        return Err(invalid(format!("expected three modes, got {dims:?}")));
    }
    let top = |m: usize| dims[m].checked_sub(1 + guard).ok_or_else(|| invalid("guard exceeds truncation"));
    let (tc, ta, tb) = (top(0)?, top(1)?, top(2)?);
    let count = ta.max(tb) + 1;
    let len = CHAIN_LEN.max(count + 64);
    let max_off = ta.max(tb) + 1;
    let sectors: Vec<SectorChain> = (0..=max_off).into_par_iter().map(|off| SectorChain::new(off as i64, len)).collect();
    lambdas
        .iter()
        .map(|&lambda| {
            let chains: Vec<Vec<Vec<f64>>> = sectors.par_iter().map(|s| s.columns(count, -lambda)).collect();
            Ok((tc as f64).sqrt().max(1.0) * interior_block_defect(&chains, ta, tb, len, lambda))
        })
        .collect()
}

/// `max |X_{m,n}|` over interior `m, n`; `b` and `a†` both map sector `δ`
/// to `δ + 1`.
fn interior_block_defect(chains: &[Vec<Vec<f64>>], ta: usize, tb: usize, len: usize, lambda: f64) -> f64 {
    let chain = |d: i64| &chains[d.unsigned_abs() as usize];
    let (ch, sh) = (lambda.cosh(), lambda.sinh());
    let mut worst: f64 = 0.0;
    for na in 0..=ta {
        for nb in 0..=tb {
            let delta = na as i64 - nb as i64;
            let vn = &chain(delta)[na.min(nb)];
            let target = chain(delta + 1);
            // b v_n in the chain of sector δ + 1: b|p_a, p_b + 1⟩ = √(p_b + 1)|p_a, p_b⟩,
            // and |p_a, p_b + 1⟩ is chain state min(p_a, p_b + 1) of sector δ
            let bvn: Vec<f64> = (0..len)
                .map(|i| {
                    let (pa, pb) = sector_occupation(delta + 1, i);
                    let src = pa.min(pb + 1);
                    if src < len { ((pb + 1) as f64).sqrt() * vn[src] } else { 0.0 }
                })
                .collect();
            for ma in 0..=ta {
                let mb_i = ma as i64 - (delta + 1);
                if mb_i < 0 || mb_i as usize > tb {
                    continue;
                }
                let mb = mb_i as usize;
                let vm = &target[ma.min(mb)];
                let lhs: f64 = vm.iter().zip(&bvn).map(|(x, y)| x * y).sum();
                // ⟨m|b|n⟩ and ⟨m|a†|n⟩
                let mut rhs = 0.0;
                if ma == na && mb + 1 == nb {
                    rhs += ch * (nb as f64).sqrt();
                }
                if ma == na + 1 && mb == nb {
                    rhs += sh * (ma as f64).sqrt();
                }
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    worst
}

/// Direct check of the same identity with truncated exponentials on the
/// three-mode space, over basis columns with total photon number at most
/// `max_total`. Only meaningful for small λ and low photon numbers.
pub fn bch_residual_truncated(dims: &[usize], lambda: f64, max_total: usize) -> Result<f64> {
    let a = build_generator(GeneratorKind::A, dims)?;
    let b = build_generator(GeneratorKind::B, dims)?;
    let c = build_generator(GeneratorKind::C, dims)?;
    let rhs_op = a.lin_comb(lambda.cosh(), &b, lambda.sinh());
    let total: usize = dims.iter().product();
    let low: Vec<bool> = (0..total).map(|i| super::occupations(dims, i).iter().sum::<usize>() <= max_total).collect();
    let cols: Vec<usize> = (0..total).filter(|&i| low[i]).collect();
    let worst = cols
        .par_iter()
        .map(|&i| -> Result<f64> {
            let occ = super::occupations(dims, i);
            let e = FockVector::basis(dims.to_vec(), &occ)?;
            let lhs = c.exp_apply(&a.apply(&c.exp_apply(&e, -lambda)?)?, lambda)?;
            let rhs = rhs_op.apply(&e)?;
            let diff: DVector<Complex64> = lhs.amplitudes() - rhs.amplitudes();
            Ok(diff.iter().zip(&low).filter(|(_, &l)| l).map(|(d, _)| d.norm()).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(worst.into_iter().fold(0.0, f64::max))
}

/// `max |⟨m|U†U|n⟩ − δ_{mn}|` for `U = exp(t·G)` over basis states with
/// total photon number at most `max_total`.
pub fn unitarity_defect(kind: GeneratorKind, dims: &[usize], t: f64, max_total: usize) -> Result<f64> {
    let g = build_generator(kind, dims)?;
    let total: usize = dims.iter().product();
    let cols: Vec<usize> = (0..total).filter(|&i| super::occupations(dims, i).iter().sum::<usize>() <= max_total).collect();
    let images: Vec<DVector<Complex64>> = cols
        .par_iter()
        .map(|&i| Ok(g.exp_apply(&FockVector::basis(dims.to_vec(), &super::occupations(dims, i))?, t)?.into_amplitudes()))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for (p, u) in images.iter().enumerate() {
        for (q, v) in images.iter().enumerate().skip(p) {
            let want = if p == q { 1.0 } else { 0.0 };
            worst = worst.max((u.dotc(v) - want).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutators_close_on_interior() {
        let r = commutator_residuals(&[8, 8, 8], 1).unwrap();
        assert!(r.iter().all(|&x| x < 1e-12), "{r:?}");
        // without a guard band the edge breaks the algebra
        let r0 = commutator_residuals(&[8, 8, 8], 0).unwrap();
        assert!(r0.iter().any(|&x| x > 1.0));
    }

    #[test]
    fn sector_chain_reproduces_twin_beam() {
        // e^{rC}|0,0⟩ = Σ (−tanh r)ⁿ / cosh r |n,n⟩
        let r = 0.9;
        let v = &SectorChain::new(0, 200).columns(1, r)[0];
        for n in 0..20 {
            assert!((v[n] - (-r.tanh()).powi(n as i32) / r.cosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn guarded_and_truncated_agree_at_small_lambda() {
        let dims = [8, 20, 20];
        let direct = bch_residual_truncated(&dims, 0.3, 4).unwrap();
        assert!(direct < 1e-9, "{direct}");
        let guarded = bch_residual(&[8, 8, 8], 0.3, 1).unwrap();
        assert!(guarded < 1e-10, "{guarded}");
    }

    #[test]
    fn truncated_gates_are_unitary() {
        let d = unitarity_defect(GeneratorKind::C, &[6, 10, 10], 0.7, 6).unwrap();
        assert!(d < 1e-12, "{d}");
    }
}
