//! Exact Gaussian-state evolution in phase space.
//!
//! Quadratures follow `x = (c + c†)/2`, `y = (c − c†)/(2i)`, so the vacuum
//! covariance is `I/4` and `[x, y] = i/2`. Vectors are interleaved
//! `(x₁, y₁, x₂, y₂, …)`.
//!
//! Gate matrices act in the Heisenberg picture on the quadrature vector:
//! for a state evolved by `U`, `mean ← S·mean + d` and `cov ← S·cov·Sᵀ`,
//! where `U† r U = S r + d`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Tolerance used when checking `SᵀΩS = Ω`.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Mean vector and covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    n_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

/// Affine symplectic map `r ↦ S r + d` on the quadrature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    pub matrix: DMatrix<f64>,
    pub displacement: DVector<f64>,
}

/// Standard symplectic form for interleaved ordering.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

fn check_mode(n_modes: usize, mode: usize) -> Result<()> {
    if mode >= n_modes {
        return Err(invalid(format!("mode {mode} out of range for {n_modes} modes")));
    }
    Ok(())
}

fn check_pair(n_modes: usize, i: usize, j: usize) -> Result<()> {
    check_mode(n_modes, i)?;
    check_mode(n_modes, j)?;
    if i == j {
        return Err(invalid(format!("two-mode gate needs distinct modes, got {i} twice")));
    }
    Ok(())
}

impl SymplecticTransform {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
            displacement: DVector::zeros(2 * n_modes),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `D(α) = exp(α c† − α* c)` on `mode`.
    pub fn displacement(n_modes: usize, mode: usize, alpha: Complex64) -> Result<Self> {
        check_mode(n_modes, mode)?;
        let mut t = Self::identity(n_modes);
        t.displacement[2 * mode] = alpha.re;
        t.displacement[2 * mode + 1] = alpha.im;
        Ok(t)
    }

    /// `exp(r (i j − i† j†))`: `i ↦ i cosh r − j† sinh r` and likewise for `j`.
    pub fn two_mode_squeezer(n_modes: usize, i: usize, j: usize, r: f64) -> Result<Self> {
        check_pair(n_modes, i, j)?;
        let (ch, sh) = (r.cosh(), r.sinh());
        let mut t = Self::identity(n_modes);
        let s = &mut t.matrix;
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        s[(xi, xi)] = ch;
        s[(yi, yi)] = ch;
        s[(xj, xj)] = ch;
        s[(yj, yj)] = ch;
        s[(xi, xj)] = -sh;
        s[(xj, xi)] = -sh;
        s[(yi, yj)] = sh;
        s[(yj, yi)] = sh;
        Ok(t)
    }

    /// `exp(θ (i† j − i j†))`: `i ↦ i cos θ + j sin θ`, `j ↦ j cos θ − i sin θ`.
    pub fn beam_splitter(n_modes: usize, i: usize, j: usize, angle: f64) -> Result<Self> {
        check_pair(n_modes, i, j)?;
        let (co, si) = (angle.cos(), angle.sin());
        let mut t = Self::identity(n_modes);
        let s = &mut t.matrix;
        for q in 0..2 {
            let (qi, qj) = (2 * i + q, 2 * j + q);
            s[(qi, qi)] = co;
            s[(qj, qj)] = co;
            s[(qi, qj)] = si;
            s[(qj, qi)] = -si;
        }
        Ok(t)
    }

    /// Infinitesimal generator of [`Self::two_mode_squeezer`], i.e. `d/dr` at `r = 0`.
    pub fn two_mode_squeezer_generator(n_modes: usize, i: usize, j: usize) -> Result<DMatrix<f64>> {
        check_pair(n_modes, i, j)?;
        let mut k = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        let (xi, yi, xj, yj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        k[(xi, xj)] = -1.0;
        k[(xj, xi)] = -1.0;
        k[(yi, yj)] = 1.0;
        k[(yj, yi)] = 1.0;
        Ok(k)
    }

    /// Infinitesimal generator of [`Self::beam_splitter`].
    pub fn beam_splitter_generator(n_modes: usize, i: usize, j: usize) -> Result<DMatrix<f64>> {
        check_pair(n_modes, i, j)?;
        let mut k = DMatrix::zeros(2 * n_modes, 2 * n_modes);
        for q in 0..2 {
            k[(2 * i + q, 2 * j + q)] = 1.0;
            k[(2 * j + q, 2 * i + q)] = -1.0;
        }
        Ok(k)
    }

    /// `exp(t·K)` for a Hamiltonian generator `K` (one with `KᵀΩ + ΩK = 0`).
    pub fn from_generator(generator: &DMatrix<f64>, t: f64) -> Result<Self> {
        let n = generator.nrows();
        if n != generator.ncols() || n % 2 != 0 {
            return Err(invalid(format!("generator must be square of even size, got {}x{}", n, generator.ncols())));
        }
        Ok(Self { matrix: (generator * t).exp(), displacement: DVector::zeros(n) })
    }

    /// `self` applied after `first`.
    pub fn compose(&self, first: &SymplecticTransform) -> Self {
        Self {
            matrix: &self.matrix * &first.matrix,
            displacement: &self.matrix * &first.displacement + &self.displacement,
        }
    }

    /// Inverse map, using `S⁻¹ = −Ω Sᵀ Ω`.
    pub fn inverse(&self) -> Self {
        let omega = symplectic_form(self.n_modes());
        let inv = -(&omega * self.matrix.transpose() * &omega);
        let displacement = -(&inv * &self.displacement);
        Self { matrix: inv, displacement }
    }

    /// Largest entry of `SᵀΩS − Ω`.
    pub fn symplectic_defect(&self) -> f64 {
        let omega = symplectic_form(self.n_modes());
        (self.matrix.transpose() * &omega * &self.matrix - &omega).amax()
    }

    pub fn is_symplectic(&self) -> bool {
        self.symplectic_defect() < SYMPLECTIC_TOL
    }
}

impl GaussianState {
    /// Build a state from raw moments, checking shapes. The covariance is
    /// symmetrized; physicality is not checked here (see [`Self::uncertainty_margin`]).
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || dim % 2 != 0 {
            return Err(invalid(format!("mean length {dim} is not a positive even number")));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(invalid(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let mut s = Self { n_modes: dim / 2, mean, cov };
        s.symmetrize();
        Ok(s)
    }

    pub fn vacuum(n_modes: usize) -> Result<Self> {
        if n_modes == 0 {
            return Err(invalid("a Gaussian state needs at least one mode"));
        }
        Ok(Self {
            n_modes,
            mean: DVector::zeros(2 * n_modes),
            cov: DMatrix::identity(2 * n_modes, 2 * n_modes) * 0.25,
        })
    }

    /// Single-mode coherent state `|α⟩`.
    pub fn coherent(alpha: Complex64) -> Self {
        let mut s = Self::vacuum(1).expect("one mode");
        s.mean[0] = alpha.re;
        s.mean[1] = alpha.im;
        s
    }

    /// Single-mode thermal state with mean photon number `nbar`.
    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0) {
            return Err(invalid(format!("thermal occupation must be non-negative, got {nbar}")));
        }
        let mut s = Self::vacuum(1)?;
        s.cov *= 1.0 + 2.0 * nbar;
        Ok(s)
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    fn symmetrize(&mut self) {
        let t = self.cov.transpose();
        self.cov = (&self.cov + t) * 0.5;
    }

    pub fn apply(&self, t: &SymplecticTransform) -> Result<Self> {
        if t.n_modes() != self.n_modes {
            return Err(invalid(format!(
                "transform acts on {} modes, state has {}",
                t.n_modes(),
                self.n_modes
            )));
        }
        let mut out = Self {
            n_modes: self.n_modes,
            mean: &t.matrix * &self.mean + &t.displacement,
            cov: &t.matrix * &self.cov * t.matrix.transpose(),
        };
        out.symmetrize();
        Ok(out)
    }

    pub fn displace(&self, mode: usize, alpha: Complex64) -> Result<Self> {
        check_mode(self.n_modes, mode)?;
        let mut out = self.clone();
        out.mean[2 * mode] += alpha.re;
        out.mean[2 * mode + 1] += alpha.im;
        Ok(out)
    }

    /// Apply `exp(r (i j − i† j†))`.
    pub fn apply_two_mode_squeezer(&self, i: usize, j: usize, r: f64) -> Result<Self> {
        self.apply(&SymplecticTransform::two_mode_squeezer(self.n_modes, i, j, r)?)
    }

    /// Apply `exp(angle (i† j − i j†))`.
    pub fn apply_beam_splitter(&self, i: usize, j: usize, angle: f64) -> Result<Self> {
        self.apply(&SymplecticTransform::beam_splitter(self.n_modes, i, j, angle)?)
    }

    /// Gaussian marginal on `keep` (in the given order).
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(invalid("reduce needs at least one mode to keep"));
        }
        for (k, &m) in keep.iter().enumerate() {
            check_mode(self.n_modes, m)?;
            if keep[..k].contains(&m) {
                return Err(invalid(format!("mode {m} listed twice")));
            }
        }
        let idx: Vec<usize> = keep.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        Ok(Self { n_modes: keep.len(), mean, cov })
    }

    /// Mean and variance of `cos(phase)·x + sin(phase)·y` on `mode`.
    pub fn quadrature_moments(&self, mode: usize, phase: f64) -> Result<(f64, f64)> {
        check_mode(self.n_modes, mode)?;
        let (c, s) = (phase.cos(), phase.sin());
        let (x, y) = (2 * mode, 2 * mode + 1);
        let mean = c * self.mean[x] + s * self.mean[y];
        let var = c * c * self.cov[(x, x)] + 2.0 * c * s * self.cov[(x, y)] + s * s * self.cov[(y, y)];
        Ok((mean, var))
    }

    /// Covariance of two linear quadrature combinations `u·r` and `v·r`.
    pub fn linear_moments(&self, u: &DVector<f64>, v: &DVector<f64>) -> (f64, f64, f64, f64, f64) {
        let cu = &self.cov * u;
        let cv = &self.cov * v;
        (u.dot(&self.mean), v.dot(&self.mean), u.dot(&cu), v.dot(&cv), u.dot(&cv))
    }

    /// `⟨c†c⟩` on `mode`.
    pub fn mean_photon_number(&self, mode: usize) -> Result<f64> {
        check_mode(self.n_modes, mode)?;
        let (x, y) = (2 * mode, 2 * mode + 1);
        Ok(self.cov[(x, x)] + self.cov[(y, y)] + self.mean[x].powi(2) + self.mean[y].powi(2) - 0.5)
    }

    /// `det(4·cov)`; equals 1 for pure states.
    pub fn purity_determinant(&self) -> f64 {
        (&self.cov * 4.0).determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + (i/4)Ω`; non-negative
    /// for physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        let omega = symplectic_form(self.n_modes);
        let m = DMatrix::from_fn(2 * self.n_modes, 2 * self.n_modes, |r, c| {
            Complex64::new(self.cov[(r, c)], 0.25 * omega[(r, c)])
        });
        m.symmetric_eigenvalues().min()
    }

    fn single_mode(&self) -> Result<()> {
        if self.n_modes != 1 {
            return Err(invalid(format!("expected a single-mode state, got {} modes", self.n_modes)));
        }
        Ok(())
    }

    /// `⟨α|ρ|α⟩` from the Gaussian overlap formula.
    pub fn fidelity_with_coherent(&self, alpha: Complex64) -> Result<f64> {
        self.single_mode()?;
        let s = [
            self.cov[(0, 0)] + 0.25,
            self.cov[(0, 1)],
            self.cov[(1, 0)],
            self.cov[(1, 1)] + 0.25,
        ];
        let det = s[0] * s[3] - s[1] * s[2];
        let d = [self.mean[0] - alpha.re, self.mean[1] - alpha.im];
        // dᵀ S⁻¹ d for the 2x2 case
        let quad = (s[3] * d[0] * d[0] - (s[1] + s[2]) * d[0] * d[1] + s[0] * d[1] * d[1]) / det;
        Ok((-0.5 * quad).exp() / (2.0 * det.sqrt()))
    }

    /// Husimi function `Q(z) = ⟨z|ρ|z⟩/π`.
    pub fn husimi_q(&self, z: Complex64) -> Result<f64> {
        Ok(self.fidelity_with_coherent(z)? / std::f64::consts::PI)
    }
}
