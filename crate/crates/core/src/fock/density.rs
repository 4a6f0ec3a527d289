//! Density matrices on truncated Fock spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{check_dims, occupations, FockVector};
use crate::error::{invalid, Result};

/// Density matrix over one or more truncated modes (mode-major basis).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(dims: Vec<usize>, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(invalid(format!(
                "{}x{} matrix for a space of dimension {total}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub fn single_mode(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::new(vec![matrix.nrows()], matrix)
    }

    pub fn from_pure(v: &FockVector) -> Self {
        let a = v.amplitudes();
        Self { dims: v.dims().to_vec(), matrix: a * a.adjoint() }
    }

    /// Thermal state `Σ n̄ⁿ/(1+n̄)ⁿ⁺¹ |n⟩⟨n|`, cut at `dim` levels without renormalizing.
    pub fn thermal(dim: usize, nbar: f64) -> Result<Self> {
        check_dims(&[dim])?;
        if !(nbar >= 0.0) {
            return Err(invalid(format!("thermal occupation must be non-negative, got {nbar}")));
        }
        let q = nbar / (1.0 + nbar);
        let diag = DVector::from_fn(dim, |n, _| Complex64::new(q.powi(n as i32) / (1.0 + nbar), 0.0));
        Ok(Self { dims: vec![dim], matrix: DMatrix::from_diagonal(&diag) })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// Largest entry of `ρ − ρ†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).camax()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_spectrum(&self.matrix)
    }

    /// Hermitian within 1e-10, unit trace within 1e-8, eigenvalues ≥ −1e-8.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect() < 1e-10
            && (self.trace() - 1.0).abs() < 1e-8
            && self.eigenvalues().first().is_some_and(|&e| e >= -1e-8)
    }

    pub fn normalized(&self) -> Self {
        let t = self.trace();
        Self { dims: self.dims.clone(), matrix: &self.matrix / Complex64::new(t, 0.0) }
    }

    /// Single-mode matrix resized to `dim` levels by cropping or zero padding.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        if self.dims.len() != 1 {
            return Err(invalid("resizing is defined for single-mode states only"));
        }
        check_dims(&[dim])?;
        let keep = dim.min(self.dim());
        let mut m = DMatrix::zeros(dim, dim);
        m.view_mut((0, 0), (keep, keep)).copy_from(&self.matrix.view((0, 0), (keep, keep)));
        Ok(Self { dims: vec![dim], matrix: m })
    }

    fn require_single_mode(&self) -> Result<()> {
        if self.dims.len() != 1 {
            return Err(invalid(format!("expected a single-mode state, got dims {:?}", self.dims)));
        }
        Ok(())
    }

    pub fn mean_photon_number(&self) -> Result<f64> {
        self.require_single_mode()?;
        Ok((0..self.dim()).map(|n| n as f64 * self.matrix[(n, n)].re).sum())
    }

    /// `⟨c⟩` of a single-mode state.
    pub fn mean_amplitude(&self) -> Result<Complex64> {
        self.require_single_mode()?;
        Ok((1..self.dim()).map(|n| self.matrix[(n, n - 1)] * (n as f64).sqrt()).sum())
    }

    /// `⟨c²⟩` of a single-mode state.
    fn mean_amplitude_squared(&self) -> Complex64 {
        (2..self.dim()).map(|n| self.matrix[(n, n - 2)] * ((n * (n - 1)) as f64).sqrt()).sum()
    }

    /// Mean and variance of `(c e^{−iφ} + c† e^{iφ})/2`.
    pub fn quadrature_moments(&self, phase: f64) -> Result<(f64, f64)> {
        self.require_single_mode()?;
        let e = Complex64::from_polar(1.0, -phase);
        let c = self.mean_amplitude()?;
        let c2 = self.mean_amplitude_squared();
        let n = self.mean_photon_number()?;
        let mean = (c * e).re;
        // ⟨x_φ²⟩ = (c²e^{−2iφ} + h.c. + 2c†c + 1)/4
        let second = (2.0 * (c2 * e * e).re + 2.0 * n + 1.0) / 4.0;
        Ok((mean, second - mean * mean))
    }

    /// `⟨α|ρ|α⟩` using the exact (untruncated-normalization) coherent amplitudes.
    pub fn fidelity_with_coherent(&self, alpha: Complex64) -> Result<f64> {
        self.require_single_mode()?;
        let mut amp = DVector::zeros(self.dim());
        amp[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 1..self.dim() {
            amp[n] = amp[n - 1] * alpha / (n as f64).sqrt();
        }
        Ok(amp.dotc(&(&self.matrix * &amp)).re)
    }
}

/// Reduced state of the listed modes, in the order given.
pub fn reduced_density_modes(state: &FockVector, keep: &[usize]) -> Result<DensityMatrix> {
    let dims = state.dims();
    if keep.is_empty() {
        return Err(invalid("reduced state needs at least one mode"));
    }
    for (k, &m) in keep.iter().enumerate() {
        if m >= dims.len() || keep[..k].contains(&m) {
            return Err(invalid(format!("bad mode list {keep:?} for {} modes", dims.len())));
        }
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|m| !keep.contains(m)).collect();
    let kdims: Vec<usize> = keep.iter().map(|&m| dims[m]).collect();
    let rdims: Vec<usize> = rest.iter().map(|&m| dims[m]).collect();
    let kt: usize = kdims.iter().product();
    let rt: usize = rdims.iter().product();
    let mut psi = DMatrix::<Complex64>::zeros(kt, rt);
    for (i, a) in state.amplitudes().iter().enumerate() {
        let occ = occupations(dims, i);
        let ki = keep.iter().fold(0, |acc, &m| acc * dims[m] + occ[m]);
        let ri = rest.iter().fold(0, |acc, &m| acc * dims[m] + occ[m]);
        psi[(ki, ri)] = *a;
    }
    DensityMatrix::new(kdims, &psi * psi.adjoint())
}

/// Single-mode reduced state: partial trace over every other mode.
pub fn reduced_density(state: &FockVector, mode: usize) -> Result<DensityMatrix> {
    reduced_density_modes(state, &[mode])
}

/// `½‖r1 − r2‖₁` from the singular values of the Hermitian difference.
pub fn trace_distance(r1: &DensityMatrix, r2: &DensityMatrix) -> Result<f64> {
    if r1.dims != r2.dims {
        return Err(invalid(format!("dimension mismatch: {:?} vs {:?}", r1.dims, r2.dims)));
    }
    let diff = &r1.matrix - &r2.matrix;
    let h = (&diff + diff.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(0.5 * h.singular_values().sum())
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
///
/// Rows and columns that vanish identically are split off first: nalgebra's
/// symmetric eigensolver returns NaN on some matrices with many exact zeros,
/// such as the difference of two twin beams.
fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let n = h.nrows();
    let support: Vec<usize> = (0..n).filter(|&i| h.row(i).iter().any(|z| *z != Complex64::new(0.0, 0.0))).collect();
    let mut e: Vec<f64> = h.select_rows(&support).select_columns(&support).symmetric_eigenvalues().iter().copied().collect();
    e.resize(n, 0.0);
    e.sort_by(f64::total_cmp);
    e
}
