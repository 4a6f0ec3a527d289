//! Truncated Fock-space backend.
//!
//! Multimode states are stored mode-major: for dims `(d₀, d₁, d₂)` the basis
//! state `|n₀, n₁, n₂⟩` sits at `(n₀·d₁ + n₁)·d₂ + n₂`. The three-mode
//! cloning network uses mode order `(c, a, b)`.

pub mod algebra;
pub mod density;
pub mod expm;
pub mod homodyne;
pub mod network;
pub mod operators;
pub mod smear;
pub mod sparse;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{invalid, Result};
use sparse::CsrMatrix;

pub use density::{reduced_density, trace_distance, DensityMatrix};
pub use expm::{expm_multiply, matrix_exponential};

/// Row-major strides for `dims`.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

pub(crate) fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(invalid(format!("every mode needs truncation dimension >= 2, got {dims:?}")));
    }
    Ok(())
}

/// Occupation numbers of flat index `idx`.
pub(crate) fn occupations(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut occ = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        occ[k] = idx % dims[k];
        idx /= dims[k];
    }
    occ
}

/// Pure state on a truncated multimode Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    dims: Vec<usize>,
    amplitudes: DVector<Complex64>,
}

/// Operator on a truncated multimode Fock space, stored sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dims: Vec<usize>,
    matrix: CsrMatrix,
}

impl FockVector {
    pub fn new(dims: Vec<usize>, amplitudes: DVector<Complex64>) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(invalid(format!("{} amplitudes for a space of dimension {total}", amplitudes.len())));
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn vacuum(dims: Vec<usize>) -> Result<Self> {
        Self::basis(dims.clone(), &vec![0; dims.len()])
    }

    /// Number state `|n₀, n₁, …⟩`.
    pub fn basis(dims: Vec<usize>, occ: &[usize]) -> Result<Self> {
        check_dims(&dims)?;
        if occ.len() != dims.len() || occ.iter().zip(&dims).any(|(n, d)| n >= d) {
            return Err(invalid(format!("occupation {occ:?} does not fit dims {dims:?}")));
        }
        let total: usize = dims.iter().product();
        let idx: usize = occ.iter().zip(strides(&dims)).map(|(n, s)| n * s).sum();
        let mut amplitudes = DVector::zeros(total);
        amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(Self { dims, amplitudes })
    }

    /// Truncated coherent state `|α⟩`, renormalized after truncation.
    pub fn coherent(dim: usize, alpha: Complex64) -> Result<Self> {
        check_dims(&[dim])?;
        let mut amp = DVector::zeros(dim);
        amp[0] = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 1..dim {
            amp[n] = amp[n - 1] * alpha / (n as f64).sqrt();
        }
        let mut v = Self { dims: vec![dim], amplitudes: amp };
        v.normalize();
        Ok(v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes /= Complex64::new(n, 0.0);
        }
    }

    /// `|self⟩ ⊗ |other⟩` with the modes of `other` appended.
    pub fn tensor(&self, other: &FockVector) -> FockVector {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let m = other.amplitudes.len();
        let amplitudes = DVector::from_fn(self.amplitudes.len() * m, |i, _| self.amplitudes[i / m] * other.amplitudes[i % m]);
        FockVector { dims, amplitudes }
    }

    /// Probability weight on the outermost level `n = d − 1` of `mode`.
    pub fn edge_population(&self, mode: usize) -> Result<f64> {
        if mode >= self.dims.len() {
            return Err(invalid(format!("mode {mode} out of range")));
        }
        let st = strides(&self.dims);
        let top = self.dims[mode] - 1;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| (i / st[mode]) % self.dims[mode] == top)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `⟨self|op|self⟩`.
    pub fn expectation(&self, op: &FockOperator) -> Result<Complex64> {
        if op.dims != self.dims {
            return Err(invalid(format!("operator dims {:?} differ from state dims {:?}", op.dims, self.dims)));
        }
        Ok(self.amplitudes.dotc(&op.matrix.matvec(&self.amplitudes)))
    }

    pub fn inner(&self, other: &FockVector) -> Result<Complex64> {
        if other.dims != self.dims {
            return Err(invalid("inner product of states on different spaces"));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }
}

impl FockOperator {
    pub fn new(dims: Vec<usize>, matrix: CsrMatrix) -> Result<Self> {
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

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.dims != self.dims {
            return Err(invalid(format!("operator dims {:?} differ from state dims {:?}", self.dims, v.dims)));
        }
        Ok(FockVector { dims: v.dims.clone(), amplitudes: self.matrix.matvec(&v.amplitudes) })
    }

    /// `exp(t·self)|v⟩`.
    pub fn exp_apply(&self, v: &FockVector, t: f64) -> Result<FockVector> {
        if v.dims != self.dims {
            return Err(invalid(format!("operator dims {:?} differ from state dims {:?}", self.dims, v.dims)));
        }
        Ok(FockVector { dims: v.dims.clone(), amplitudes: expm_multiply(&self.matrix, &v.amplitudes, t)? })
    }

    pub fn adjoint(&self) -> Self {
        Self { dims: self.dims.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn mul(&self, other: &FockOperator) -> Self {
        assert_eq!(self.dims, other.dims, "operator dims differ");
        Self { dims: self.dims.clone(), matrix: self.matrix.matmul(&other.matrix) }
    }

    pub fn commutator(&self, other: &FockOperator) -> Self {
        assert_eq!(self.dims, other.dims, "operator dims differ");
        Self { dims: self.dims.clone(), matrix: self.matrix.commutator(&other.matrix) }
    }

    pub fn lin_comb(&self, a: f64, other: &FockOperator, b: f64) -> Self {
        assert_eq!(self.dims, other.dims, "operator dims differ");
        Self {
            dims: self.dims.clone(),
            matrix: self.matrix.axpby(Complex64::new(a, 0.0), &other.matrix, Complex64::new(b, 0.0)),
        }
    }

    /// Mask of basis states whose every occupation is at most `d − 1 − guard`.
    pub fn interior_mask(&self, guard: usize) -> Vec<bool> {
        interior_mask(&self.dims, guard)
    }
}

pub(crate) fn interior_mask(dims: &[usize], guard: usize) -> Vec<bool> {
    let total: usize = dims.iter().product();
    (0..total)
        .map(|i| occupations(dims, i).iter().zip(dims).all(|(n, d)| n + 1 + guard <= *d))
        .collect()
}
