//! Dense real-symmetric matrices used as a brute-force oracle.
//!
//! Everything here is `f64` and is only ever compared against the exact
//! layer, never fed back into it.

mod eigen;
mod operators;
mod states;

pub use eigen::{eigh, Eigh};
pub use operators::{
    alpha_state, build_ak, build_projectors, build_tl, computational_g, partial_transpose, pt_expansion,
    sigma_state, tensor_power, twirl_coefficients, twirled_m, PtExpansion, WernerProjectors, DENSE_CAP,
};
pub use states::{
    helstrom, load_state_json, povm_error, random_state, random_state_pair, separable_ball_povm, trace_norm, validate_state,
    SeparableBallPovm, StateFile,
};

use crate::error::{Error, Result};

/// Symmetry tolerance for externally supplied matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Row-major real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymmetric {
    dim: usize,
    data: Vec<f64>,
}

impl DenseSymmetric {
    /// Validates length and symmetry (within [`SYMMETRY_TOL`]).
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let m = Self { dim, data };
        m.check_symmetric(SYMMETRY_TOL)?;
        Ok(m)
    }

    pub(crate) fn from_raw(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(dim, vec![0.0; dim * dim])
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = (self.data[i * n + j] - self.data[j * n + i]).abs();
                if diff > tol || diff.is_nan() {
                    return Err(Error::NotSymmetric { row: i, col: j, diff });
                }
            }
        }
        Ok(())
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (m, k) = (self.dim, other.dim);
        let dim = m * k;
        let mut out = vec![0.0; dim * dim];
        for i1 in 0..m {
            for j1 in 0..m {
                let a = self.data[i1 * m + j1];
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..k {
                    let row = (i1 * k + i2) * dim + j1 * k;
                    let src = &other.data[i2 * k..(i2 + 1) * k];
                    for (o, b) in out[row..row + k].iter_mut().zip(src) {
                        *o = a * b;
                    }
                }
            }
        }
        Self::from_raw(dim, out)
    }

    /// `self + a·other`, in place.
    pub fn add_scaled(&mut self, a: f64, other: &Self) -> Result<()> {
        self.same_dim(other)?;
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += a * y;
        }
        Ok(())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.same_dim(other)?;
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Ok(Self::from_raw(self.dim, data))
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self::from_raw(self.dim, self.data.iter().map(|x| a * x).collect())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    /// `Tr(self · other)`; for symmetric arguments this is the entrywise dot.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(x, y)| x * y).sum())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }

    /// General product `self · other` as a row-major buffer (not symmetric in
    /// general).
    pub fn matmul(&self, other: &Self) -> Result<Vec<f64>> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * n..(k + 1) * n];
                for (o, b) in out[i * n..(i + 1) * n].iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `v ↦ self · v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Local dimensions of the tensor factors, most significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("invalid shape {dims:?}")));
        }
        Ok(Self { dims })
    }

    /// `n` copies of a `d×d` pair: `[d, d, …, d]` with `2n` factors.
    pub fn copies(d: usize, n: usize) -> Self {
        Self { dims: vec![d; 2 * n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Factor indices of the second party in a [`SubsystemShape::copies`] layout.
    pub fn second_parties(&self) -> Vec<usize> {
        (1..self.dims.len()).step_by(2).collect()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dims.len()];
        for f in (0..self.dims.len() - 1).rev() {
            s[f] = s[f + 1] * self.dims[f + 1];
        }
        s
    }
}
