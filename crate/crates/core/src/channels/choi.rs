use crate::error::{Error, Result};
use crate::linalg::{checked_psd_eigen, partial_trace, rank, uncol, ComplexMatrix};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

use super::KrausChannel;

/// Normalized Choi matrix `J(C) = (I ⊗ C)(Φ)` of a Hermiticity-preserving map.
///
/// Tensor order is (input copy) ⊗ (output); a trace-preserving map has unit
/// trace. Differences of CP maps are also represented here.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix<T> {
    dim_in: usize,
    dim_out: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn new(dim_in: usize, dim_out: usize, matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::new_with(dim_in, dim_out, matrix, &Tolerances::default())
    }

    /// Validates shape and Hermiticity (the map must preserve Hermiticity).
    pub fn new_with(dim_in: usize, dim_out: usize, matrix: ComplexMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        let side = dim_in * dim_out;
        if side == 0 || matrix.rows() != side || matrix.cols() != side {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix for {dim_in} -> {dim_out} must be {side}x{side}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > tol.hermitian * matrix.max_abs().max(T::one()) {
            return Err(Error::NotHermitian {
                deviation: dev.to_f64_lossy(),
            });
        }
        Ok(Self {
            dim_in,
            dim_out,
            matrix,
        })
    }

    pub(crate) fn from_parts_unchecked(dim_in: usize, dim_out: usize, matrix: ComplexMatrix<T>) -> Self {
        Self {
            dim_in,
            dim_out,
            matrix,
        }
    }

    pub fn from_kraus(ch: &KrausChannel<T>) -> Self {
        ch.choi()
    }

    /// Minimal Kraus decomposition from the eigenvectors with nonzero
    /// eigenvalue.
    pub fn to_kraus(&self) -> Result<KrausChannel<T>> {
        self.to_kraus_with(&Tolerances::default())
    }

    pub fn to_kraus_with(&self, tol: &Tolerances<T>) -> Result<KrausChannel<T>> {
        let eig = checked_psd_eigen(&self.matrix, tol)?;
        let max = eig.values.last().copied().unwrap_or_else(T::zero);
        let cutoff = tol.rank * max;
        let n = T::lit(self.dim_in as f64);
        let mut kraus = Vec::new();
        for (k, &lam) in eig.values.iter().enumerate().rev() {
            if lam <= cutoff || lam <= T::zero() {
                continue;
            }
            let s = (n * lam).sqrt();
            let v: Vec<_> = eig.vector(k).into_iter().map(|z| z * s).collect();
            kraus.push(uncol(&v, self.dim_out, self.dim_in)?);
        }
        KrausChannel::new(self.dim_in, self.dim_out, kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace_re()
    }

    pub fn rank(&self, tol: &Tolerances<T>) -> usize {
        rank(&self.matrix, tol)
    }

    /// Unnormalized Choi operator `dim_in * J = sum_ij |i><j| ⊗ C(|i><j|)`.
    pub fn unnormalized(&self) -> ComplexMatrix<T> {
        self.matrix.scale(T::lit(self.dim_in as f64))
    }

    /// Choi matrix of the difference map `self - other`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
            ..*self
        })
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            matrix: self.matrix.scale(s),
            ..*self
        }
    }

    /// `C(rho) = dim_in * tr_in[(rho^T ⊗ I) J]`.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(Error::DimensionMismatch("input dimension".into()));
        }
        let lifted = rho.transpose().kron(&ComplexMatrix::identity(self.dim_out));
        let prod = lifted.matmul(&self.unnormalized());
        partial_trace(&prod, &[self.dim_in, self.dim_out], &[1])
    }

    pub(crate) fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrices for {}->{} and {}->{}",
                self.dim_in, self.dim_out, other.dim_in, other.dim_out
            )));
        }
        Ok(())
    }
}
