use num_complex::Complex;

use super::{eigh, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// A validated density operator: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::default())
    }

    pub fn new_with(matrix: ComplexMatrix<T>, tol: &Tolerances<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotDensity(format!(
                "{}x{} is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > tol.density {
            return Err(Error::NotDensity(format!("Hermitian deviation {dev:e}")));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol.density || tr.im.abs() > tol.density {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let min = eigh(&matrix).values[0];
        if min < -tol.density {
            return Err(Error::NotDensity(format!("eigenvalue {min:e}")));
        }
        Ok(Self { matrix })
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[Complex<T>]) -> Result<Self> {
        let norm2: T = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 == T::zero() || !norm2.is_finite() {
            return Err(Error::NotDensity("zero or non-finite state vector".into()));
        }
        let m = ComplexMatrix::outer(psi, psi).scale(T::one() / norm2);
        Ok(Self { matrix: m.hermitian_part() })
    }

    pub fn basis_state(dim: usize, j: usize) -> Self {
        Self {
            matrix: ComplexMatrix::basis_projector(dim, j),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(T::one() / T::lit(dim as f64)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kron(&other.matrix),
        }
    }
}
