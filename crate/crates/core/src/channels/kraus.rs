use crate::error::{Error, Result};
use crate::linalg::{col_vec, ComplexMatrix};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

use super::ChoiMatrix;

/// Completely positive map `rho -> sum_k K rho K^dagger` from dimension
/// `dim_in` to `dim_out`. An empty Kraus list is the zero map.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T> {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausChannel<T> {
    pub fn new(dim_in: usize, dim_out: usize, kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidChannel("dimensions must be positive".into()));
        }
        if let Some((i, k)) = kraus
            .iter()
            .enumerate()
            .find(|(_, k)| k.rows() != dim_out || k.cols() != dim_in)
        {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {i} is {}x{}, expected {dim_out}x{dim_in}",
                k.rows(),
                k.cols()
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self::unitary(ComplexMatrix::identity(dim))
    }

    /// Single-Kraus map `ad_U`. `U` need not be unitary.
    pub fn unitary(u: ComplexMatrix<T>) -> Self {
        Self {
            dim_in: u.cols(),
            dim_out: u.rows(),
            kraus: vec![u],
        }
    }

    pub fn zero(dim_in: usize, dim_out: usize) -> Self {
        Self {
            dim_in,
            dim_out,
            kraus: Vec::new(),
        }
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn into_kraus_ops(self) -> Vec<ComplexMatrix<T>> {
        self.kraus
    }

    /// `sum_k K rho K^dagger`.
    pub fn apply(&self, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "input is {}x{}, channel expects {}x{}",
                rho.rows(),
                rho.cols(),
                self.dim_in,
                self.dim_in
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out = out + rho.conjugate_by(k);
        }
        Ok(out)
    }

    /// Column-stacking superoperator `sum_k conj(K) ⊗ K`, acting on `col(rho)`.
    pub fn superoperator(&self) -> ComplexMatrix<T> {
        let mut s = ComplexMatrix::zeros(self.dim_out * self.dim_out, self.dim_in * self.dim_in);
        for k in &self.kraus {
            s = s + k.conj().kron(k);
        }
        s
    }

    /// `(1/dim_in) sum_k col(K) col(K)^dagger`.
    pub fn choi(&self) -> ChoiMatrix<T> {
        let side = self.dim_in * self.dim_out;
        let mut j = ComplexMatrix::zeros(side, side);
        let norm = T::one() / T::lit(self.dim_in as f64);
        for k in &self.kraus {
            let v = col_vec(k);
            for r in 0..side {
                let a = v[r] * norm;
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..side {
                    j[(r, c)] += a * v[c].conj();
                }
            }
        }
        ChoiMatrix::from_parts_unchecked(self.dim_in, self.dim_out, j)
    }

    /// Minimal number of Kraus operators: the rank of the Choi matrix.
    pub fn kraus_rank(&self) -> usize {
        self.choi().rank(&Tolerances::default())
    }

    /// `sum_k K^dagger K`.
    pub fn gram(&self) -> ComplexMatrix<T> {
        let mut g = ComplexMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            g = g + k.adjoint().matmul(k);
        }
        g
    }

    /// Max-abs deviation of `sum K^dagger K` from the identity.
    pub fn trace_preservation_error(&self) -> T {
        self.gram().max_abs_diff(&ComplexMatrix::identity(self.dim_in))
    }

    pub fn is_trace_preserving(&self, tol: T) -> bool {
        self.trace_preservation_error() <= tol
    }

    /// The map multiplied by a nonnegative scalar.
    pub fn scaled(&self, s: T) -> Self {
        assert!(s >= T::zero(), "CP maps can only be scaled by nonnegative reals");
        let r = s.sqrt();
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.kraus.iter().map(|k| k.scale(r)).collect(),
        }
    }

    /// Map sum (concatenated Kraus lists).
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch("summing channels of different shapes".into()));
        }
        let mut kraus = self.kraus.clone();
        kraus.extend(other.kraus.iter().cloned());
        Ok(Self { kraus, ..*self })
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut kraus = Vec::with_capacity(self.kraus.len() * other.kraus.len());
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.kron(b));
            }
        }
        Self {
            dim_in: self.dim_in * other.dim_in,
            dim_out: self.dim_out * other.dim_out,
            kraus,
        }
    }

    /// `I_ref ⊗ self`.
    pub fn extend_with_reference(&self, reference: usize) -> Self {
        KrausChannel::identity(reference).tensor(self)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if other.dim_out != self.dim_in {
            return Err(Error::DimensionMismatch("composition dimension mismatch".into()));
        }
        let mut kraus = Vec::new();
        for a in &self.kraus {
            for b in &other.kraus {
                kraus.push(a.matmul(b));
            }
        }
        Ok(Self {
            dim_in: other.dim_in,
            dim_out: self.dim_out,
            kraus,
        })
    }

    /// `tr C(rho)`.
    pub fn output_trace(&self, rho: &ComplexMatrix<T>) -> Result<T> {
        if rho.rows() != self.dim_in || rho.cols() != self.dim_in {
            return Err(Error::DimensionMismatch("input dimension".into()));
        }
        // tr(K rho K^dagger) = tr(K^dagger K rho)
        Ok(self.gram().matmul(rho).trace().re)
    }
}
