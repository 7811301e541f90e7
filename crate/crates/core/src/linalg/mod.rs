//! Dense complex linear algebra: vectorization, tensor products, partial
//! traces, Hermitian spectral functions, and norms.

mod density;
mod eigen;
pub mod json;
mod matrix;

pub use density::DensityMatrix;
pub use eigen::{eigh, eigvalsh, singular_values, HermitianEigen};
pub use matrix::ComplexMatrix;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, Real};
use crate::tolerance::Tolerances;

/// Column-stacking vectorization `col(A)`.
pub fn col_vec<T: Real>(a: &ComplexMatrix<T>) -> Vec<Complex<T>> {
    let (r, c) = (a.rows(), a.cols());
    let mut v = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            v.push(a[(i, j)]);
        }
    }
    v
}

/// Inverse of [`col_vec`].
pub fn uncol<T: Real>(v: &[Complex<T>], rows: usize, cols: usize) -> Result<ComplexMatrix<T>> {
    if v.len() != rows * cols || rows == 0 || cols == 0 {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {rows}x{cols}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| v[j * rows + i]))
}

/// `A ⊗ B`; the convention for which `col(ABC) = (C^T ⊗ A) col(B)`.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.kron(b)
}

/// Traces out every tensor factor of `a` not listed in `keep`.
///
/// `dims` lists the factor dimensions in the same order as [`kron`]; the
/// surviving factors keep their relative order.
pub fn partial_trace<T: Real>(
    a: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    let total: usize = dims.iter().product();
    if !a.is_square() || a.rows() != total || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix is not compatible with factor dimensions {dims:?}",
            a.rows(),
            a.cols()
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor index {bad} out of range for {} factors",
            dims.len()
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !kept.contains(i)).collect();

    // strides of each factor in the flat index
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let kdims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let kdim: usize = kdims.iter().product();
    let tdim: usize = tdims.iter().product();

    let offsets = |sel: &[usize], sub: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for k in (0..sel.len()).rev() {
            off += (idx % sub[k]) * strides[sel[k]];
            idx /= sub[k];
        }
        off
    };
    let koff: Vec<usize> = (0..kdim).map(|i| offsets(&kept, &kdims, i)).collect();
    let toff: Vec<usize> = (0..tdim).map(|i| offsets(&traced, &tdims, i)).collect();

    let mut out = ComplexMatrix::zeros(kdim, kdim);
    for r in 0..kdim {
        for c in 0..kdim {
            let mut acc = cr(T::zero());
            for &t in &toff {
                acc += a[(koff[r] + t, koff[c] + t)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Sum of singular values, `tr sqrt(A A^dagger)`.
pub fn trace_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    singular_values(a).into_iter().sum()
}

/// Trace norm of the Hermitian part of `a`, as the sum of absolute eigenvalues.
pub fn hermitian_trace_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    eigvalsh(a).into_iter().map(T::abs).sum()
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    singular_values(a).first().copied().unwrap_or_else(T::zero)
}

/// Number of singular values above `tol.rank * sigma_max`.
pub fn rank<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerances<T>) -> usize {
    let sv = singular_values(a);
    let Some(&max) = sv.first() else { return 0 };
    if max == T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol.rank * max).count()
}

/// Clamp threshold `psd_clamp * max(1, ||A||_2)` for a Hermitian matrix with
/// the given eigenvalues.
pub(crate) fn clamp_threshold<T: Real>(values: &[T], tol: &Tolerances<T>) -> T {
    let norm = values.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    tol.psd_clamp * norm.max(T::one())
}

/// Validates Hermiticity and positivity, returning the eigendecomposition.
pub(crate) fn checked_psd_eigen<T: Real>(
    a: &ComplexMatrix<T>,
    tol: &Tolerances<T>,
) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let dev = a.hermitian_deviation();
    let scale = a.max_abs().max(T::one());
    if dev > tol.hermitian * scale {
        return Err(Error::NotHermitian {
            deviation: dev.to_f64_lossy(),
        });
    }
    let eig = eigh(a);
    let floor = clamp_threshold(&eig.values, tol);
    if let Some(&min) = eig.values.first() {
        if min < -floor {
            return Err(Error::NotPsd {
                min_eigenvalue: min.to_f64_lossy(),
            });
        }
    }
    Ok(eig)
}

/// Positive semidefinite square root with default tolerances.
pub fn psd_sqrt<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    psd_sqrt_with(a, &Tolerances::default())
}

/// Positive semidefinite square root. Eigenvalues within the clamp
/// threshold below zero are set to zero.
pub fn psd_sqrt_with<T: Real>(a: &ComplexMatrix<T>, tol: &Tolerances<T>) -> Result<ComplexMatrix<T>> {
    let eig = checked_psd_eigen(a, tol)?;
    Ok(eig.reconstruct_with(|x| x.max(T::zero()).sqrt()))
}

/// Projects a Hermitian matrix onto the PSD cone (negative eigenvalues zeroed).
pub fn psd_part<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    eigh(a).reconstruct_with(|x| x.max(T::zero()))
}

/// Orthogonal projector onto eigenvectors whose eigenvalue exceeds `threshold`.
pub fn support_projector<T: Real>(a: &ComplexMatrix<T>, threshold: T) -> ComplexMatrix<T> {
    eigh(a).reconstruct_with(|x| if x > threshold { T::one() } else { T::zero() })
}
