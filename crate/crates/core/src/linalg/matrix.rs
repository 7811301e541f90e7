use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cr, Real};

/// Dense complex matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from separate real and imaginary row-major parts.
    pub fn from_parts(re: &[Vec<T>], im: &[Vec<T>]) -> Result<Self> {
        let rows = re.len();
        if rows == 0 || im.len() != rows {
            return Err(Error::DimensionMismatch(
                "real and imaginary parts must have the same nonzero row count".into(),
            ));
        }
        let cols = re[0].len();
        let mut data = Vec::with_capacity(rows * cols);
        for (r, (rr, ri)) in re.iter().zip(im).enumerate() {
            if rr.len() != cols || ri.len() != cols {
                return Err(Error::DimensionMismatch(format!("ragged row {r}")));
            }
            data.extend(rr.iter().zip(ri).map(|(&a, &b)| Complex::new(a, b)));
        }
        Self::new(rows, cols, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let re: Vec<Vec<T>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| T::lit(x)).collect())
            .collect();
        let im: Vec<Vec<T>> = re.iter().map(|r| vec![T::zero(); r.len()]).collect();
        Self::from_parts(&re, &im)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn diagonal(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn real_diagonal(diag: &[T]) -> Self {
        let d: Vec<_> = diag.iter().map(|&x| cr(x)).collect();
        Self::diagonal(&d)
    }

    /// `|u><v|`.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
    }

    /// Computational basis projector `|j><j|` on dimension `n`.
    pub fn basis_projector(n: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(j, j)] = cr(T::one());
        m
    }

    /// `|i><j|` on dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = cr(T::one());
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn trace(&self) -> Complex<T> {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).fold(cr(T::zero()), |a, b| a + b)
    }

    /// Real part of the trace; convenient for Hermitian operators.
    pub fn trace_re(&self) -> T {
        self.trace().re
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// Max-abs entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm())
            .fold(T::zero(), T::max)
    }

    /// `max |A - A^dagger|` entrywise.
    pub fn hermitian_deviation(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut dev = T::zero();
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square(), "Hermitian part of a non-square matrix");
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()) * half
        })
    }

    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == T::zero())
    }

    /// `tr(A^dagger B)`.
    pub fn hs_inner(&self, other: &Self) -> Complex<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul of {}x{} by {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let (n, k, m) = (self.rows, self.cols, rhs.cols);
        let mut out = Self::zeros(n, m);
        for i in 0..n {
            let orow = &mut out.data[i * m..(i + 1) * m];
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let brow = &rhs.data[p * m..(p + 1) * m];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(x)
                    .fold(cr(T::zero()), |acc, (a, b)| acc + *a * *b)
            })
            .collect()
    }

    /// `B A B^dagger`.
    pub fn conjugate_by(&self, b: &Self) -> Self {
        b.matmul(self).matmul(&b.adjoint())
    }

    /// Kronecker product `self ⊗ rhs` (row index `r = r1 * rhs.rows + r2`).
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, rhs.rows, rhs.cols);
        let mut out = Self::zeros(r1 * r2, c1 * c2);
        let oc = c1 * c2;
        for i in 0..r1 {
            for j in 0..c1 {
                let a = self.data[i * c1 + j];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for k in 0..r2 {
                    let base = (i * r2 + k) * oc + j * c2;
                    for l in 0..c2 {
                        out.data[base + l] = a * rhs.data[k * c2 + l];
                    }
                }
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

macro_rules! elementwise {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<T: Real> $tr<&ComplexMatrix<T>> for &ComplexMatrix<T> {
            type Output = ComplexMatrix<T>;
            fn $f(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
                assert_eq!(
                    (self.rows, self.cols),
                    (rhs.rows, rhs.cols),
                    "elementwise op on mismatched shapes"
                );
                ComplexMatrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a $op *b).collect(),
                }
            }
        }
        impl<T: Real> $tr<ComplexMatrix<T>> for ComplexMatrix<T> {
            type Output = ComplexMatrix<T>;
            fn $f(self, rhs: ComplexMatrix<T>) -> ComplexMatrix<T> {
                (&self).$f(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl<T: Real> Mul<&ComplexMatrix<T>> for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Mul<ComplexMatrix<T>> for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: ComplexMatrix<T>) -> ComplexMatrix<T> {
        self.matmul(&rhs)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}
