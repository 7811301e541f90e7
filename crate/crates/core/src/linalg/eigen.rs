//! Hermitian eigendecomposition and singular values.
//!
//! `eigh` reduces the (symmetrized) input to a real symmetric tridiagonal
//! matrix with complex Householder reflections, rotates the off-diagonal
//! phases away, and finishes with implicit-shift QL iterations that also
//! accumulate the eigenvectors. Singular values come from one-sided
//! (Hestenes) Jacobi, which keeps small singular values accurate to working
//! precision relative to the largest one.

use num_complex::Complex;

use super::ComplexMatrix;
use crate::scalar::{cr, Real};

/// Eigenvalues in ascending order with matching unit eigenvectors stored as
/// the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.vectors.column(k)
    }

    /// `V f(Λ) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            if fv[k] == T::zero() {
                continue;
            }
            for r in 0..n {
                let a = v[(r, k)] * fv[k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for c in 0..n {
                    out[(r, c)] += a * v[(c, k)].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of the Hermitian part `(A + A^dagger)/2` of a square matrix.
pub fn eigh<T: Real>(a: &ComplexMatrix<T>) -> HermitianEigen<T> {
    assert!(a.is_square(), "eigh of a non-square matrix");
    let n = a.rows();
    let mut h = a.hermitian_part();
    if n == 1 {
        return HermitianEigen {
            values: vec![h[(0, 0)].re],
            vectors: ComplexMatrix::identity(1),
        };
    }

    // Householder reduction: after step k, column k below the subdiagonal is zero.
    let mut reflectors: Vec<Option<Vec<Complex<T>>>> = Vec::with_capacity(n - 2);
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x: Vec<Complex<T>> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let tail: T = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == T::zero() {
            reflectors.push(None);
            continue;
        }
        let alpha = (x[0].norm_sqr() + tail).sqrt();
        let x0n = x[0].norm();
        let phase = if x0n == T::zero() {
            cr(T::one())
        } else {
            x[0] / x0n
        };
        let mut v = x;
        v[0] += phase * alpha;
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        let beta = T::lit(2.0) / vnorm2;

        // p = beta * H_sub v, on the trailing block (rows/cols k+1..n).
        let off = k + 1;
        let mut p = vec![cr(T::zero()); len];
        for (i, pi) in p.iter_mut().enumerate() {
            let mut acc = cr(T::zero());
            for (j, vj) in v.iter().enumerate() {
                acc += h[(off + i, off + j)] * vj;
            }
            *pi = acc * beta;
        }
        let vp: Complex<T> = v
            .iter()
            .zip(&p)
            .fold(cr(T::zero()), |acc, (a, b)| acc + a.conj() * b);
        let kk = beta * vp.re * T::lit(0.5);
        let q: Vec<Complex<T>> = p.iter().zip(&v).map(|(pi, vi)| *pi - *vi * kk).collect();
        for i in 0..len {
            for j in 0..len {
                let upd = v[i] * q[j].conj() + q[i] * v[j].conj();
                h[(off + i, off + j)] -= upd;
            }
        }
        // Column k (and row k) of the reduced matrix.
        let sub = -(phase * alpha);
        h[(off, k)] = sub;
        h[(k, off)] = sub.conj();
        for i in 1..len {
            h[(off + i, k)] = cr(T::zero());
            h[(k, off + i)] = cr(T::zero());
        }
        reflectors.push(Some(v));
    }

    // Q = H_0 H_1 ... H_{n-3}
    let mut q = ComplexMatrix::<T>::identity(n);
    for (k, refl) in reflectors.iter().enumerate().rev() {
        let Some(v) = refl else { continue };
        let off = k + 1;
        let vnorm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        let beta = T::lit(2.0) / vnorm2;
        for c in 0..n {
            let mut dot = cr(T::zero());
            for (i, vi) in v.iter().enumerate() {
                dot += vi.conj() * q[(off + i, c)];
            }
            if dot.re == T::zero() && dot.im == T::zero() {
                continue;
            }
            let s = dot * beta;
            for (i, vi) in v.iter().enumerate() {
                q[(off + i, c)] -= *vi * s;
            }
        }
    }

    // Rotate the complex off-diagonal into nonnegative reals.
    let mut d: Vec<T> = (0..n).map(|i| h[(i, i)].re).collect();
    let mut e: Vec<T> = vec![T::zero(); n];
    let mut phase = cr(T::one());
    for c in 0..n {
        if c > 0 {
            let off = h[(c, c - 1)];
            let m = off.norm();
            e[c - 1] = m;
            if m > T::zero() {
                phase = phase * (off / m);
            }
        }
        if phase != cr(T::one()) {
            for r in 0..n {
                q[(r, c)] = q[(r, c)] * phase;
            }
        }
    }

    tql2(&mut d, &mut e, &mut q);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| q[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Implicit QL on a real symmetric tridiagonal matrix (diagonal `d`,
/// off-diagonal `e[i]` between rows `i` and `i+1`), accumulating the rotations
/// into the columns of `v`.
fn tql2<T: Real>(d: &mut [T], e: &mut [T], v: &mut ComplexMatrix<T>) {
    let n = d.len();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    e[n - 1] = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    break;
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                let mut i = m;
                while i > l {
                    i -= 1;
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let hk = v[(k, i + 1)];
                        let vk = v[(k, i)];
                        v[(k, i + 1)] = vk * s + hk * c;
                        v[(k, i)] = vk * c - hk * s;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
}

/// Eigenvalues (ascending) of the Hermitian part of `a`.
pub fn eigvalsh<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    eigh(a).values
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &ComplexMatrix<T>) -> Vec<T> {
    // Orthogonalize the columns of the taller orientation.
    let work = if a.rows() >= a.cols() {
        a.clone()
    } else {
        a.adjoint()
    };
    let (rows, cols) = (work.rows(), work.cols());
    let mut g: Vec<Vec<Complex<T>>> = (0..cols).map(|c| work.column(c)).collect();
    let tol = T::epsilon() * T::lit(rows as f64).sqrt();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (gp, gq) = {
                    let (left, right) = g.split_at_mut(q);
                    (&mut left[p], &mut right[0])
                };
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = cr(T::zero());
                for (x, y) in gp.iter().zip(gq.iter()) {
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let gabs = gamma.norm();
                if gabs == T::zero() || gabs <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = gamma.conj() / gabs;
                let zeta = (beta - alpha) / (T::lit(2.0) * gabs);
                let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let cs = T::one() / (T::one() + t * t).sqrt();
                let sn = cs * t;
                for (x, y) in gp.iter_mut().zip(gq.iter_mut()) {
                    let yt = *y * ph;
                    let nx = *x * cs - yt * sn;
                    let ny = *x * sn + yt * cs;
                    *x = nx;
                    *y = ny;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = g
        .iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt())
        .collect();
    let _ = rows;
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    fn sample(n: usize, seed: u64) -> ComplexMatrix<f64> {
        // small deterministic LCG so these unit tests do not depend on rand
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        ComplexMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn reconstructs_random_hermitian() {
        for n in 1..9 {
            let a = sample(n, n as u64).hermitian_part();
            let eig = eigh(&a);
            let back = eig.reconstruct_with(|x| x);
            assert!(back.max_abs_diff(&a) < 1e-13, "n={n}");
            let vv = eig.vectors.adjoint().matmul(&eig.vectors);
            assert!(vv.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-13);
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn diagonal_and_degenerate() {
        let a = ComplexMatrix::<f64>::real_diagonal(&[3.0, -1.0, 3.0, 0.0]);
        assert_eq!(eigvalsh(&a), vec![-1.0, 0.0, 3.0, 3.0]);
        let i = ComplexMatrix::<f64>::identity(5);
        assert!(eigvalsh(&i).iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn singular_values_of_rectangular() {
        let a = ComplexMatrix::<f64>::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, -4.0, 0.0]]).unwrap();
        let sv = singular_values(&a);
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
        assert_eq!(sv.len(), 2);
    }

    #[test]
    fn singular_values_match_gram_eigenvalues() {
        let a = sample(6, 99);
        let sv = singular_values(&a);
        let mut gram = eigvalsh(&a.adjoint().matmul(&a));
        gram.reverse();
        for (s, g) in sv.iter().zip(gram) {
            assert!((s * s - g).abs() < 1e-12);
        }
    }
}
