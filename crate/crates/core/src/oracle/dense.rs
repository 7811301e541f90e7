//! Small dense real square matrices for the interior-point solver.

use crate::linalg::{eigvalsh, ComplexMatrix};
use crate::scalar::cr;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Dense {
    pub n: usize,
    pub d: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self { n, d: vec![0.0; n * n] }
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.d[i * n + i] = s;
        }
        m
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.d[i * self.n + j]
    }

    pub fn matmul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.d[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = &o.d[k * n..(k + 1) * n];
                let dst = &mut out.d[i * n..(i + 1) * n];
                for (x, &y) in dst.iter_mut().zip(row) {
                    *x += a * y;
                }
            }
        }
        out
    }

    pub fn add_scaled(&mut self, s: f64, o: &Self) {
        for (x, &y) in self.d.iter_mut().zip(&o.d) {
            *x += s * y;
        }
    }

    pub fn symmetrize(&mut self) {
        let n = self.n;
        for i in 0..n {
            for j in (i + 1)..n {
                let v = 0.5 * (self.d[i * n + j] + self.d[j * n + i]);
                self.d[i * n + j] = v;
                self.d[j * n + i] = v;
            }
        }
    }

    pub fn dot(&self, o: &Self) -> f64 {
        self.d.iter().zip(&o.d).map(|(a, b)| a * b).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.d.iter().map(|x| x * x).sum()
    }

    /// Lower Cholesky factor, `None` unless numerically positive definite.
    /// Right-looking and tiled so the trailing update streams through cache.
    pub fn cholesky(&self) -> Option<Self> {
        const TILE: usize = 48;
        let n = self.n;
        let mut a = self.d.clone();
        let mut k0 = 0;
        while k0 < n {
            let k1 = (k0 + TILE).min(n);
            // factor the panel columns k0..k1 (rows k0..n)
            for j in k0..k1 {
                let mut s = a[j * n + j];
                for k in k0..j {
                    s -= a[j * n + k] * a[j * n + k];
                }
                if !(s > 0.0) {
                    return None;
                }
                let ljj = s.sqrt();
                a[j * n + j] = ljj;
                for i in (j + 1)..n {
                    let mut s = a[i * n + j];
                    for k in k0..j {
                        s -= a[i * n + k] * a[j * n + k];
                    }
                    a[i * n + j] = s / ljj;
                }
            }
            // trailing update of the lower triangle
            for i in k1..n {
                let (head, tail) = a.split_at_mut(i * n);
                let ri = &tail[k0..k1];
                let mut upd = vec![0.0; i + 1 - k1];
                for (j, u) in (k1..=i).zip(upd.iter_mut()) {
                    let rj = if j == i { ri } else { &head[j * n + k0..j * n + k1] };
                    *u = dot(ri, rj);
                }
                for (j, u) in (k1..=i).zip(upd) {
                    tail[j] -= u;
                }
            }
            k0 = k1;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                a[i * n + j] = 0.0;
            }
        }
        Some(Self { n, d: a })
    }

    /// `L^{-1} B` for lower-triangular `self = L`.
    pub fn lower_solve(&self, b: &Self) -> Self {
        let n = self.n;
        let mut x = b.clone();
        for c in 0..n {
            for i in 0..n {
                let mut s = x.d[i * n + c];
                for k in 0..i {
                    s -= self.d[i * n + k] * x.d[k * n + c];
                }
                x.d[i * n + c] = s / self.d[i * n + i];
            }
        }
        x
    }

    /// `(L L^T)^{-1}` from the lower factor `self = L`.
    pub fn cholesky_inverse(&self) -> Self {
        let n = self.n;
        let linv = self.lower_solve(&Self::scaled_identity(n, 1.0));
        // L^{-T} L^{-1}
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in j..n {
                    s += linv.d[k * n + i] * linv.d[k * n + j];
                }
                out.d[i * n + j] = s;
                out.d[j * n + i] = s;
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let m = ComplexMatrix::<f64>::from_fn(self.n, self.n, |i, j| cr(self.at(i, j)));
        eigvalsh(&m).first().copied().unwrap_or(0.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in ra.iter().zip(rb) {
        s += x * y;
    }
    s
}

/// Solves `L L^T x = b` in place.
pub(crate) fn cholesky_solve(l: &Dense, b: &mut [f64]) {
    let n = l.n;
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l.d[i * n + k] * b[k];
        }
        b[i] = s / l.d[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l.d[k * n + i] * b[k];
        }
        b[i] = s / l.d[i * n + i];
    }
}
