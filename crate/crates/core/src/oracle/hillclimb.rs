use crate::channels::ChoiMatrix;
use crate::linalg::{eigh, hermitian_trace_norm, ComplexMatrix};
use crate::random::{complex_gaussian, seeded};
use crate::scalar::{cr, Real};

use super::to_f64_matrix;

pub(crate) type CMat = ComplexMatrix<f64>;

/// `H(B) = (B ⊗ I) C (B ⊗ I)^dagger` for a reference-by-input matrix `B`.
pub(crate) fn probe_output(c: &CMat, b: &CMat, m: usize) -> CMat {
    c.conjugate_by(&b.kron(&CMat::identity(m)))
}

/// Alternating maximization of `||H(B)||_1` over `tr B^dagger B = 1`:
/// fix the sign pattern `W = sign H(B)`, then take `B` as the top
/// eigenvector of the quadratic form `B -> <W, H(B)>`. Each step is
/// nondecreasing. Returns the best value and its `B`.
pub(crate) fn seesaw(c: &CMat, n: usize, m: usize, start: CMat, max_iterations: usize) -> (f64, CMat) {
    let mut b = start;
    let mut value = hermitian_trace_norm(&probe_output(c, &b, m));
    for _ in 0..max_iterations {
        let h = probe_output(c, &b, m);
        let w = eigh(&h).reconstruct_with(|x| {
            if x > 0.0 {
                1.0
            } else if x < 0.0 {
                -1.0
            } else {
                0.0
            }
        });
        // Q[(l, j), (k, i)] = tr(W_{lk} C_{ij}) with blocks over the output factor
        let nn = n * n;
        let mut q = CMat::zeros(nn, nn);
        for l in 0..n {
            for k in 0..n {
                for j in 0..n {
                    for i in 0..n {
                        let mut acc = cr(0.0);
                        for r in 0..m {
                            for s in 0..m {
                                acc += w[(l * m + s, k * m + r)] * c[(i * m + r, j * m + s)];
                            }
                        }
                        q[(l * n + j, k * n + i)] = acc;
                    }
                }
            }
        }
        let eig = eigh(&q);
        let top = eig.vector(nn - 1);
        // B[l][i] is component (l * n + i)
        let cand = CMat::from_fn(n, n, |l, i| top[l * n + i]);
        let v = hermitian_trace_norm(&probe_output(c, &cand, m));
        if v <= value {
            break;
        }
        let gain = v - value;
        value = v;
        b = cand;
        if gain <= 1e-14 * value.max(1.0) {
            break;
        }
    }
    (value, b)
}

/// Lower bound on `||Δ||_◊` from `restarts` see-saw runs started at random
/// (Gaussian, normalized) reference-by-input matrices; restart `r` uses
/// stream `r` of `seed`, so the value is nondecreasing in `restarts`.
pub fn diamond_lower_hillclimb<T: Real>(delta: &ChoiMatrix<T>, restarts: usize, seed: u64) -> f64 {
    let (n, m) = (delta.dim_in(), delta.dim_out());
    let c = to_f64_matrix(delta.matrix()).scale(n as f64);
    if c.max_abs() == 0.0 {
        return 0.0;
    }
    let mut best = 0.0f64;
    for r in 0..restarts {
        let mut rng = seeded(seed, r as u64);
        let g: CMat = complex_gaussian(n, n, &mut rng);
        let g = g.scale(1.0 / g.frobenius_norm());
        let (v, _) = seesaw(&c, n, m, g, 200);
        best = best.max(v);
    }
    best
}

