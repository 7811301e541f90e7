//! Deterministic random sampling.
//!
//! All randomness flows from [`SeededRng`], a ChaCha8 stream cipher keyed by
//! a 64-bit seed with an independent 64-bit stream selector, so the integer
//! stream for a given `(seed, stream)` is fixed across platforms.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::scalar::Real;

pub type SeededRng = ChaCha8Rng;

/// Generator for `(seed, stream)`. Different streams are statistically
/// independent; stream 0 is the default.
pub fn seeded(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Entries i.i.d. standard complex Gaussian (unit variance per component).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(T::lit(normal(rng)), T::lit(normal(rng)))
    })
}

/// Haar-distributed pure state vector.
pub fn pure_state<T: Real, R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex<T>> {
    let v: Vec<Complex<T>> = (0..dim)
        .map(|_| Complex::new(T::lit(normal(rng)), T::lit(normal(rng))))
        .collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random density matrix `G G^dagger / tr(G G^dagger)` with `G` of shape
/// `dim x rank` (Hilbert-Schmidt measure when `rank == dim`).
pub fn density<T: Real, R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> DensityMatrix<T> {
    let g = complex_gaussian::<T, _>(dim, rank.max(1), rng);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace_re();
    DensityMatrix::new(m.scale(T::one() / tr).hermitian_part()).expect("Gram matrix is a state")
}

/// Dirichlet sample with a symmetric concentration parameter.
pub fn dirichlet<R: Rng + ?Sized>(k: usize, concentration: f64, rng: &mut R) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    loop {
        let g: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
        let s: f64 = g.iter().sum();
        if s > 0.0 && s.is_finite() {
            return g.into_iter().map(|x| x / s).collect();
        }
    }
}
