//! Seeded generators for test models.

use crate::channels::{sample_stochastic, sample_stochastic_with_lambda, KrausChannel, StochasticChannel};
use crate::error::Result;
use crate::linalg::{eigh, ComplexMatrix};
use crate::random::{complex_gaussian, dirichlet, seeded, uniform, SeededRng};
use crate::scalar::Real;

use super::{InstrumentImplementation, NonUniformStochasticModel, SubsystemMeasurement, UniformStochasticModel};

/// Splits `total` over `k` cells with the first cell drawn from
/// `[lo, hi) * total` and the rest Dirichlet(1).
fn biased_split(k: usize, total: f64, lo: f64, hi: f64, rng: &mut SeededRng) -> Vec<f64> {
    if k == 1 {
        return vec![total];
    }
    let first = uniform(rng, lo, hi);
    let mut out = vec![first * total];
    out.extend(dirichlet(k - 1, 1.0, rng).into_iter().map(|x| x * (1.0 - first) * total));
    out
}

fn error_channel<T: Real>(
    e: usize,
    nu: f64,
    identity_heavy: bool,
    rng: &mut SeededRng,
) -> Result<StochasticChannel<T>> {
    if identity_heavy {
        let lambda = uniform(rng, 0.5, 1.0);
        sample_stochastic_with_lambda(e, nu, lambda, 1.0, rng)
    } else {
        sample_stochastic(e, T::lit(nu), 1.0, rng)
    }
}

/// Random uniform model: `nu_00` uniform in `[0.5, 1)`, the remaining
/// weight spread over the other `(a, b)`; `lambda_00` uniform in `[0.5, 1)`.
pub fn random_uniform_model<T: Real>(d: usize, e: usize, seed: u64) -> Result<UniformStochasticModel<T>> {
    SubsystemMeasurement::new(d, e)?;
    let mut rng = seeded(seed, 0);
    let nu = biased_split(d * d, 1.0, 0.5, 1.0, &mut rng);
    let table = nu
        .iter()
        .enumerate()
        .map(|(k, &w)| error_channel(e, w, k == 0, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    UniformStochasticModel::new(d, e, table)
}

/// Random non-uniform model with `nu_{a,b,j} = mu_b q_j(a | b)`: the report
/// flip distribution `mu` is shared by all outcomes (which keeps the map
/// trace preserving) while the state-flip split `q_j` and every error
/// channel depend on `j`.
pub fn random_nonuniform_model<T: Real>(d: usize, e: usize, seed: u64) -> Result<NonUniformStochasticModel<T>> {
    SubsystemMeasurement::new(d, e)?;
    let mut rng = seeded(seed, 0);
    let mu = biased_split(d, 1.0, 0.6, 1.0, &mut rng);
    let mut table = vec![None; d * d * d];
    for j in 0..d {
        for (b, &mu_b) in mu.iter().enumerate() {
            let q = if b == 0 {
                biased_split(d, mu_b, 0.5, 1.0, &mut rng)
            } else {
                dirichlet(d, 1.0, &mut rng).into_iter().map(|x| x * mu_b).collect()
            };
            for (a, &w) in q.iter().enumerate() {
                table[(a * d + b) * d + j] = Some(error_channel(e, w, a == 0 && b == 0, &mut rng)?);
            }
        }
    }
    NonUniformStochasticModel::new(d, e, table.into_iter().map(|t| t.expect("filled")).collect())
}

/// Random general implementation: `kraus_per_branch` operators per outcome
/// drawn as `G_{j,0} = pi_j + eps N`, `G_{j,k>0} = eps N` (complex Gaussian
/// `N`, `eps` uniform in `[0.05, 0.4)`), then jointly normalized by
/// `S^{-1/2}` with `S = sum G^dagger G`.
pub fn random_general_implementation<T: Real>(
    d: usize,
    e: usize,
    kraus_per_branch: usize,
    seed: u64,
) -> Result<InstrumentImplementation<T>> {
    let m = SubsystemMeasurement::new(d, e)?;
    let n = d * e;
    let mut rng = seeded(seed, 0);
    let eps = T::lit(uniform(&mut rng, 0.05, 0.4));
    let mut raw: Vec<Vec<ComplexMatrix<T>>> = Vec::with_capacity(d);
    for j in 0..d {
        let ops = (0..kraus_per_branch.max(1))
            .map(|k| {
                let noise = complex_gaussian::<T, _>(n, n, &mut rng).scale(eps);
                if k == 0 {
                    m.projector::<T>(j) + noise
                } else {
                    noise
                }
            })
            .collect();
        raw.push(ops);
    }
    let mut s = ComplexMatrix::zeros(n, n);
    for g in raw.iter().flatten() {
        s = s + g.adjoint().matmul(g);
    }
    let inv_sqrt = eigh(&s.hermitian_part()).reconstruct_with(|x| T::one() / x.sqrt());
    let branches = raw
        .into_iter()
        .map(|ops| KrausChannel::new(n, n, ops.iter().map(|g| g.matmul(&inv_sqrt)).collect()))
        .collect::<Result<Vec<_>>>()?;
    InstrumentImplementation::new(d, e, branches)
}
