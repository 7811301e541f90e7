use num_complex::Complex;

use crate::channels::{maximally_entangled, KrausChannel, StochasticChannel};
use crate::error::{Error, Result};
use crate::instruments::{InstrumentImplementation, NonUniformStochasticModel, UniformStochasticModel};
use crate::linalg::{hermitian_trace_norm, ComplexMatrix, DensityMatrix};
use crate::random::{pure_state, seeded};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// `r(T) = (1 + nu)/2 - nu lambda`, which is `(1/2) ||T - I||_◊` for a
/// (possibly trace-decreasing) stochastic channel.
pub fn diamond_identity_stochastic<T: Real>(t: &StochasticChannel<T>) -> T {
    let half = T::lit(0.5);
    (T::one() + t.nu()) * half - t.weight(0, 0)
}

/// Lower bound on the full diamond norm `||Θ(M) - M||_◊` from a single
/// probe state `sigma_j = sigma ⊗ |j><j|`:
/// `1 - tr M_j(sigma_j) + ||M_j(sigma_j) - sigma_j||_1`.
///
/// `sigma` lives on `F ⊗ E` for any reference dimension `F` (inferred from
/// its size; `F = 1` means no reference), and `M_j` acts as `I_F ⊗ M_j`.
pub fn instrument_diamond_lower<T: Real>(
    imp: &InstrumentImplementation<T>,
    sigma: &DensityMatrix<T>,
    j: usize,
) -> Result<T> {
    let (d, e) = (imp.d(), imp.e());
    if j >= d {
        return Err(Error::DimensionMismatch(format!("outcome {j} out of range for D = {d}")));
    }
    if sigma.dim() % e != 0 {
        return Err(Error::DimensionMismatch(format!(
            "probe state of dimension {} is not on F ⊗ E with E = {e}",
            sigma.dim()
        )));
    }
    let reference = sigma.dim() / e;
    let sigma_j = sigma.matrix().kron(&ComplexMatrix::basis_projector(d, j));
    let branch = if reference == 1 {
        imp.branch(j).clone()
    } else {
        imp.branch(j).extend_with_reference(reference)
    };
    let out = branch.apply(&sigma_j)?;
    let kept = out.trace_re();
    Ok(T::one() - kept + hermitian_trace_norm(&(&out - &sigma_j)))
}

/// The probe that saturates [`instrument_diamond_lower`] for uniform
/// stochastic implementations: the maximally entangled state on `E ⊗ E`.
pub fn saturating_probe<T: Real>(e: usize) -> DensityMatrix<T> {
    DensityMatrix::new(maximally_entangled(e)).expect("maximally entangled state is a density matrix")
}

/// Maximum of [`instrument_diamond_lower`] over every outcome and a probe
/// set: the maximally mixed state and computational basis states on `E`,
/// the maximally entangled state on `E ⊗ E`, and `restarts` Haar-random pure
/// states on `E ⊗ E` (restart `r` drawn from stream `r` of `seed`, so the
/// value is nondecreasing in `restarts`).
pub fn instrument_diamond_lower_max<T: Real>(
    imp: &InstrumentImplementation<T>,
    restarts: usize,
    seed: u64,
) -> Result<T> {
    let e = imp.e();
    let mut probes = vec![DensityMatrix::maximally_mixed(e)];
    probes.extend((0..e).map(|k| DensityMatrix::basis_state(e, k)));
    if e > 1 {
        probes.push(saturating_probe(e));
    }
    for r in 0..restarts {
        let mut rng = seeded(seed, r as u64);
        let psi: Vec<Complex<T>> = pure_state(e * e, &mut rng);
        probes.push(DensityMatrix::pure(&psi)?);
    }
    let mut best = T::zero();
    for sigma in &probes {
        for j in 0..imp.d() {
            best = best.max(instrument_diamond_lower(imp, sigma, j)?);
        }
    }
    Ok(best)
}

/// Upper bound `D E sum_k ||J(M_k) - J(ad_{pi_k})||_1` on the full diamond
/// norm `||Θ(M) - M||_◊`.
pub fn instrument_diamond_upper<T: Real>(imp: &InstrumentImplementation<T>) -> T {
    branch_choi_distances(imp).into_iter().sum::<T>() * T::lit(imp.dim() as f64)
}

/// `||J(M_k) - J(ad_{pi_k})||_1` for each outcome `k`.
pub fn branch_choi_distances<T: Real>(imp: &InstrumentImplementation<T>) -> Vec<T> {
    let m = imp.measurement();
    imp.branches()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let ideal = KrausChannel::unitary(m.projector::<T>(k)).choi();
            hermitian_trace_norm(&(b.choi().matrix() - ideal.matrix()))
        })
        .collect()
}

/// Half diamond distance `(1/2) ||Θ(M) - M||_◊ = 1 - nu_00 lambda_00` of a
/// uniform stochastic implementation (1 when `nu_00 = 0`).
pub fn uniform_diamond_exact<T: Real>(model: &UniformStochasticModel<T>) -> T {
    T::one() - model.entry(0, 0).weight(0, 0)
}

/// Full diamond distance `max_j ||T_j - I_E||_◊ = max_j 2 (1 - lambda_j)`
/// for a model whose only errors are outcome-dependent, trace-preserving
/// `T_j = T_{0,0,j}`.
pub fn nonuniform_outcome_diamond<T: Real>(model: &NonUniformStochasticModel<T>) -> Result<T> {
    let d = model.d();
    let tol = Tolerances::<T>::default().trace;
    let mut worst = T::zero();
    for a in 0..d {
        for b in 0..d {
            for j in 0..d {
                let t = model.entry(a, b, j);
                if (a, b) != (0, 0) {
                    if !t.is_zero() {
                        return Err(Error::InvalidModel(format!(
                            "entry ({a}, {b}, {j}) is nonzero; only outcome-dependent (0, 0, j) errors are allowed"
                        )));
                    }
                    continue;
                }
                if (t.nu() - T::one()).abs() > tol {
                    return Err(Error::InvalidModel(format!(
                        "T_(0,0,{j}) has total weight {} (must be trace preserving)",
                        t.nu()
                    )));
                }
                worst = worst.max(T::lit(2.0) * (T::one() - t.lambda()));
            }
        }
    }
    Ok(worst)
}
