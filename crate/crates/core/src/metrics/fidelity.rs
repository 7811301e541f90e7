use crate::channels::ChoiMatrix;
use crate::error::{Error, Result};
use crate::instruments::{InstrumentImplementation, NonUniformStochasticModel, UniformStochasticModel};
use crate::linalg::{checked_psd_eigen, eigvalsh, ComplexMatrix};
use crate::scalar::Real;
use crate::tolerance::Tolerances;

/// Uhlmann root fidelity `||sqrt(A) sqrt(B)||_1 = tr sqrt(sqrt(A) B sqrt(A))`
/// of two PSD matrices (Hermitian parts taken, tiny negative eigenvalues clamped).
///
/// The square root is taken on the support of whichever argument has lower
/// numerical rank, so rounding noise in its null space cannot leak in as
/// `sqrt(eps)`-sized contributions.
pub fn root_fidelity<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let tol = Tolerances::default();
    let (ha, hb) = (a.hermitian_part(), b.hermitian_part());
    let ea = checked_psd_eigen(&ha, &tol)?;
    let eb = checked_psd_eigen(&hb, &tol)?;
    let n = a.rows();
    let (ka, kb) = (support(&ea.values, n), support(&eb.values, n));
    let (eig, keep, other) = if ka.len() <= kb.len() { (&ea, ka, &hb) } else { (&eb, kb, &ha) };
    if keep.is_empty() {
        return Ok(T::zero());
    }
    // W = V_S diag(sqrt(lambda_S)), so W^dagger other W has the nonzero spectrum of sqrt(A) B sqrt(A)
    let w = ComplexMatrix::from_fn(n, keep.len(), |i, k| eig.vectors[(i, keep[k])] * eig.values[keep[k]].sqrt());
    let inner = w.adjoint().matmul(other).matmul(&w);
    let vals = eigvalsh(&inner.hermitian_part());
    Ok(support(&vals, keep.len())
        .into_iter().map(|k| vals[k].sqrt()).sum())
}

/// Indices of eigenvalues above the rounding floor `8 n eps max|lambda|`.
fn support<T: Real>(values: &[T], n: usize) -> Vec<usize> {
    let max = values.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    let floor = T::lit(8.0 * n.max(1) as f64) * T::epsilon() * max;
    (0..values.len()).filter(|&k| values[k] > floor).collect()
}

/// Process fidelity `F(J_A, J_B) = ||sqrt(J_A) sqrt(J_B)||_1^2`.
pub fn process_fidelity<T: Real>(ja: &ChoiMatrix<T>, jb: &ChoiMatrix<T>) -> Result<T> {
    ja.check_same_shape(jb)?;
    let r = root_fidelity(ja.matrix(), jb.matrix())?;
    Ok(r * r)
}

fn check_instruments<T: Real>(a: &InstrumentImplementation<T>, b: &InstrumentImplementation<T>) -> Result<()> {
    if (a.d(), a.e()) != (b.d(), b.e()) {
        return Err(Error::DimensionMismatch(format!(
            "instruments with (D, E) = ({}, {}) and ({}, {})",
            a.d(),
            a.e(),
            b.d(),
            b.e()
        )));
    }
    Ok(())
}

/// `(sum_j sqrt F(J(A_j), J(B_j)))^2`, which equals the process fidelity of
/// the two full channels (outcome register included).
pub fn instrument_fidelity_branchwise<T: Real>(
    a: &InstrumentImplementation<T>,
    b: &InstrumentImplementation<T>,
) -> Result<T> {
    check_instruments(a, b)?;
    let mut s = T::zero();
    for (x, y) in a.branches().iter().zip(b.branches()) {
        s += root_fidelity(x.choi().matrix(), y.choi().matrix())?;
    }
    Ok(s * s)
}

/// Process fidelity of a uniform stochastic implementation to the ideal
/// instrument: `nu_00 * lambda_00`, the identity weight of `T_{0,0}`.
pub fn fidelity_uniform_closed<T: Real>(model: &UniformStochasticModel<T>) -> T {
    model.entry(0, 0).weight(0, 0)
}

/// `((1/D) sum_j sqrt(nu_{0,0,j} lambda_{0,0,j}))^2`.
pub fn fidelity_nonuniform_closed<T: Real>(model: &NonUniformStochasticModel<T>) -> T {
    let d = model.d();
    let s: T = (0..d).map(|j| model.entry(0, 0, j).weight(0, 0).sqrt()).sum();
    let s = s / T::lit(d as f64);
    s * s
}
