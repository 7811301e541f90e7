//! Stochastic channels: weighted mixtures of Weyl–Heisenberg unitaries.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{col_vec, ComplexMatrix};
use crate::random::{dirichlet, seeded};
use crate::scalar::{c, cr, Real};
use crate::tolerance::Tolerances;

use super::{ChoiMatrix, KrausChannel};

/// Largest register dimension with a shipped Weyl basis.
pub const MAX_WEYL_DIM: usize = 4;

/// `omega^k` for `omega = exp(2πi/dim)`, exact at quarter turns.
fn root_of_unity<T: Real>(dim: usize, k: usize) -> Complex<T> {
    let k = k % dim;
    if (4 * k) % dim == 0 {
        return match 4 * k / dim {
            0 => c(T::one(), T::zero()),
            1 => c(T::zero(), T::one()),
            2 => c(-T::one(), T::zero()),
            _ => c(T::zero(), -T::one()),
        };
    }
    let theta = T::lit(2.0 * std::f64::consts::PI * k as f64 / dim as f64);
    c(theta.cos(), theta.sin())
}

/// Clock-and-shift operator `X^a Z^b` with `X|j> = |j+1>` and
/// `Z|j> = omega^j |j>`.
pub fn weyl_operator<T: Real>(dim: usize, a: usize, b: usize) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(dim, dim);
    for j in 0..dim {
        m[((j + a) % dim, j)] = root_of_unity(dim, (b * j) % dim);
    }
    m
}

/// Index of `X^a Z^b` in the lexicographic `(a, b)` order.
#[inline]
pub fn weyl_index(dim: usize, a: usize, b: usize) -> usize {
    a * dim + b
}

/// A possibly trace-decreasing stochastic channel
/// `T = sum_{a,b} w_{a,b} ad_{X^a Z^b}` with total weight `nu = sum w <= 1`.
///
/// The identity component is `w_{0,0} = nu * lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticChannel<T> {
    dim: usize,
    weights: Vec<T>,
}

impl<T: Real> StochasticChannel<T> {
    /// `weights` is indexed by [`weyl_index`] and must have `dim^2` entries.
    pub fn new(dim: usize, weights: Vec<T>) -> Result<Self> {
        if dim == 0 || dim > MAX_WEYL_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if weights.len() != dim * dim {
            return Err(Error::InvalidStochastic(format!(
                "{} weights for dimension {dim} (expected {})",
                weights.len(),
                dim * dim
            )));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < T::zero()) {
            return Err(Error::InvalidStochastic(format!("weight {w} is negative or non-finite")));
        }
        let nu: T = weights.iter().copied().sum();
        if nu > T::one() + Tolerances::<T>::default().trace {
            return Err(Error::InvalidStochastic(format!("total weight {nu} exceeds 1")));
        }
        Ok(Self { dim, weights })
    }

    /// Builds from sparse `(a, b, w)` entries; repeated entries accumulate.
    pub fn from_entries(dim: usize, entries: &[(usize, usize, T)]) -> Result<Self> {
        if dim == 0 || dim > MAX_WEYL_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut w = vec![T::zero(); dim * dim];
        for &(a, b, x) in entries {
            if a >= dim || b >= dim {
                return Err(Error::InvalidStochastic(format!(
                    "Weyl index ({a}, {b}) out of range for dimension {dim}"
                )));
            }
            w[weyl_index(dim, a, b)] += x;
        }
        Self::new(dim, w)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_entries(dim, &[(0, 0, T::one())])
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, vec![T::zero(); dim * dim])
    }

    /// Validated general constructor: accepts a Kraus set whose operators
    /// are each proportional to a Weyl unitary.
    pub fn from_kraus(ch: &KrausChannel<T>, tol: &Tolerances<T>) -> Result<Self> {
        let dim = ch.dim_in();
        if ch.dim_out() != dim {
            return Err(Error::InvalidStochastic("input and output dimensions differ".into()));
        }
        if dim > MAX_WEYL_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let basis: Vec<ComplexMatrix<T>> = (0..dim * dim)
            .map(|k| weyl_operator(dim, k / dim, k % dim))
            .collect();
        let mut w = vec![T::zero(); dim * dim];
        let inv_dim = T::one() / T::lit(dim as f64);
        for (i, k) in ch.kraus_ops().iter().enumerate() {
            let coeffs: Vec<Complex<T>> = basis.iter().map(|u| u.hs_inner(k) * inv_dim).collect();
            let (best, coef) = coeffs
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap())
                .map(|(j, z)| (j, *z))
                .expect("nonempty basis");
            let residual = (k - &basis[best].scale_complex(coef)).max_abs();
            if residual > tol.orthogonality * k.max_abs().max(T::one()) {
                return Err(Error::InvalidStochastic(format!(
                    "Kraus operator {i} is not proportional to a Weyl unitary (residual {residual:e})"
                )));
            }
            w[best] += coef.norm_sqr();
        }
        Self::new(dim, w)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, a: usize, b: usize) -> T {
        self.weights[weyl_index(self.dim, a, b)]
    }

    /// Total weight `nu = tr J(T)`.
    pub fn nu(&self) -> T {
        self.weights.iter().copied().sum()
    }

    /// Identity fraction `lambda = w_{0,0} / nu` (1 for the zero map).
    pub fn lambda(&self) -> T {
        let nu = self.nu();
        if nu == T::zero() {
            T::one()
        } else {
            self.weights[0] / nu
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == T::zero())
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        Self::new(self.dim, self.weights.iter().map(|&w| w * s).collect())
    }

    /// Trace-preserving part `T' = T / nu` (identity for the zero map).
    pub fn normalized(&self) -> Self {
        let nu = self.nu();
        if nu == T::zero() {
            return Self::identity(self.dim).expect("supported dimension");
        }
        Self {
            dim: self.dim,
            weights: self.weights.iter().map(|&w| w / nu).collect(),
        }
    }

    /// Kraus form `{sqrt(w) X^a Z^b}` over the nonzero weights, identity first.
    pub fn kraus(&self) -> KrausChannel<T> {
        let ops = self
            .weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(k, &w)| weyl_operator::<T>(self.dim, k / self.dim, k % self.dim).scale(w.sqrt()))
            .collect();
        KrausChannel::new(self.dim, self.dim, ops).expect("Weyl operators are dim x dim")
    }

    pub fn choi(&self) -> ChoiMatrix<T> {
        self.kraus().choi()
    }

    /// Weighted average of several channels of the same dimension.
    pub fn average(channels: &[&Self]) -> Result<Self> {
        let first = channels
            .first()
            .ok_or_else(|| Error::InvalidStochastic("average of an empty set".into()))?;
        if channels.iter().any(|ch| ch.dim != first.dim) {
            return Err(Error::InvalidStochastic("averaging channels of different dimension".into()));
        }
        let inv = T::one() / T::lit(channels.len() as f64);
        let mut w = vec![T::zero(); first.weights.len()];
        for ch in channels {
            for (acc, &x) in w.iter_mut().zip(&ch.weights) {
                *acc += x * inv;
            }
        }
        Self::new(first.dim, w)
    }
}

/// `(nu, lambda)` read off the Choi matrix: `nu = tr J`,
/// `nu * lambda = col(I)^dagger J col(I) / dim`, and `lambda = 1` when `nu = 0`.
pub fn nu_lambda<T: Real>(ch: &StochasticChannel<T>) -> (T, T) {
    choi_nu_lambda(&ch.choi())
}

/// [`nu_lambda`] for an arbitrary square-map Choi matrix.
pub fn choi_nu_lambda<T: Real>(j: &ChoiMatrix<T>) -> (T, T) {
    let dim = j.dim_in();
    let nu = j.trace();
    let id = col_vec(&ComplexMatrix::<T>::identity(dim));
    let jv = j.matrix().mul_vec(&id);
    let quad: Complex<T> = id.iter().zip(&jv).fold(cr(T::zero()), |a, (x, y)| a + x.conj() * y);
    let nl = quad.re / T::lit(dim as f64);
    let lambda = if nu == T::zero() { T::one() } else { nl / nu };
    (nu, lambda)
}

/// Validates an arbitrary Kraus set against the stochastic-channel
/// structure (mutually Hilbert–Schmidt-orthogonal operators, at most one with
/// nonzero trace and that one proportional to the identity, `sum K^dagger K
/// = nu I`) and returns `(nu, lambda)`.
pub fn stochastic_parameters<T: Real>(ch: &KrausChannel<T>, tol: &Tolerances<T>) -> Result<(T, T)> {
    let dim = ch.dim_in();
    if ch.dim_out() != dim {
        return Err(Error::InvalidStochastic("input and output dimensions differ".into()));
    }
    let ops = ch.kraus_ops();
    for i in 0..ops.len() {
        for j in (i + 1)..ops.len() {
            let ip = ops[i].hs_inner(&ops[j]).norm();
            if ip > tol.orthogonality {
                return Err(Error::InvalidStochastic(format!(
                    "Kraus operators {i} and {j} are not orthogonal (|tr(Ki^dagger Kj)| = {ip:e})"
                )));
            }
        }
    }
    let gram = ch.gram();
    let nu = gram.trace_re() / T::lit(dim as f64);
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(dim).scale(nu));
    if dev > tol.trace {
        return Err(Error::InvalidStochastic(format!(
            "sum K^dagger K is not proportional to the identity (deviation {dev:e})"
        )));
    }
    let traced: Vec<usize> = (0..ops.len())
        .filter(|&i| ops[i].trace().norm() > tol.orthogonality)
        .collect();
    let id_weight = match traced.as_slice() {
        [] => T::zero(),
        [i] => {
            let t = ops[*i].trace() / T::lit(dim as f64);
            let dev = (&ops[*i] - &ComplexMatrix::identity(dim).scale_complex(t)).max_abs();
            if dev > tol.orthogonality {
                return Err(Error::InvalidStochastic(format!(
                    "Kraus operator {i} has nonzero trace but is not proportional to the identity"
                )));
            }
            t.norm_sqr()
        }
        _ => {
            return Err(Error::InvalidStochastic(
                "more than one Kraus operator has nonzero trace".into(),
            ))
        }
    };
    let lambda = if nu == T::zero() { T::one() } else { id_weight / nu };
    Ok((nu, lambda))
}

/// Random stochastic channel on dimension `dim` with total weight `nu`:
/// Dirichlet(`concentration`) weights over the `dim^2` Weyl unitaries.
pub fn random_stochastic_channel<T: Real>(
    dim: usize,
    nu: T,
    seed: u64,
    concentration: f64,
) -> Result<StochasticChannel<T>> {
    let mut rng = seeded(seed, 0);
    sample_stochastic(dim, nu, concentration, &mut rng)
}

pub(crate) fn sample_stochastic<T: Real, R: Rng + ?Sized>(
    dim: usize,
    nu: T,
    concentration: f64,
    rng: &mut R,
) -> Result<StochasticChannel<T>> {
    if dim == 0 || dim > MAX_WEYL_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(nu >= T::zero() && nu <= T::one()) {
        return Err(Error::InvalidStochastic(format!("nu = {nu} outside [0, 1]")));
    }
    if !(concentration > 0.0 && concentration.is_finite()) {
        return Err(Error::InvalidStochastic(format!(
            "concentration must be positive and finite, got {concentration}"
        )));
    }
    let p = dirichlet(dim * dim, concentration, rng);
    StochasticChannel::new(dim, p.into_iter().map(|x| T::lit(x) * nu).collect())
}

/// Stochastic channel with prescribed `nu` and identity fraction `lambda`;
/// the error weight `nu (1 - lambda)` is spread over the non-identity
/// Weyl unitaries by a Dirichlet draw.
pub(crate) fn sample_stochastic_with_lambda<T: Real, R: Rng + ?Sized>(
    dim: usize,
    nu: f64,
    lambda: f64,
    concentration: f64,
    rng: &mut R,
) -> Result<StochasticChannel<T>> {
    if dim == 0 || dim > MAX_WEYL_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut w = vec![T::lit(nu * lambda)];
    if dim == 1 {
        w[0] = T::lit(nu);
    } else {
        let rest = dirichlet(dim * dim - 1, concentration, rng);
        w.extend(rest.into_iter().map(|x| T::lit(x * nu * (1.0 - lambda))));
    }
    StochasticChannel::new(dim, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_basis_is_orthogonal_and_unitary() {
        for d in 1..=MAX_WEYL_DIM {
            let ops: Vec<ComplexMatrix<f64>> =
                (0..d * d).map(|k| weyl_operator(d, k / d, k % d)).collect();
            assert_eq!(ops[0], ComplexMatrix::identity(d));
            for (i, a) in ops.iter().enumerate() {
                let uu = a.adjoint().matmul(a);
                assert!(uu.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-15);
                for (j, b) in ops.iter().enumerate() {
                    let ip = a.hs_inner(b);
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert!((ip - cr(expect)).norm() < 1e-14, "d={d} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn qubit_weyl_operators_are_real() {
        for k in 0..4 {
            assert!(weyl_operator::<f64>(2, k / 2, k % 2).is_real());
        }
    }

    #[test]
    fn nu_lambda_examples() {
        let id = StochasticChannel::<f64>::identity(2).unwrap();
        let (nu, lam) = nu_lambda(&id);
        assert!((nu - 1.0).abs() < 1e-15 && (lam - 1.0).abs() < 1e-15);

        let half = id.scaled(0.5).unwrap();
        let (nu, lam) = nu_lambda(&half);
        assert!((nu - 0.5).abs() < 1e-15 && (lam - 1.0).abs() < 1e-15);

        let flip = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.9), (1, 0, 0.1)]).unwrap();
        let (nu, lam) = nu_lambda(&flip);
        assert!((nu - 1.0).abs() < 1e-14 && (lam - 0.9).abs() < 1e-14);

        let zero = StochasticChannel::<f64>::zero(3).unwrap();
        assert_eq!(nu_lambda(&zero), (0.0, 1.0));
    }

    #[test]
    fn constructor_errors() {
        assert!(matches!(
            StochasticChannel::<f64>::new(5, vec![0.0; 25]),
            Err(Error::UnsupportedDimension(5))
        ));
        assert!(StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.7), (1, 1, 0.7)]).is_err());
        assert!(StochasticChannel::<f64>::from_entries(2, &[(0, 0, -0.1)]).is_err());
        assert!(StochasticChannel::<f64>::from_entries(2, &[(2, 0, 0.1)]).is_err());
        assert!(matches!(
            random_stochastic_channel::<f64>(5, 1.0, 0, 1.0),
            Err(Error::UnsupportedDimension(5))
        ));
    }

    #[test]
    fn random_is_deterministic() {
        let a = random_stochastic_channel::<f64>(3, 0.7, 42, 1.0).unwrap();
        let b = random_stochastic_channel::<f64>(3, 0.7, 42, 1.0).unwrap();
        assert_eq!(a, b);
        assert!((a.nu() - 0.7).abs() < 1e-12);
        let c = random_stochastic_channel::<f64>(3, 0.7, 43, 1.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn high_concentration_is_nearly_uniform() {
        let ch = random_stochastic_channel::<f64>(2, 1.0, 3, 1e7).unwrap();
        for &w in ch.weights() {
            assert!((w - 0.25).abs() < 1e-3);
        }
    }

    #[test]
    fn general_constructor_accepts_phased_weyl_kraus() {
        let phase = c(0.0, 1.0);
        let k0 = ComplexMatrix::<f64>::identity(2).scale(0.9f64.sqrt());
        let k1 = weyl_operator::<f64>(2, 1, 1).scale_complex(phase * 0.1f64.sqrt());
        let ch = KrausChannel::new(2, 2, vec![k0, k1]).unwrap();
        let st = StochasticChannel::from_kraus(&ch, &Tolerances::default()).unwrap();
        assert!((st.weight(0, 0) - 0.9).abs() < 1e-14);
        assert!((st.weight(1, 1) - 0.1).abs() < 1e-14);

        let hadamard = ComplexMatrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]])
            .unwrap()
            .scale(0.5f64.sqrt());
        let bad = KrausChannel::unitary(hadamard);
        assert!(StochasticChannel::from_kraus(&bad, &Tolerances::default()).is_err());
    }

    #[test]
    fn stochastic_parameters_for_general_orthogonal_sets() {
        let tol = Tolerances::default();
        let st = StochasticChannel::<f64>::from_entries(3, &[(0, 0, 0.5), (1, 2, 0.2), (2, 1, 0.1)]).unwrap();
        let (nu, lam) = stochastic_parameters(&st.kraus(), &tol).unwrap();
        assert!((nu - 0.8).abs() < 1e-14 && (lam - 0.625).abs() < 1e-14);

        // an orthogonal, traceless, non-Weyl partner of the identity
        let h = ComplexMatrix::<f64>::from_real_rows(&[&[1.0, 1.0], &[1.0, -1.0]]).unwrap().scale(0.5);
        let ch = KrausChannel::new(2, 2, vec![ComplexMatrix::identity(2).scale(0.5), h.scale(0.5f64.sqrt())])
            .unwrap();
        let (nu, lam) = stochastic_parameters(&ch, &tol).unwrap();
        assert!((nu - 0.5).abs() < 1e-14 && (lam - 0.5).abs() < 1e-14);

        let amp = KrausChannel::new(
            2,
            2,
            vec![
                ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.8f64.sqrt()]]).unwrap(),
                ComplexMatrix::from_real_rows(&[&[0.0, 0.2f64.sqrt()], &[0.0, 0.0]]).unwrap(),
            ],
        )
        .unwrap();
        assert!(stochastic_parameters(&amp, &tol).is_err());
    }
}
