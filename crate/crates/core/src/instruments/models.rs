use crate::channels::{KrausChannel, StochasticChannel};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::Real;
use crate::tolerance::Tolerances;

use super::implementation::{InstrumentImplementation, SubsystemMeasurement};

/// Uniform stochastic implementation: outcome-independent errors `T_{a,b}`
/// on the unmeasured register, paired with a state flip `a` and a report
/// flip `b` on the measured register.
///
/// Branch `j` is `sum_{a,b} T_{a,b} ⊗ ad(|j+a><j+b|)` with indices mod `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformStochasticModel<T> {
    d: usize,
    e: usize,
    /// indexed by `a * D + b`
    table: Vec<StochasticChannel<T>>,
}

/// Outcome-dependent generalization with errors `T_{a,b,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonUniformStochasticModel<T> {
    d: usize,
    e: usize,
    /// indexed by `(a * D + b) * D + j`
    table: Vec<StochasticChannel<T>>,
}

fn check_table<T: Real>(d: usize, e: usize, table: &[StochasticChannel<T>], expected: usize) -> Result<()> {
    SubsystemMeasurement::new(d, e)?;
    if table.len() != expected {
        return Err(Error::InvalidModel(format!(
            "table has {} entries, expected {expected}",
            table.len()
        )));
    }
    if let Some(k) = table.iter().position(|t| t.dim() != e) {
        return Err(Error::InvalidModel(format!(
            "entry {k} acts on dimension {}, expected E = {e}",
            table[k].dim()
        )));
    }
    Ok(())
}

/// Branch `j` from the per-`(a, b)` errors acting on that branch.
fn branch<T: Real>(d: usize, e: usize, j: usize, t: impl Fn(usize, usize) -> StochasticChannel<T>) -> KrausChannel<T> {
    let mut ops = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let flip = ComplexMatrix::unit(d, (j + a) % d, (j + b) % d);
            let ch = t(a, b);
            ops.extend(ch.kraus().kraus_ops().iter().map(|k| k.kron(&flip)));
        }
    }
    KrausChannel::new(d * e, d * e, ops).expect("shapes are consistent")
}

impl<T: Real> UniformStochasticModel<T> {
    /// Validates `sum_{a,b} nu_{a,b} = 1`.
    pub fn new(d: usize, e: usize, table: Vec<StochasticChannel<T>>) -> Result<Self> {
        check_table(d, e, &table, d * d)?;
        let total: T = table.iter().map(StochasticChannel::nu).sum();
        if (total - T::one()).abs() > Tolerances::<T>::default().trace {
            return Err(Error::InvalidModel(format!("sum of nu_(a,b) is {total}, expected 1")));
        }
        Ok(Self { d, e, table })
    }

    /// Sparse construction; unlisted `(a, b)` entries are the zero map.
    pub fn from_entries(d: usize, e: usize, entries: Vec<(usize, usize, StochasticChannel<T>)>) -> Result<Self> {
        SubsystemMeasurement::new(d, e)?;
        let mut table = (0..d * d).map(|_| StochasticChannel::zero(e)).collect::<Result<Vec<_>>>()?;
        for (a, b, ch) in entries {
            if a >= d || b >= d {
                return Err(Error::InvalidModel(format!("index ({a}, {b}) out of range for D = {d}")));
            }
            table[a * d + b] = ch;
        }
        Self::new(d, e, table)
    }

    /// `T_{0,0} = I_E`, every other entry zero.
    pub fn perfect(d: usize, e: usize) -> Result<Self> {
        Self::from_entries(d, e, vec![(0, 0, StochasticChannel::identity(e)?)])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn table(&self) -> &[StochasticChannel<T>] {
        &self.table
    }

    pub fn entry(&self, a: usize, b: usize) -> &StochasticChannel<T> {
        &self.table[a * self.d + b]
    }

    pub fn nu00(&self) -> T {
        self.entry(0, 0).nu()
    }

    pub fn lambda00(&self) -> T {
        self.entry(0, 0).lambda()
    }

    pub fn expand(&self) -> InstrumentImplementation<T> {
        let branches = (0..self.d)
            .map(|j| branch(self.d, self.e, j, |a, b| self.entry(a, b).clone()))
            .collect();
        InstrumentImplementation::from_parts_unchecked(self.d, self.e, branches).expect("valid model")
    }

    /// The same errors for every outcome.
    pub fn to_nonuniform(&self) -> NonUniformStochasticModel<T> {
        let d = self.d;
        let table = (0..d * d * d).map(|k| self.table[k / d].clone()).collect();
        NonUniformStochasticModel { d, e: self.e, table }
    }
}

impl<T: Real> NonUniformStochasticModel<T> {
    /// Validates per-outcome normalization `sum_{a,b} nu_{a,b,j} = 1` and the
    /// trace-preservation condition `sum_{a,b} nu_{a,b,k-b} = 1` for every
    /// input basis state `k`.
    pub fn new(d: usize, e: usize, table: Vec<StochasticChannel<T>>) -> Result<Self> {
        check_table(d, e, &table, d * d * d)?;
        let tol = Tolerances::<T>::default().trace;
        let nu = |a: usize, b: usize, j: usize| table[(a * d + b) * d + j].nu();
        let mut failures = Vec::new();
        for j in 0..d {
            let s: T = (0..d * d).map(|k| nu(k / d, k % d, j)).sum();
            if (s - T::one()).abs() > tol {
                failures.push(format!("outcome {j}: sum of nu_(a,b,j) is {s}"));
            }
        }
        for k in 0..d {
            let s: T = (0..d * d).map(|ab| nu(ab / d, ab % d, (k + d - ab % d) % d)).sum();
            if (s - T::one()).abs() > tol {
                failures.push(format!("input |{k}>: weight reaching it is {s} (not trace preserving)"));
            }
        }
        if !failures.is_empty() {
            return Err(Error::InvalidModel(failures.join("; ")));
        }
        Ok(Self { d, e, table })
    }

    /// Sparse construction; unlisted `(a, b, j)` entries are the zero map.
    pub fn from_entries(
        d: usize,
        e: usize,
        entries: Vec<(usize, usize, usize, StochasticChannel<T>)>,
    ) -> Result<Self> {
        SubsystemMeasurement::new(d, e)?;
        let mut table = (0..d * d * d).map(|_| StochasticChannel::zero(e)).collect::<Result<Vec<_>>>()?;
        for (a, b, j, ch) in entries {
            if a >= d || b >= d || j >= d {
                return Err(Error::InvalidModel(format!(
                    "index ({a}, {b}, {j}) out of range for D = {d}"
                )));
            }
            table[(a * d + b) * d + j] = ch;
        }
        Self::new(d, e, table)
    }

    /// Outcome-dependent unmeasured-register errors only:
    /// `T_{0,0,j} = errors[j]`, all other entries zero.
    pub fn outcome_dependent(errors: Vec<StochasticChannel<T>>) -> Result<Self> {
        let d = errors.len();
        let e = errors.first().map_or(1, StochasticChannel::dim);
        let entries = errors.into_iter().enumerate().map(|(j, t)| (0, 0, j, t)).collect();
        Self::from_entries(d, e, entries)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn table(&self) -> &[StochasticChannel<T>] {
        &self.table
    }

    pub fn entry(&self, a: usize, b: usize, j: usize) -> &StochasticChannel<T> {
        &self.table[(a * self.d + b) * self.d + j]
    }

    pub fn expand(&self) -> InstrumentImplementation<T> {
        let branches = (0..self.d)
            .map(|j| branch(self.d, self.e, j, |a, b| self.entry(a, b, j).clone()))
            .collect();
        InstrumentImplementation::from_parts_unchecked(self.d, self.e, branches).expect("valid model")
    }

    /// `T_{a,b} = (1/D) sum_j T_{a,b,j}`.
    pub fn average_over_outcomes(&self) -> Result<UniformStochasticModel<T>> {
        let d = self.d;
        let table = (0..d * d)
            .map(|ab| {
                let group: Vec<&StochasticChannel<T>> = (0..d).map(|j| &self.table[ab * d + j]).collect();
                StochasticChannel::average(&group)
            })
            .collect::<Result<Vec<_>>>()?;
        UniformStochasticModel::new(d, self.e, table)
    }

    /// `Some` when the table does not depend on the outcome.
    pub fn as_uniform(&self) -> Option<UniformStochasticModel<T>> {
        let d = self.d;
        let constant = (0..d * d).all(|ab| (1..d).all(|j| self.table[ab * d + j] == self.table[ab * d]));
        constant.then(|| UniformStochasticModel {
            d,
            e: self.e,
            table: (0..d * d).map(|ab| self.table[ab * d].clone()).collect(),
        })
    }
}

/// Free-function form of [`UniformStochasticModel::expand`].
pub fn expand_uniform<T: Real>(model: &UniformStochasticModel<T>) -> InstrumentImplementation<T> {
    model.expand()
}

/// Free-function form of [`NonUniformStochasticModel::expand`].
pub fn expand_nonuniform<T: Real>(model: &NonUniformStochasticModel<T>) -> InstrumentImplementation<T> {
    model.expand()
}

/// Free-function form of [`NonUniformStochasticModel::average_over_outcomes`].
pub fn average_over_outcomes<T: Real>(model: &NonUniformStochasticModel<T>) -> Result<UniformStochasticModel<T>> {
    model.average_over_outcomes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instruments::ideal_instrument;
    use crate::linalg::DensityMatrix;

    fn readout_flip() -> UniformStochasticModel<f64> {
        UniformStochasticModel::from_entries(
            2,
            1,
            vec![
                (0, 0, StochasticChannel::from_entries(1, &[(0, 0, 0.8)]).unwrap()),
                (1, 1, StochasticChannel::from_entries(1, &[(0, 0, 0.2)]).unwrap()),
            ],
        )
        .unwrap()
    }

    #[test]
    fn perfect_model_is_ideal() {
        for (d, e) in [(2, 1), (2, 2), (3, 2)] {
            let m = UniformStochasticModel::<f64>::perfect(d, e).unwrap();
            assert_eq!(m.expand(), ideal_instrument(d, e).unwrap());
        }
    }

    #[test]
    fn readout_flip_probabilities() {
        let inst = readout_flip().expand();
        assert!(inst.trace_preservation_error() < 1e-15);
        let p = inst.born_probabilities(&DensityMatrix::basis_state(2, 0)).unwrap();
        assert!((p[0] - 0.8).abs() < 1e-15 && (p[1] - 0.2).abs() < 1e-15);
        // branch j reports |j> with weight 0.8 and |j+1> with weight 0.2
        for j in 0..2 {
            let out = inst.branch(j).apply(&ComplexMatrix::basis_projector(2, j)).unwrap();
            assert!(out.max_abs_diff(&ComplexMatrix::basis_projector(2, j).scale(0.8)) < 1e-15);
            let out = inst.branch(j).apply(&ComplexMatrix::basis_projector(2, (j + 1) % 2)).unwrap();
            assert!(out.max_abs_diff(&ComplexMatrix::basis_projector(2, (j + 1) % 2).scale(0.2)) < 1e-15);
        }
    }

    #[test]
    fn uniform_normalization_is_enforced() {
        let half = StochasticChannel::from_entries(1, &[(0, 0, 0.5)]).unwrap();
        let err = UniformStochasticModel::<f64>::from_entries(2, 1, vec![(0, 0, half)]).unwrap_err();
        assert!(matches!(err, Error::InvalidModel(_)));
        let wrong_dim = StochasticChannel::identity(2).unwrap();
        assert!(UniformStochasticModel::<f64>::from_entries(2, 1, vec![(0, 0, wrong_dim)]).is_err());
    }

    #[test]
    fn nonuniform_reports_each_failed_condition() {
        let one = StochasticChannel::<f64>::identity(1).unwrap();
        // branch 0 always reports a flip; normalized per outcome but not TP
        let err = NonUniformStochasticModel::from_entries(2, 1, vec![(0, 1, 0, one.clone()), (0, 0, 1, one)])
            .unwrap_err();
        let Error::InvalidModel(msg) = err else { panic!() };
        assert!(msg.contains("input |0>") && msg.contains("input |1>") && !msg.contains("outcome"));
    }

    #[test]
    fn constant_table_matches_uniform() {
        let m = readout_flip();
        let nu = m.to_nonuniform();
        assert_eq!(nu.expand(), m.expand());
        assert_eq!(nu.as_uniform().unwrap(), m);
        assert_eq!(nu.average_over_outcomes().unwrap(), m);
    }

    #[test]
    fn outcome_dependent_structure() {
        let t1 = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.8), (0, 1, 0.2)]).unwrap();
        let model =
            NonUniformStochasticModel::outcome_dependent(vec![StochasticChannel::identity(2).unwrap(), t1.clone()])
                .unwrap();
        let inst = model.expand();
        let proj = KrausChannel::unitary(ComplexMatrix::<f64>::basis_projector(2, 1));
        let expect = t1.kraus().tensor(&proj);
        assert!(inst.branch(1).choi().matrix().max_abs_diff(expect.choi().matrix()) < 1e-15);
        assert!(model.as_uniform().is_none());
    }

    #[test]
    fn averaging_two_outcomes() {
        let z = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.6), (0, 1, 0.4)]).unwrap();
        let model =
            NonUniformStochasticModel::outcome_dependent(vec![StochasticChannel::identity(2).unwrap(), z]).unwrap();
        let avg = model.average_over_outcomes().unwrap();
        let t = avg.entry(0, 0);
        assert!((t.weight(0, 0) - 0.8).abs() < 1e-15);
        assert!((t.weight(0, 1) - 0.2).abs() < 1e-15);
        let total: f64 = avg.table().iter().map(|t| t.nu()).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }
}
