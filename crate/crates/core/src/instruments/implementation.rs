use crate::channels::{ChoiMatrix, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::scalar::{cr, Real};
use crate::tolerance::Tolerances;

/// Ideal computational-basis measurement of a `D`-dimensional register next
/// to an idle `E`-dimensional one. Tensor order is (unmeasured E) ⊗ (measured D).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsystemMeasurement {
    d: usize,
    e: usize,
}

impl SubsystemMeasurement {
    pub fn new(d: usize, e: usize) -> Result<Self> {
        if d < 2 || e < 1 {
            return Err(Error::InvalidModel(format!(
                "subsystem measurement needs D >= 2 and E >= 1, got D = {d}, E = {e}"
            )));
        }
        Ok(Self { d, e })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// `pi_j = I_E ⊗ |j><j|`.
    pub fn projector<T: Real>(&self, j: usize) -> ComplexMatrix<T> {
        ComplexMatrix::identity(self.e).kron(&ComplexMatrix::basis_projector(self.d, j))
    }

    pub fn projectors<T: Real>(&self) -> Vec<ComplexMatrix<T>> {
        (0..self.d).map(|j| self.projector(j)).collect()
    }

    /// The instrument with branches `ad_{pi_j}`.
    pub fn instrument<T: Real>(&self) -> InstrumentImplementation<T> {
        let branches = (0..self.d).map(|j| KrausChannel::unitary(self.projector(j))).collect();
        InstrumentImplementation {
            d: self.d,
            e: self.e,
            branches,
        }
    }
}

/// The ideal instrument for a `D`/`E` split.
pub fn ideal_instrument<T: Real>(d: usize, e: usize) -> Result<InstrumentImplementation<T>> {
    Ok(SubsystemMeasurement::new(d, e)?.instrument())
}

/// A (possibly noisy) implementation of a subsystem measurement: one CP
/// branch `M_j` on dimension `E·D` per outcome, summing to a
/// trace-preserving map.
#[derive(Debug, Clone, PartialEq)]
pub struct InstrumentImplementation<T> {
    d: usize,
    e: usize,
    branches: Vec<KrausChannel<T>>,
}

impl<T: Real> InstrumentImplementation<T> {
    pub fn new(d: usize, e: usize, branches: Vec<KrausChannel<T>>) -> Result<Self> {
        Self::new_with(d, e, branches, &Tolerances::default())
    }

    pub fn new_with(d: usize, e: usize, branches: Vec<KrausChannel<T>>, tol: &Tolerances<T>) -> Result<Self> {
        let inst = Self::from_parts_unchecked(d, e, branches)?;
        let err = inst.trace_preservation_error();
        if err > tol.trace {
            return Err(Error::InvalidModel(format!(
                "sum of branches is not trace preserving (max deviation {err:e})"
            )));
        }
        Ok(inst)
    }

    /// Checks shapes only; the branch sum may be trace-decreasing.
    pub fn from_parts_unchecked(d: usize, e: usize, branches: Vec<KrausChannel<T>>) -> Result<Self> {
        SubsystemMeasurement::new(d, e)?;
        if branches.len() != d {
            return Err(Error::InvalidModel(format!("{} branches for D = {d}", branches.len())));
        }
        let n = d * e;
        if let Some(j) = branches.iter().position(|b| b.dim_in() != n || b.dim_out() != n) {
            return Err(Error::DimensionMismatch(format!(
                "branch {j} is {} -> {}, expected {n} -> {n}",
                branches[j].dim_in(),
                branches[j].dim_out()
            )));
        }
        Ok(Self { d, e, branches })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Side dimension `E·D` of each branch.
    pub fn dim(&self) -> usize {
        self.d * self.e
    }

    pub fn measurement(&self) -> SubsystemMeasurement {
        SubsystemMeasurement { d: self.d, e: self.e }
    }

    pub fn branches(&self) -> &[KrausChannel<T>] {
        &self.branches
    }

    pub fn branch(&self, j: usize) -> &KrausChannel<T> {
        &self.branches[j]
    }

    pub fn branch_chois(&self) -> Vec<ChoiMatrix<T>> {
        self.branches.iter().map(KrausChannel::choi).collect()
    }

    /// Max-abs deviation of `sum_j sum_K K^dagger K` from the identity.
    pub fn trace_preservation_error(&self) -> T {
        let n = self.dim();
        let mut g = ComplexMatrix::zeros(n, n);
        for b in &self.branches {
            g = g + b.gram();
        }
        g.max_abs_diff(&ComplexMatrix::identity(n))
    }

    /// `Θ(M)`: the channel `E·D -> E·D·D` sending each Kraus operator `K`
    /// of branch `j` to `K ⊗ |j>`, so the outcome register is the last factor.
    pub fn full_channel(&self) -> KrausChannel<T> {
        let n = self.dim();
        let mut ops = Vec::new();
        for (j, b) in self.branches.iter().enumerate() {
            let ket = ComplexMatrix::from_fn(self.d, 1, |r, _| if r == j { cr(T::one()) } else { cr(T::zero()) });
            ops.extend(b.kraus_ops().iter().map(|k| k.kron(&ket)));
        }
        KrausChannel::new(n, n * self.d, ops).expect("shapes are consistent")
    }

    /// `sum_j M_j`, the channel that forgets the outcome.
    pub fn total_channel(&self) -> KrausChannel<T> {
        let ops = self.branches.iter().flat_map(|b| b.kraus_ops().iter().cloned()).collect();
        KrausChannel::new(self.dim(), self.dim(), ops).expect("shapes are consistent")
    }

    /// Born-rule outcome distribution `p(j) = tr M_j(rho)`.
    pub fn born_probabilities(&self, rho: &DensityMatrix<T>) -> Result<Vec<T>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} for an instrument on {}",
                rho.dim(),
                self.dim()
            )));
        }
        self.branches.iter().map(|b| b.output_trace(rho.matrix())).collect()
    }
}

/// Free-function form of [`InstrumentImplementation::full_channel`].
pub fn full_channel<T: Real>(imp: &InstrumentImplementation<T>) -> KrausChannel<T> {
    imp.full_channel()
}

/// Free-function form of [`InstrumentImplementation::born_probabilities`].
pub fn born_probabilities<T: Real>(imp: &InstrumentImplementation<T>, rho: &DensityMatrix<T>) -> Result<Vec<T>> {
    imp.born_probabilities(rho)
}
