use crate::scalar::Real;

/// Every numerical threshold used by validation and rank decisions.
///
/// The defaults are tuned for `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Max-abs deviation from Hermiticity accepted by checks.
    pub hermitian: T,
    /// Relative eigenvalue clamp: eigenvalues above `-psd_clamp * max(1, ||A||_2)`
    /// count as zero.
    pub psd_clamp: T,
    /// Singular values below `rank * sigma_max` are treated as zero.
    pub rank: T,
    /// Trace-preservation and model-normalization checks.
    pub trace: T,
    /// Density-matrix checks (trace, eigenvalue floor).
    pub density: T,
    /// Hilbert-Schmidt orthogonality checks on Kraus/unitary sets.
    pub orthogonality: T,
}

impl<T: Real> Default for Tolerances<T> {
    fn default() -> Self {
        Self {
            hermitian: T::lit(1e-10),
            psd_clamp: T::lit(1e-9),
            rank: T::lit(1e-10),
            trace: T::lit(1e-9),
            density: T::lit(1e-10),
            orthogonality: T::lit(1e-10),
        }
    }
}
