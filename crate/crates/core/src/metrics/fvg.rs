use crate::error::{Error, Result};
use crate::linalg::{support_projector, ComplexMatrix, DensityMatrix};
use crate::scalar::Real;

use super::fidelity::root_fidelity;

/// Fuchs–van de Graaf bracket of the trace distance with a support projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvgBounds<T> {
    /// `1 - tr(pi sigma)`
    pub lower: T,
    /// `(1/2) ||rho - sigma||_1`
    pub middle: T,
    /// `sqrt(1 - F(rho, sigma))`
    pub upper: T,
}

/// Support-projector threshold used when no projector is supplied.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

/// `lower <= middle <= upper` for any projector `pi` with `pi rho = rho`
/// (default: the support projector of `rho`).
pub fn fvg_bounds<T: Real>(
    rho: &DensityMatrix<T>,
    sigma: &DensityMatrix<T>,
    pi: Option<&ComplexMatrix<T>>,
) -> Result<FvgBounds<T>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!("states of dimension {} and {}", rho.dim(), sigma.dim())));
    }
    let pi = match pi {
        Some(p) => {
            if p.rows() != rho.dim() || p.cols() != rho.dim() {
                return Err(Error::DimensionMismatch("projector dimension".into()));
            }
            let deviation = p.matmul(rho.matrix()).max_abs_diff(rho.matrix());
            if deviation > T::lit(1e-9) {
                return Err(Error::InvalidProjector {
                    deviation: deviation.to_f64_lossy(),
                });
            }
            p.clone()
        }
        None => support_projector(rho.matrix(), T::lit(SUPPORT_THRESHOLD)),
    };
    let lower = T::one() - pi.matmul(sigma.matrix()).trace_re();
    let middle = crate::linalg::hermitian_trace_norm(&(rho.matrix() - sigma.matrix())) * T::lit(0.5);
    let f = root_fidelity(rho.matrix(), sigma.matrix())?;
    let upper = (T::one() - f * f).max(T::zero()).sqrt();
    Ok(FvgBounds { lower, middle, upper })
}
