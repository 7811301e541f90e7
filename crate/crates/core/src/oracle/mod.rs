//! Independent numerical reference for diamond norms: a semidefinite
//! program solved by a primal-dual interior-point method, with both bounds
//! certified on the unreduced problem. Works in `f64` regardless of the
//! caller's scalar type.

mod dense;
mod diamond;
mod hillclimb;
mod sdp;

pub use diamond::{diamond_norm, DiamondNormResult, DEFAULT_TOLERANCE, MAX_CHOI_SIDE, MAX_SDP_VARIABLES};
pub use hillclimb::diamond_lower_hillclimb;

use crate::linalg::ComplexMatrix;
use crate::scalar::{c, Real};

pub(crate) fn to_f64_matrix<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<f64> {
    ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        let z = a[(i, j)];
        c(z.re.to_f64_lossy(), z.im.to_f64_lossy())
    })
}
