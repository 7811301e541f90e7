//! Process fidelities, diamond-distance closed forms and bounds, and the
//! Fuchs–van de Graaf bracket.
//!
//! Conventions: functions returning a diamond quantity say whether it is the
//! full norm `||Δ||_◊` or half of it. [`diamond_identity_stochastic`] and
//! [`uniform_diamond_exact`] are halved; the instrument bounds,
//! [`nonuniform_outcome_diamond`], and [`MetricsReport`] use full norms.

mod distance;
mod fidelity;
mod fvg;
mod report;

pub use distance::{
    branch_choi_distances, diamond_identity_stochastic, instrument_diamond_lower, instrument_diamond_lower_max,
    instrument_diamond_upper, nonuniform_outcome_diamond, saturating_probe, uniform_diamond_exact,
};
pub use fidelity::{
    fidelity_nonuniform_closed, fidelity_uniform_closed, instrument_fidelity_branchwise, process_fidelity,
    root_fidelity,
};
pub use fvg::{fvg_bounds, FvgBounds, SUPPORT_THRESHOLD};
pub use report::{build_report, Conventions, MetricsReport, ReportOptions};
