use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instruments::{ideal_instrument, ErrorModel};
use crate::scalar::Real;

use super::distance::{branch_choi_distances, instrument_diamond_lower_max, instrument_diamond_upper, uniform_diamond_exact};
use super::fidelity::{fidelity_nonuniform_closed, fidelity_uniform_closed, instrument_fidelity_branchwise};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReportOptions {
    /// Random probe states for the lower-bound maximization.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { restarts: 32, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub diamond: String,
    pub trace_distance: String,
}

impl Default for Conventions {
    fn default() -> Self {
        Self {
            diamond: "full-norm".into(),
            trace_distance: "half-norm".into(),
        }
    }
}

/// Figures of merit of an implementation against the ideal instrument.
///
/// Diamond quantities are full norms `||Θ(M) - M||_◊`; per-branch trace
/// distances are `(1/2) ||J(M_j) - J(ad_{pi_j})||_1`. For non-uniform models
/// `nu00` and `lambda00` describe the outcome-averaged `T_{0,0}`; both are
/// absent for general implementations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub fidelity: f64,
    pub diamond_lower: f64,
    pub diamond_upper: f64,
    pub diamond_exact: Option<f64>,
    pub nu00: Option<f64>,
    pub lambda00: Option<f64>,
    pub per_branch_trace_distances: Vec<f64>,
    pub conventions: Conventions,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn build_report<T: Real>(model: &ErrorModel<T>, options: &ReportOptions) -> Result<MetricsReport> {
    let imp = model.implementation();
    let f64_of = |x: T| x.to_f64_lossy();
    let (fidelity, exact, nu_lambda) = match model {
        ErrorModel::Uniform(m) => (
            fidelity_uniform_closed(m),
            Some(f64_of(uniform_diamond_exact(m)) * 2.0),
            Some((m.nu00(), m.lambda00())),
        ),
        ErrorModel::NonUniform(m) => {
            let avg = m.average_over_outcomes()?;
            (fidelity_nonuniform_closed(m), None, Some((avg.nu00(), avg.lambda00())))
        }
        ErrorModel::General(m) => {
            let ideal = ideal_instrument(m.d(), m.e())?;
            (instrument_fidelity_branchwise(&ideal, m)?, None, None)
        }
    };
    let lower = instrument_diamond_lower_max(&imp, options.restarts, options.seed)?;
    Ok(MetricsReport {
        fidelity: f64_of(fidelity),
        diamond_lower: f64_of(lower),
        diamond_upper: f64_of(instrument_diamond_upper(&imp)),
        diamond_exact: exact,
        nu00: nu_lambda.map(|(n, _)| f64_of(n)),
        lambda00: nu_lambda.map(|(_, l)| f64_of(l)),
        per_branch_trace_distances: branch_choi_distances(&imp).into_iter().map(|x| f64_of(x) * 0.5).collect(),
        conventions: Conventions::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::StochasticChannel;
    use crate::instruments::{random_uniform_model, UniformStochasticModel};

    #[test]
    fn perfect_model_report() {
        let m = ErrorModel::Uniform(UniformStochasticModel::<f64>::perfect(2, 2).unwrap());
        let r = build_report(&m, &ReportOptions::default()).unwrap();
        assert_eq!(r.fidelity, 1.0);
        assert_eq!(r.diamond_exact, Some(0.0));
        assert!(r.diamond_lower.abs() < 1e-14 && r.diamond_upper.abs() < 1e-14);
        assert!(r.per_branch_trace_distances.iter().all(|x| x.abs() < 1e-14));
        let json = r.to_json();
        assert!(json.contains(r#""conventions":{"diamond":"full-norm""#), "{json}");
    }

    #[test]
    fn uniform_report_values() {
        let t00 = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.72), (0, 1, 0.08)]).unwrap();
        let t11 = StochasticChannel::<f64>::from_entries(2, &[(0, 0, 0.2)]).unwrap();
        let m = ErrorModel::Uniform(UniformStochasticModel::from_entries(2, 2, vec![(0, 0, t00), (1, 1, t11)]).unwrap());
        let r = build_report(&m, &ReportOptions::default()).unwrap();
        assert!((r.fidelity - 0.72).abs() < 1e-15);
        assert!((r.diamond_exact.unwrap() - 0.56).abs() < 1e-15);
        assert!((r.nu00.unwrap() - 0.8).abs() < 1e-15 && (r.lambda00.unwrap() - 0.9).abs() < 1e-15);
        let back: MetricsReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn report_ordering_on_random_models() {
        for seed in 0..20 {
            let m = ErrorModel::Uniform(random_uniform_model::<f64>(2, 2, seed).unwrap());
            let r = build_report(&m, &ReportOptions { restarts: 2, seed }).unwrap();
            let exact = r.diamond_exact.unwrap();
            assert!(r.diamond_lower <= exact + 1e-9 && exact <= r.diamond_upper + 1e-9);
        }
    }
}
