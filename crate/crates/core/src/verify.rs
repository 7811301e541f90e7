//! Randomized checks of the closed forms against independent computations.
//!
//! Each trial is fully determined by its seed. The closed-form side always
//! comes from [`crate::metrics`] (or the model's own parameters) and the
//! reference side from [`crate::oracle`] or a direct matrix computation, so
//! the two values never share a code path.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{sample_stochastic, KrausChannel, StochasticChannel, MAX_WEYL_DIM};
use crate::error::{Error, Result};
use crate::instruments::{
    ideal_instrument, random_general_implementation, random_nonuniform_model, random_uniform_model,
    InstrumentImplementation, NonUniformStochasticModel,
};
use crate::linalg::{eigh, hermitian_trace_norm, trace_norm, ComplexMatrix};
use crate::metrics::{
    diamond_identity_stochastic, fidelity_nonuniform_closed, fidelity_uniform_closed, fvg_bounds,
    instrument_diamond_lower, instrument_diamond_lower_max, instrument_diamond_upper, nonuniform_outcome_diamond,
    process_fidelity, saturating_probe, uniform_diamond_exact,
};
use crate::oracle::{diamond_norm, DiamondNormResult, DEFAULT_TOLERANCE};
use crate::random::{complex_gaussian, density, seeded, uniform};
use crate::tolerance::Tolerances;

/// Largest measured-register dimension the generators accept.
pub const MAX_D: usize = 4;

/// Stream used to pick per-trial dimensions, kept apart from model sampling.
const DIM_STREAM: u64 = 0x5eed_d1a5;

/// Minimum separation between the two sides of the outcome-dependent
/// counterexample.
pub const COUNTEREXAMPLE_GAP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    TStochasticDiamondIdentity,
    CorUniformFidelity,
    CorNonuniformFidelity,
    ThmInstrumentBounds,
    ThmUniformDiamond,
    Sec7Counterexample,
    FvgAppendix,
    LemmaOrthogonality,
    KrausRank,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        TheoremId::TStochasticDiamondIdentity,
        TheoremId::CorUniformFidelity,
        TheoremId::CorNonuniformFidelity,
        TheoremId::ThmInstrumentBounds,
        TheoremId::ThmUniformDiamond,
        TheoremId::Sec7Counterexample,
        TheoremId::FvgAppendix,
        TheoremId::LemmaOrthogonality,
        TheoremId::KrausRank,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::TStochasticDiamondIdentity => "t-stochastic-diamond-identity",
            TheoremId::CorUniformFidelity => "cor-uniform-fidelity",
            TheoremId::CorNonuniformFidelity => "cor-nonuniform-fidelity",
            TheoremId::ThmInstrumentBounds => "thm-instrument-bounds",
            TheoremId::ThmUniformDiamond => "thm-uniform-diamond",
            TheoremId::Sec7Counterexample => "sec7-counterexample",
            TheoremId::FvgAppendix => "fvg-appendix",
            TheoremId::LemmaOrthogonality => "lemma-orthogonality",
            TheoremId::KrausRank => "kraus-rank",
        }
    }

    /// Pass threshold on `abs_error`.
    pub fn default_tolerance(self) -> f64 {
        match self {
            TheoremId::TStochasticDiamondIdentity => 1e-5,
            TheoremId::CorUniformFidelity | TheoremId::CorNonuniformFidelity => 1e-8,
            TheoremId::ThmInstrumentBounds => 1e-6,
            TheoremId::ThmUniformDiamond | TheoremId::Sec7Counterexample => 1e-4,
            TheoremId::FvgAppendix | TheoremId::LemmaOrthogonality => 1e-10,
            TheoremId::KrausRank => 0.0,
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = TheoremId::ALL.iter().map(|t| t.as_str()).collect();
            Error::InvalidArgument(format!("unknown theorem id {s:?}; expected one of {}", known.join(", ")))
        })
    }
}

/// One randomized trial. What `closed_form` and `oracle_value` hold depends
/// on the check:
///
/// * `t-stochastic-diamond-identity`: `(1+nu)/2 - nu lambda` vs half the SDP
///   value of `||T - I||_◊`.
/// * `cor-uniform-fidelity`, `cor-nonuniform-fidelity`: closed-form fidelity
///   vs the Choi fidelity of the expanded and ideal full channels.
/// * `thm-uniform-diamond`: `1 - nu00 lambda00` vs half the SDP value;
///   `abs_error` also covers the gap between the probe lower bound at the
///   maximally entangled state and the full SDP value.
/// * `thm-instrument-bounds`: the maximized lower bound vs the SDP value;
///   `abs_error` is the sandwich violation (0 when both bounds hold).
/// * `sec7-counterexample`: `2 (1 - F)` vs the SDP value; `abs_error`
///   compares the SDP value with `max_j 2 (1 - lambda_j)`, and the record
///   passes only if the first two differ by at least 0.01.
/// * `fvg-appendix`: lower vs upper bound; `abs_error` is the chain violation.
/// * `lemma-orthogonality`: `sum_j ||M_j||_1` vs `||sum_j M_j||_1`.
/// * `kraus-rank`: number of generated Kraus operators vs the Choi rank.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub theorem_id: TheoremId,
    pub trial_seed: u64,
    pub closed_form: f64,
    pub oracle_value: f64,
    pub abs_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub theorem_id: TheoremId,
    pub trials: usize,
    pub passed: usize,
    pub max_abs_error: f64,
    pub all_passed: bool,
}

impl VerificationSummary {
    pub fn from_records(theorem_id: TheoremId, records: &[VerificationRecord]) -> Self {
        let passed = records.iter().filter(|r| r.passed).count();
        Self {
            theorem_id,
            trials: records.len(),
            passed,
            max_abs_error: records.iter().map(|r| r.abs_error).fold(0.0, f64::max),
            all_passed: passed == records.len(),
        }
    }
}

/// Per-run settings. Unset dimensions are drawn per trial from the default
/// range of each check; an unset tolerance uses
/// [`TheoremId::default_tolerance`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    pub d: Option<usize>,
    pub e: Option<usize>,
    pub tol: Option<f64>,
}

impl VerifyOptions {
    /// Rejects dimensions the check cannot use, before any trial runs.
    pub fn validate(&self, id: TheoremId) -> Result<()> {
        if let Some(tol) = self.tol {
            if !(tol >= 0.0 && tol.is_finite()) {
                return Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {tol}")));
            }
        }
        let check = |v: Option<usize>, lo: usize, hi: usize| match v {
            Some(x) if x < lo || x > hi => Err(Error::UnsupportedDimension(x)),
            _ => Ok(()),
        };
        match id {
            TheoremId::TStochasticDiamondIdentity => check(self.e, 1, MAX_WEYL_DIM),
            TheoremId::CorUniformFidelity
            | TheoremId::CorNonuniformFidelity
            | TheoremId::ThmInstrumentBounds
            | TheoremId::ThmUniformDiamond => {
                check(self.d, 2, MAX_D)?;
                check(self.e, 1, MAX_WEYL_DIM)
            }
            TheoremId::Sec7Counterexample => {
                if self.d.is_some_and(|d| d != 2) || self.e.is_some_and(|e| e != 2) {
                    return Err(Error::InvalidArgument(
                        "the outcome-dependent counterexample is fixed at D = 2, E = 2".into(),
                    ));
                }
                Ok(())
            }
            TheoremId::FvgAppendix | TheoremId::KrausRank => {
                check(self.d, 1, 16)?;
                check(self.e, 1, 16)
            }
            TheoremId::LemmaOrthogonality => {
                check(self.d, 1, 8)?;
                check(self.e, 1, 8)
            }
        }
    }

    fn tolerance(&self, id: TheoremId) -> f64 {
        self.tol.unwrap_or_else(|| id.default_tolerance())
    }
}

fn pick(fixed: Option<usize>, range: std::ops::RangeInclusive<usize>, rng: &mut impl Rng) -> usize {
    fixed.unwrap_or_else(|| rng.random_range(range))
}

fn record(id: TheoremId, seed: u64, closed_form: f64, oracle_value: f64, abs_error: f64, tol: f64) -> VerificationRecord {
    VerificationRecord {
        theorem_id: id,
        trial_seed: seed,
        closed_form,
        oracle_value,
        abs_error,
        passed: abs_error <= tol,
    }
}

fn oracle_tolerance(tol: f64) -> f64 {
    DEFAULT_TOLERANCE.min(tol.max(1e-8))
}

/// SDP value of `||full(imp) - full(ideal)||_◊`.
pub fn instrument_oracle(imp: &InstrumentImplementation<f64>, tol: f64) -> Result<DiamondNormResult> {
    let ideal = ideal_instrument::<f64>(imp.d(), imp.e())?;
    let delta = imp.full_channel().choi().difference(&ideal.full_channel().choi())?;
    diamond_norm(&delta, tol)
}

/// Choi fidelity between the full channels of `imp` and the ideal instrument.
pub fn instrument_direct_fidelity(imp: &InstrumentImplementation<f64>) -> Result<f64> {
    let ideal = ideal_instrument::<f64>(imp.d(), imp.e())?;
    process_fidelity(&ideal.full_channel().choi(), &imp.full_channel().choi())
}

/// The outcome-dependent model with `D = E = 2`, `T_0 = I` and
/// `T_1 = 0.8 I + 0.2 Z`, whose diamond distance is not fixed by its fidelity.
pub fn outcome_dependent_counterexample() -> NonUniformStochasticModel<f64> {
    let t0 = StochasticChannel::identity(2).expect("qubit identity");
    let t1 = StochasticChannel::from_entries(2, &[(0, 0, 0.8), (0, 1, 0.2)]).expect("valid weights");
    NonUniformStochasticModel::outcome_dependent(vec![t0, t1]).expect("valid outcome-dependent model")
}

/// Runs one trial of `id` with seed `seed`.
pub fn run_trial(id: TheoremId, seed: u64, opts: &VerifyOptions) -> Result<VerificationRecord> {
    opts.validate(id)?;
    let tol = opts.tolerance(id);
    let mut dims = seeded(seed, DIM_STREAM);
    match id {
        TheoremId::TStochasticDiamondIdentity => {
            let e = pick(opts.e, 2..=3, &mut dims);
            let mut rng = seeded(seed, 0);
            let nu = uniform(&mut rng, 0.2, 1.0);
            let t: StochasticChannel<f64> = sample_stochastic(e, nu, 1.0, &mut rng)?;
            let closed = diamond_identity_stochastic(&t);
            let delta = t.choi().difference(&StochasticChannel::identity(e)?.choi())?;
            let oracle = 0.5 * diamond_norm(&delta, oracle_tolerance(tol))?.value;
            Ok(record(id, seed, closed, oracle, (closed - oracle).abs(), tol))
        }
        TheoremId::CorUniformFidelity => {
            let d = pick(opts.d, 2..=3, &mut dims);
            let e = pick(opts.e, 1..=3, &mut dims);
            let model = random_uniform_model::<f64>(d, e, seed)?;
            let closed = fidelity_uniform_closed(&model);
            let direct = instrument_direct_fidelity(&model.expand())?;
            Ok(record(id, seed, closed, direct, (closed - direct).abs(), tol))
        }
        TheoremId::CorNonuniformFidelity => {
            let d = pick(opts.d, 2..=3, &mut dims);
            let e = pick(opts.e, 1..=3, &mut dims);
            let model = random_nonuniform_model::<f64>(d, e, seed)?;
            let closed = fidelity_nonuniform_closed(&model);
            let direct = instrument_direct_fidelity(&model.expand())?;
            Ok(record(id, seed, closed, direct, (closed - direct).abs(), tol))
        }
        TheoremId::ThmUniformDiamond => {
            let d = opts.d.unwrap_or(2);
            let e = opts.e.unwrap_or(2);
            let model = random_uniform_model::<f64>(d, e, seed)?;
            let closed = uniform_diamond_exact(&model);
            let imp = model.expand();
            let full = instrument_oracle(&imp, oracle_tolerance(tol))?.value;
            let probe = saturating_probe::<f64>(e);
            let mut lower = 0.0f64;
            for j in 0..d {
                lower = lower.max(instrument_diamond_lower(&imp, &probe, j)?);
            }
            let err = (closed - 0.5 * full).abs().max((lower - full).abs());
            Ok(record(id, seed, closed, 0.5 * full, err, tol))
        }
        TheoremId::ThmInstrumentBounds => {
            let d = opts.d.unwrap_or(2);
            let e = pick(opts.e, 1..=2, &mut dims);
            let imp = random_general_implementation::<f64>(d, e, 2, seed)?;
            let lower = instrument_diamond_lower_max(&imp, 16, seed)?;
            let upper = instrument_diamond_upper(&imp);
            let res = instrument_oracle(&imp, oracle_tolerance(tol))?;
            let violation = (lower - res.dual_bound).max(res.primal_bound - upper).max(0.0);
            Ok(record(id, seed, lower, res.value, violation, tol))
        }
        TheoremId::Sec7Counterexample => {
            let model = outcome_dependent_counterexample();
            let closed = 2.0 * (1.0 - fidelity_nonuniform_closed(&model));
            let formula = nonuniform_outcome_diamond(&model)?;
            let oracle = instrument_oracle(&model.expand(), oracle_tolerance(tol))?.value;
            let err = (oracle - formula).abs();
            let mut rec = record(id, seed, closed, oracle, err, tol);
            rec.passed &= (oracle - closed).abs() >= COUNTEREXAMPLE_GAP;
            Ok(rec)
        }
        TheoremId::FvgAppendix => {
            let n = pick(opts.d, 2..=4, &mut dims);
            let mut rng = seeded(seed, 0);
            let rho_rank = if seed % 5 == 0 { 1 } else { rng.random_range(1..=n) };
            let sigma_rank = rng.random_range(1..=n);
            let rho = density::<f64, _>(n, rho_rank, &mut rng);
            let sigma = density::<f64, _>(n, sigma_rank, &mut rng);
            let b = fvg_bounds(&rho, &sigma, None)?;
            let violation = (b.lower - b.middle).max(b.middle - b.upper).max(0.0);
            Ok(record(id, seed, b.lower, b.upper, violation, tol))
        }
        TheoremId::LemmaOrthogonality => {
            let blocks = pick(opts.d, 2..=4, &mut dims);
            let mut rng = seeded(seed, 0);
            let sizes: Vec<usize> = (0..blocks).map(|_| pick(opts.e, 1..=3, &mut rng)).collect();
            let n: usize = sizes.iter().sum();
            let u = eigh(&random_hermitian(n, &mut rng)).vectors;
            let mut sum = ComplexMatrix::zeros(n, n);
            let mut closed = 0.0;
            let mut offset = 0;
            for &s in &sizes {
                let m = random_hermitian(s, &mut rng);
                closed += hermitian_trace_norm(&m);
                let mut embedded = ComplexMatrix::zeros(n, n);
                for i in 0..s {
                    for k in 0..s {
                        embedded[(offset + i, offset + k)] = m[(i, k)];
                    }
                }
                sum = sum + embedded.conjugate_by(&u);
                offset += s;
            }
            let direct = trace_norm(&sum);
            Ok(record(id, seed, closed, direct, (closed - direct).abs(), tol))
        }
        TheoremId::KrausRank => {
            let din = pick(opts.d, 2..=3, &mut dims);
            let dout = pick(opts.e, 2..=3, &mut dims);
            let mut rng = seeded(seed, 0);
            let r = rng.random_range(din.div_ceil(dout)..=din * dout);
            let ch = random_channel(din, dout, r, &mut rng);
            let rank = ch.choi().rank(&Tolerances::default());
            let minimal = ch.choi().to_kraus()?.kraus_ops().len();
            let err = (r.abs_diff(rank)).max(r.abs_diff(minimal)) as f64;
            Ok(record(id, seed, r as f64, rank as f64, err, tol))
        }
    }
}

/// Runs `trials` trials with seeds `seed, seed + 1, ...` sequentially.
pub fn run_trials(id: TheoremId, trials: usize, seed: u64, opts: &VerifyOptions) -> Result<Vec<VerificationRecord>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be ≥ 1".into()));
    }
    opts.validate(id)?;
    (0..trials as u64).map(|i| run_trial(id, seed.wrapping_add(i), opts)).collect()
}

fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix<f64> {
    complex_gaussian::<f64, _>(n, n, rng).hermitian_part()
}

/// Trace-preserving channel with `r` Gaussian Kraus operators, jointly
/// normalized by `S^{-1/2}`. Needs `r * dout >= din`.
fn random_channel(din: usize, dout: usize, r: usize, rng: &mut impl Rng) -> KrausChannel<f64> {
    let raw: Vec<ComplexMatrix<f64>> = (0..r).map(|_| complex_gaussian(dout, din, rng)).collect();
    let mut s = ComplexMatrix::zeros(din, din);
    for g in &raw {
        s = s + g.adjoint().matmul(g);
    }
    let inv_sqrt = eigh(&s.hermitian_part()).reconstruct_with(|x| 1.0 / x.sqrt());
    KrausChannel::new(din, dout, raw.iter().map(|g| g.matmul(&inv_sqrt)).collect()).expect("shapes match")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.as_str().parse::<TheoremId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert!("thm-nope".parse::<TheoremId>().is_err());
    }

    #[test]
    fn each_check_passes_once() {
        for id in TheoremId::ALL {
            let rec = run_trial(id, 3, &VerifyOptions::default()).unwrap();
            assert!(rec.passed, "{rec:?}");
        }
    }

    #[test]
    fn counterexample_values() {
        let rec = run_trial(TheoremId::Sec7Counterexample, 0, &VerifyOptions::default()).unwrap();
        let f = ((1.0 + 0.8f64.sqrt()) / 2.0).powi(2);
        assert!((rec.closed_form - 2.0 * (1.0 - f)).abs() < 1e-12);
        assert!((rec.oracle_value - 0.4).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_options() {
        assert!(run_trials(TheoremId::KrausRank, 0, 0, &VerifyOptions::default()).is_err());
        let five = VerifyOptions { e: Some(5), ..Default::default() };
        assert!(matches!(
            run_trial(TheoremId::CorUniformFidelity, 0, &five),
            Err(Error::UnsupportedDimension(5))
        ));
        let d3 = VerifyOptions { d: Some(3), ..Default::default() };
        assert!(run_trial(TheoremId::Sec7Counterexample, 0, &d3).is_err());
    }

    #[test]
    fn trials_are_deterministic() {
        let a = run_trials(TheoremId::FvgAppendix, 5, 11, &VerifyOptions::default()).unwrap();
        let b = run_trials(TheoremId::FvgAppendix, 5, 11, &VerifyOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[4].trial_seed, 15);
    }
}
