use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use qinstrument::channels::ChoiMatrix;
use qinstrument::instruments::{
    random_general_implementation, random_nonuniform_model, random_uniform_model, ErrorModel,
};
use qinstrument::metrics::{build_report, MetricsReport, ReportOptions};
use qinstrument::oracle::{diamond_norm, DEFAULT_TOLERANCE};
use qinstrument::verify::{self, TheoremId, VerificationRecord, VerificationSummary, VerifyOptions, MAX_D};
use qinstrument::Error;

/// Random instrument error models, their figures of merit, and randomized
/// checks of the closed forms against an SDP diamond-norm oracle.
#[derive(Parser)]
#[command(name = "qinstrument", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random model file.
    Gen {
        kind: Kind,
        #[command(flatten)]
        dims: Dims,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the metrics report of a model file.
    Metrics {
        model: PathBuf,
        /// Seed for the random probe states of the diamond lower bound.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run randomized trials of one check; trial i uses seed + i.
    Verify {
        theorem_id: String,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pass threshold on abs_error (default depends on the check).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        dim_d: Option<usize>,
        #[arg(long)]
        dim_e: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified diamond norm of a Choi matrix file.
    OracleDiamond {
        choi: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Dims {
    #[arg(long, default_value_t = 2)]
    dim_d: usize,
    #[arg(long, default_value_t = 1)]
    dim_e: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Uniform,
    Nonuniform,
    General,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    /// Bad arguments or unreadable input: exit 2.
    Usage(String),
    /// A check failed or a computation did not certify: exit 1.
    Check(String),
}

impl Failure {
    fn from_error(context: &str, e: Error) -> Self {
        let msg = format!("{context}: {e}");
        match e {
            Error::Unconverged { .. } => Failure::Check(msg),
            _ => Failure::Usage(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<bool, Failure> {
    match command {
        Command::Gen { kind, dims, seed, out } => {
            let model = generate(kind, dims.dim_d, dims.dim_e, seed).map_err(|e| Failure::from_error("gen", e))?;
            emit(out.as_deref(), &(model.to_json_pretty() + "\n"))?;
            Ok(true)
        }
        Command::Metrics { model, seed, format, out } => {
            let text = read(&model)?;
            let model = ErrorModel::<f64>::from_json(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", model.display())))?;
            let options = ReportOptions { seed, ..ReportOptions::default() };
            let report = build_report(&model, &options).map_err(|e| Failure::from_error("metrics", e))?;
            let body = match format {
                Format::Json => report.to_json() + "\n",
                Format::Csv => report_csv(&report),
            };
            emit(out.as_deref(), &body)?;
            Ok(true)
        }
        Command::Verify {
            theorem_id,
            trials,
            seed,
            tol,
            dim_d,
            dim_e,
            format,
            out,
        } => {
            let id: TheoremId = theorem_id.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            if trials == 0 {
                return Err(Failure::Usage("trials must be ≥ 1".into()));
            }
            let opts = VerifyOptions { d: dim_d, e: dim_e, tol };
            opts.validate(id).map_err(|e| Failure::from_error("verify", e))?;
            let results: Vec<_> = (0..trials as u64)
                .into_par_iter()
                .map(|i| verify::run_trial(id, seed.wrapping_add(i), &opts))
                .collect();
            let mut records = Vec::with_capacity(trials);
            for (i, r) in results.into_iter().enumerate() {
                let rec = r.map_err(|e| Failure::Check(format!("trial {} (seed {}): {e}", i, seed.wrapping_add(i as u64))))?;
                records.push(rec);
            }
            let summary = VerificationSummary::from_records(id, &records);
            let body = match format {
                Format::Json => records_json(&records, &summary),
                Format::Csv => {
                    eprintln!(
                        "summary: {} passed {}/{} max_abs_error {:.16e}",
                        summary.theorem_id, summary.passed, summary.trials, summary.max_abs_error
                    );
                    records_csv(&records)
                }
            };
            emit(out.as_deref(), &body)?;
            Ok(summary.all_passed)
        }
        Command::OracleDiamond { choi, tol, out } => {
            let text = read(&choi)?;
            let delta = ChoiMatrix::<f64>::from_json(&text)
                .map_err(|e| Failure::Usage(format!("{}: {e}", choi.display())))?;
            let result = diamond_norm(&delta, tol).map_err(|e| Failure::from_error("oracle-diamond", e))?;
            let body = serde_json::to_string(&result).expect("result serializes") + "\n";
            emit(out.as_deref(), &body)?;
            Ok(true)
        }
    }
}

fn generate(kind: Kind, d: usize, e: usize, seed: u64) -> qinstrument::Result<ErrorModel<f64>> {
    if !(2..=MAX_D).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    if !(1..=qinstrument::channels::MAX_WEYL_DIM).contains(&e) {
        return Err(Error::UnsupportedDimension(e));
    }
    Ok(match kind {
        Kind::Uniform => ErrorModel::Uniform(random_uniform_model(d, e, seed)?),
        Kind::Nonuniform => ErrorModel::NonUniform(random_nonuniform_model(d, e, seed)?),
        Kind::General => ErrorModel::General(random_general_implementation(d, e, 2, seed)?),
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, body).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn report_csv(r: &MetricsReport) -> String {
    let branches: Vec<String> = r.per_branch_trace_distances.iter().map(|&x| float(x)).collect();
    let mut s = String::from(
        "fidelity,diamond_lower,diamond_upper,diamond_exact,nu00,lambda00,per_branch_trace_distances,diamond_convention,trace_distance_convention\n",
    );
    writeln!(
        s,
        "{},{},{},{},{},{},{},{},{}",
        float(r.fidelity),
        float(r.diamond_lower),
        float(r.diamond_upper),
        opt_float(r.diamond_exact),
        opt_float(r.nu00),
        opt_float(r.lambda00),
        branches.join(";"),
        r.conventions.diamond,
        r.conventions.trace_distance
    )
    .expect("write to string");
    s
}

fn records_csv(records: &[VerificationRecord]) -> String {
    let mut s = String::from("theorem_id,trial_seed,closed_form,oracle_value,abs_error,passed\n");
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{},{}",
            r.theorem_id,
            r.trial_seed,
            float(r.closed_form),
            float(r.oracle_value),
            float(r.abs_error),
            r.passed
        )
        .expect("write to string");
    }
    s
}

/// One JSON object per line, then `{"summary": ...}`.
fn records_json(records: &[VerificationRecord], summary: &VerificationSummary) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("record serializes"));
        s.push('\n');
    }
    let summary = serde_json::to_string(summary).expect("summary serializes");
    writeln!(s, "{{\"summary\":{summary}}}").expect("write to string");
    s
}
