//! Command-line surface: argument parsing, dispatch and exit codes.
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O or internal error |
//! | 2 | configuration error (parse, unknown field, invalid knob or profile) |
//! | 3 | precondition violated (e.g. `chi != 0` for an rn series) |
//! | 4 | sampled window does not cover the required range |
//! | 5 | anomaly (non-monotone scan, tail above its bound); report still written |

pub mod config;
pub mod report;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use crate::criteria::{
    bifurcation_bracket, classify, dissipativity_series, nonsingularity_deficit, UnitFits,
};
use crate::dist::SkellamLaw;
use crate::intensity::{check_all, check_condition, chi, limit_sets, ConditionId, Tri};
use crate::simulate::{
    claim2_decay, clt_experiment, hopf_diagnostic, scan_intensity, stopping_time_experiment,
};
use crate::Error;
pub use config::{Command, Format, RunConfig};
pub use report::{Header, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;
pub const EXIT_COVERAGE: i32 = 4;
pub const EXIT_ANOMALY: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "suspension-lab",
    version,
    about = "Numerical laboratory for Poisson suspensions"
)]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `rng.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `output.path`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Overrides `workers`; the environment default applies when both are absent.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Lab(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Lab(e) => lab_exit_code(e),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Lab(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lab(e)
    }
}

pub fn lab_exit_code(e: &Error) -> i32 {
    match e {
        Error::Profile(_) | Error::Dist(_) | Error::InvalidArgument(_) => EXIT_CONFIG,
        Error::Precondition(_) => EXIT_PRECONDITION,
        Error::Coverage { .. } => EXIT_COVERAGE,
        Error::MonotonicityViolated(_) => EXIT_ANOMALY,
        Error::Internal(_) => EXIT_IO,
    }
}

/// Result of one command before it is wrapped in a report.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub body: Value,
    pub table: Option<Table>,
    pub anomaly: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

fn f(v: f64) -> String {
    report::cell(Some(v))
}

/// Runs `command` on `cfg` and returns the report body.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, Error> {
    let profile = &cfg.profile;
    let (rng, workers) = (&cfg.rng, cfg.workers);
    let mut table = None;
    let mut anomaly = false;
    let body = match command {
        Command::Check => {
            let deficit = nonsingularity_deficit(profile, cfg.check.deficit_n)?;
            json!({
                "conditions": to_value(&check_all(profile)),
                "chi": chi(profile),
                "limit_sets": to_value(&limit_sets(profile)),
                "nonsingularity_deficit": {"n": cfg.check.deficit_n, "value": deficit},
            })
        }
        Command::Asymptotics => {
            let knobs = &cfg.asymptotics;
            let (lo, hi) = knobs.n_exponents;
            if lo > hi || hi > 40 {
                return Err(Error::InvalidArgument(
                    "n_exponents must satisfy lo <= hi <= 40".into(),
                ));
            }
            let a = profile.total();
            let unit = UnitFits::compute(profile, knobs.n_exponents, knobs.tol / a)?;
            let rn = unit.rn.as_ref().map(|fit| fit.scaled(a));
            let hellinger = unit.hellinger.scaled(a);
            let mut t = Table::new(&["n", "rn_square_integral", "hellinger_growth"]);
            for (i, &(n, h)) in hellinger.points.iter().enumerate() {
                let r = rn.as_ref().map(|fit| fit.points[i].1);
                t.push(vec![n.to_string(), report::cell(r), f(h)]);
            }
            table = Some(t);
            json!({"rn_square_integral": to_value(&rn), "hellinger_growth": to_value(&hellinger)})
        }
        Command::Classify => {
            let report = classify(profile)?;
            let series = if check_condition(profile, ConditionId::Nonsingular).holds == Tri::Yes {
                Some(dissipativity_series(profile, cfg.classify.series_n)?)
            } else {
                None
            };
            json!({"classification": to_value(&report), "dissipativity_series": to_value(&series)})
        }
        Command::Bracket => to_value(&bifurcation_bracket(profile, &cfg.bracket)?),
        Command::Clt => to_value(&clt_experiment(profile, &cfg.clt, rng, workers)?),
        Command::Claim2 => to_value(&claim2_decay(profile, &cfg.claim2, rng, workers)?),
        Command::Stopping => to_value(&stopping_time_experiment(
            profile,
            &cfg.stopping,
            rng,
            workers,
        )?),
        Command::Hopf => {
            let s = hopf_diagnostic(profile, &cfg.hopf, rng, workers)?;
            let mut t = Table::new(&["n", "mean", "q10", "median", "q90"]);
            for c in &s.checkpoints {
                t.push(vec![
                    c.n.to_string(),
                    f(c.mean),
                    f(c.q10),
                    f(c.median),
                    f(c.q90),
                ]);
            }
            table = Some(t);
            to_value(&s)
        }
        Command::Scan => {
            let s = scan_intensity(profile, &cfg.scan, rng, workers)?;
            let mut t = Table::new(&["t", "growth_exponent", "median_final", "certified"]);
            for r in &s.rows {
                let verdict = to_value(&r.certified)
                    .as_str()
                    .unwrap_or_default()
                    .to_string();
                t.push(vec![
                    f(r.t),
                    f(r.growth_exponent),
                    f(r.median_final),
                    verdict,
                ]);
            }
            table = Some(t);
            anomaly = s.anomaly;
            to_value(&s)
        }
        Command::Tails => {
            let k = &cfg.tails;
            if k.l == 0 || k.l_max == 0 {
                return Err(Error::InvalidArgument("tail indices start at 1".into()));
            }
            let law = SkellamLaw::new(k.a, k.b)?;
            let (mean, variance) = law.moments();
            let mut t = Table::new(&["l", "exact", "bound"]);
            let mut rows = Vec::new();
            for l in 1..=k.l_max {
                let tail = law.tail(l)?;
                t.push(vec![l.to_string(), f(tail.exact), f(tail.bound)]);
                rows.push(tail);
            }
            let tested = law.tail(k.l)?;
            let all_within =
                rows.iter().all(|r| r.exact <= r.bound) && tested.exact <= tested.bound;
            anomaly = !all_within;
            table = Some(t);
            json!({
                "a": k.a,
                "b": k.b,
                "mean": mean,
                "variance": variance,
                "tested": to_value(&tested),
                "rows": to_value(&rows),
                "all_within_bound": all_within,
            })
        }
    };
    Ok(Outcome {
        body,
        table,
        anomaly,
    })
}

/// Runs `command`, wraps the result in a report and writes it out.
/// Returns the report and the exit code it implies.
pub fn run(command: Command, cfg: &RunConfig) -> Result<(Report, i32), CliError> {
    if cfg.output.format == Format::Csv && !command.has_csv() {
        return Err(CliError::Config(format!(
            "csv output is not offered for `{}`",
            command.name()
        )));
    }
    let start = Instant::now();
    let outcome = execute(command, cfg)?;
    let runtime_ms = start.elapsed().as_millis() as u64;
    let generated_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let report = Report {
        header: Header::new(command, cfg, generated_at, runtime_ms),
        body: outcome.body,
    };
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let mut sink: Box<dyn Write> = match &cfg.output.path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    match (cfg.output.format, &outcome.table) {
        (Format::Csv, Some(t)) => report::write_csv(&report, t, &mut sink).map_err(io)?,
        _ => report::write_json(&report, &mut sink).map_err(io)?,
    }
    sink.flush().map_err(io)?;
    let code = if outcome.anomaly {
        EXIT_ANOMALY
    } else {
        EXIT_OK
    };
    Ok((report, code))
}

/// Loads the config named in `args`, applies the overrides and runs.
pub fn run_args(args: &Args) -> Result<(Report, i32), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = RunConfig::from_json(&text).map_err(CliError::Config)?;
    if let Some(seed) = args.seed {
        cfg.rng.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    run(args.command, &cfg)
}

/// Entry point for the binary; returns the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run_args(&args) {
        Ok((_, code)) => {
            if code == EXIT_ANOMALY {
                eprintln!("anomaly flagged; see report");
            }
            code
        }
        Err(e) => {
            eprintln!("suspension-lab: {e}");
            e.exit_code()
        }
    }
}
