//! The `qsp` command-line front end.
//!
//! ```text
//! qsp solve  --target cos --tau 1000 --scale 0.9 --out phases.json --log log.csv
//! qsp verify --phases phases.json --target cos --tau 1000 --scale 0.9 --cond
//! qsp bench  --suite hamiltonian --tau-list 100 --scale-list 0.5,0.9,0.99,0.999
//! ```
//!
//! Exit codes: 0 converged, 2 not converged, 1 usage or I/O error.
//! Diagnostics go to standard error; results to standard output.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::evaluate_series;
use crate::error::{QspError, Result};
use crate::eval::evaluate_g_real;
use crate::jacobian::jacobian_mps_real;
use crate::linalg::condition_estimate;
use crate::solvers::{
    residual_l1, solve, Method, SolverConfig, SolverReport, CONDITION_ITERATIONS,
};
use crate::targets::{
    format_f64, load_phases, save_phases, to_json_precise, TargetKind, TargetSpec,
    DEFAULT_TRUNC_EPS,
};
use crate::types::{ChebCoeffs, ReducedPhases};

pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qsp",
    version,
    about = "Phase factors for symmetric quantum signal processing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve F(Φ) = c for the reduced phase factors of a target.
    Solve(SolveArgs),
    /// Check phase factors against a target.
    Verify(VerifyArgs),
    /// Run a suite of solves and write one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TargetChoice {
    Cos,
    Sin,
    Gaussian,
    File,
}

#[derive(Debug, Clone, Args)]
pub struct TargetArgs {
    /// Target family; defaults to `file` when --coef-file is given.
    #[arg(long, value_enum)]
    pub target: Option<TargetChoice>,
    /// Evolution time for cos/sin targets.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Gaussian center.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Gaussian width.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Gaussian interpolation degree (even).
    #[arg(long)]
    pub degree: Option<usize>,
    /// Rescale the target so that its sup norm equals this value.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Truncation error of the Jacobi-Anger series.
    #[arg(long, default_value_t = DEFAULT_TRUNC_EPS)]
    pub eps0: f64,
    /// Chebyshev coefficient JSON file.
    #[arg(long)]
    pub coef_file: Option<PathBuf>,
}

fn usage(message: impl Into<String>) -> QspError {
    QspError::InvalidInput(message.into())
}

fn required<T: Copy>(value: Option<T>, flag: &str, target: &str) -> Result<T> {
    value.ok_or_else(|| usage(format!("--target {target} requires --{flag}")))
}

impl TargetArgs {
    pub fn to_spec(&self) -> Result<TargetSpec> {
        let choice = match (self.target, &self.coef_file) {
            (Some(choice), _) => choice,
            (None, Some(_)) => TargetChoice::File,
            (None, None) => return Err(usage("one of --target or --coef-file is required")),
        };
        let kind = match choice {
            TargetChoice::Cos => TargetKind::Cos {
                tau: required(self.tau, "tau", "cos")?,
            },
            TargetChoice::Sin => TargetKind::Sin {
                tau: required(self.tau, "tau", "sin")?,
            },
            TargetChoice::Gaussian => TargetKind::Gaussian {
                mu: required(self.mu, "mu", "gaussian")?,
                sigma: required(self.sigma, "sigma", "gaussian")?,
                degree: required(self.degree, "degree", "gaussian")?,
            },
            TargetChoice::File => TargetKind::File {
                path: self
                    .coef_file
                    .clone()
                    .ok_or_else(|| usage("--target file requires --coef-file"))?,
            },
        };
        Ok(TargetSpec {
            kind,
            scale: self.scale,
            trunc_eps: self.eps0,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub target: TargetArgs,
    #[arg(long, value_enum, default_value = "newton")]
    pub method: MethodArg,
    /// Stop once the l1 residual falls below this.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Iteration cap (default 100 for newton, 100000 for fpi).
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Phase factor JSON output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Convergence log CSV output (`iter,residual_l1,elapsed_ms`).
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Run record JSON output.
    #[arg(long)]
    pub record: Option<PathBuf>,
    /// Estimate the Jacobian condition number at the solution.
    #[arg(long)]
    pub cond: bool,
    /// Seed for the condition estimate.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Newton,
    Fpi,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Newton => Method::Newton,
            MethodArg::Fpi => Method::Fpi,
        }
    }
}

impl SolveArgs {
    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::for_method(self.method.into()).with_tol(self.tol);
        if let Some(m) = self.max_iter {
            cfg.max_iter = m;
        }
        cfg.estimate_condition = self.cond;
        cfg.seed = self.seed;
        cfg
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Phase factor JSON file.
    #[arg(long)]
    pub phases: PathBuf,
    #[command(flatten)]
    pub target: TargetArgs,
    /// Number of equispaced points on [-1, 1] for the pointwise check.
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Also print the Jacobian condition estimate.
    #[arg(long)]
    pub cond: bool,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Hamiltonian,
    Gaussian,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Comma-separated evolution times (hamiltonian suite).
    #[arg(long, default_value = "100")]
    pub tau_list: String,
    /// Comma-separated target sup norms.
    #[arg(long)]
    pub scale_list: String,
    /// Comma-separated methods.
    #[arg(long, default_value = "newton")]
    pub method: String,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100)]
    pub degree: usize,
    #[arg(long, default_value_t = DEFAULT_TRUNC_EPS)]
    pub eps0: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// CSV output; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses a comma-separated list, rejecting empty lists and empty items.
pub fn parse_list<T: FromStr>(text: &str, flag: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err(usage(format!("--{flag} must not be empty")));
    }
    items
        .into_iter()
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| usage(format!("--{flag}: cannot parse {s:?}: {e}")))
        })
        .collect()
}

/// Everything needed to reproduce a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: Vec<String>,
    pub target: TargetSpec,
    pub config: SolverConfig,
    pub report: SolverReport,
    pub phases_path: Option<PathBuf>,
    pub log_path: Option<PathBuf>,
}

impl RunRecord {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, to_json_precise(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| QspError::Schema {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Rebuilds the target and solves again with the recorded settings.
    pub fn rerun(&self) -> Result<(ReducedPhases, SolverReport)> {
        let c = self.target.build()?;
        solve_allowing_breakdown(&c, &self.config)
    }

    /// The convergence log rows implied by the report.
    pub fn log_rows(&self) -> Vec<LogRow> {
        log_rows(&self.report)
    }
}

/// One row of the convergence log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRow {
    pub iter: usize,
    pub residual_l1: f64,
    pub elapsed_ms: f64,
}

pub const LOG_HEADER: [&str; 3] = ["iter", "residual_l1", "elapsed_ms"];

pub fn log_rows(report: &SolverReport) -> Vec<LogRow> {
    report
        .residual_history
        .iter()
        .zip(&report.elapsed_ms_history)
        .enumerate()
        .map(|(iter, (&residual_l1, &elapsed_ms))| LogRow {
            iter,
            residual_l1,
            elapsed_ms,
        })
        .collect()
}

pub fn write_log(path: impl AsRef<Path>, rows: &[LogRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(LOG_HEADER)?;
    for r in rows {
        w.write_record([
            r.iter.to_string(),
            format_f64(r.residual_l1),
            format_f64(r.elapsed_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn csv_schema(path: &Path, message: impl Into<String>) -> QspError {
    QspError::Schema {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn parse_field<T: FromStr>(
    path: &Path,
    record: &csv::StringRecord,
    i: usize,
    name: &str,
) -> Result<T> {
    let raw = record
        .get(i)
        .ok_or_else(|| csv_schema(path, format!("missing column {name}")))?;
    raw.parse()
        .map_err(|_| csv_schema(path, format!("bad {name} value {raw:?}")))
}

fn check_header(path: &Path, reader: &mut csv::Reader<fs::File>, expected: &[&str]) -> Result<()> {
    let header = reader.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(csv_schema(
            path,
            format!("expected header {}", expected.join(",")),
        ));
    }
    Ok(())
}

pub fn read_log(path: impl AsRef<Path>) -> Result<Vec<LogRow>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    check_header(path, &mut reader, &LOG_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            Ok(LogRow {
                iter: parse_field(path, &rec, 0, "iter")?,
                residual_l1: parse_field(path, &rec, 1, "residual_l1")?,
                elapsed_ms: parse_field(path, &rec, 2, "elapsed_ms")?,
            })
        })
        .collect()
}

/// One benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub target: String,
    pub degree: usize,
    pub scale: f64,
    pub method: Method,
    pub iterations: usize,
    pub residual_l1: f64,
    pub wall_ms: f64,
    pub cond_estimate: Option<f64>,
    pub converged: bool,
}

pub const BENCH_HEADER: [&str; 8] = [
    "target",
    "degree",
    "scale",
    "method",
    "iterations",
    "residual_l1",
    "wall_ms",
    "cond_estimate",
];

impl BenchRow {
    fn to_record(&self) -> [String; 8] {
        [
            self.target.clone(),
            self.degree.to_string(),
            format_f64(self.scale),
            self.method.to_string(),
            self.iterations.to_string(),
            format_f64(self.residual_l1),
            format_f64(self.wall_ms),
            self.cond_estimate.map(format_f64).unwrap_or_default(),
        ]
    }
}

pub fn write_bench<W: Write>(out: W, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BENCH_HEADER)?;
    for r in rows {
        w.write_record(r.to_record())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a bench CSV. `converged` is not stored; it is reconstructed from
/// `residual_l1 < tol`.
pub fn read_bench(path: impl AsRef<Path>, tol: f64) -> Result<Vec<BenchRow>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    check_header(path, &mut reader, &BENCH_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec?;
            let residual_l1: f64 = parse_field(path, &rec, 5, "residual_l1")?;
            let cond = rec.get(7).unwrap_or("");
            Ok(BenchRow {
                target: rec.get(0).unwrap_or_default().to_string(),
                degree: parse_field(path, &rec, 1, "degree")?,
                scale: parse_field(path, &rec, 2, "scale")?,
                method: parse_field(path, &rec, 3, "method")?,
                iterations: parse_field(path, &rec, 4, "iterations")?,
                residual_l1,
                wall_ms: parse_field(path, &rec, 6, "wall_ms")?,
                cond_estimate: if cond.is_empty() {
                    None
                } else {
                    Some(parse_field(path, &rec, 7, "cond_estimate")?)
                },
                converged: residual_l1 < tol,
            })
        })
        .collect()
}

/// Like [`solve`], but a Newton breakdown yields its partial report instead
/// of an error.
fn solve_allowing_breakdown(
    c: &ChebCoeffs,
    cfg: &SolverConfig,
) -> Result<(ReducedPhases, SolverReport)> {
    match solve(c, cfg) {
        Err(QspError::NewtonBreakdown { report }) => {
            Ok((ReducedPhases::zeros(c.parity(), c.len())?, *report))
        }
        other => other,
    }
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_CONVERGED
                }
                _ => EXIT_ERROR,
            };
        }
    };
    let command: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, &command, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn exit_code(converged: bool) -> i32 {
    if converged {
        EXIT_CONVERGED
    } else {
        EXIT_NOT_CONVERGED
    }
}

fn build_target(spec: &TargetSpec, err: &mut dyn Write) -> Result<ChebCoeffs> {
    let loaded = spec.build_checked()?;
    if loaded.exceeds_unit_norm {
        writeln!(
            err,
            "warning: target sup norm {} exceeds 1; no exact phase factors exist",
            format_f64(loaded.infinity_norm)
        )?;
    }
    Ok(loaded.coeffs)
}

pub fn cmd_solve(
    args: &SolveArgs,
    command: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32> {
    let spec = args.target.to_spec()?;
    let cfg = args.solver_config();
    cfg.validate()?;
    let c = build_target(&spec, err)?;
    let (phi, report) = match solve(&c, &cfg) {
        Ok(r) => r,
        Err(QspError::NewtonBreakdown { report }) => {
            writeln!(
                err,
                "Newton breakdown after {} iterations: singular Jacobian",
                report.iterations
            )?;
            (ReducedPhases::zeros(c.parity(), c.len())?, *report)
        }
        Err(e) => return Err(e),
    };

    if let Some(path) = &args.out {
        save_phases(path, &phi)?;
    }
    if let Some(path) = &args.log {
        write_log(path, &log_rows(&report))?;
    }
    if let Some(path) = &args.record {
        RunRecord {
            command: command.to_vec(),
            target: spec.clone(),
            config: cfg.clone(),
            report: report.clone(),
            phases_path: args.out.clone(),
            log_path: args.log.clone(),
        }
        .save(path)?;
    }

    writeln!(out, "target: {}", spec.label())?;
    writeln!(out, "degree: {}", c.degree())?;
    writeln!(out, "method: {}", cfg.method)?;
    writeln!(out, "converged: {}", report.converged)?;
    writeln!(out, "iterations: {}", report.iterations)?;
    writeln!(out, "residual_l1: {}", format_f64(report.final_residual))?;
    writeln!(out, "wall_ms: {}", format_f64(report.wall_time * 1e3))?;
    if let Some(k) = report.condition_estimate {
        writeln!(out, "cond_estimate: {}", format_f64(k))?;
    }
    if !report.converged {
        writeln!(
            err,
            "not converged: residual {} after {} iterations",
            format_f64(report.final_residual),
            report.iterations
        )?;
    }
    Ok(exit_code(report.converged))
}

/// `max |g(x, Φ) - f(x)|` over `n` equispaced points of `[-1, 1]`.
pub fn max_pointwise_error(phi: &ReducedPhases, c: &ChebCoeffs, n: usize) -> Result<f64> {
    let n = n.max(2);
    (0..n)
        .into_par_iter()
        .map(|k| {
            let x = (-1.0 + 2.0 * k as f64 / (n - 1) as f64).clamp(-1.0, 1.0);
            Ok((evaluate_g_real(x, phi)? - evaluate_series(c, x)?).abs())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

pub fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let spec = args.target.to_spec()?;
    let phi = load_phases(&args.phases)?;
    let c = spec.build()?;
    let residual = residual_l1(&phi, &c)?;
    let pointwise = max_pointwise_error(&phi, &c, args.grid)?;
    writeln!(out, "residual_l1: {}", format_f64(residual))?;
    writeln!(out, "max_pointwise_error: {}", format_f64(pointwise))?;
    if args.cond {
        let k = condition_estimate(&jacobian_mps_real(&phi)?, CONDITION_ITERATIONS, args.seed);
        writeln!(out, "cond_estimate: {}", format_f64(k))?;
    }
    Ok(exit_code(residual < args.tol))
}

/// Target specifications of a bench suite, in run order.
pub fn suite_targets(args: &BenchArgs) -> Result<Vec<TargetSpec>> {
    let scales: Vec<f64> = parse_list(&args.scale_list, "scale-list")?;
    let with_scale = |kind: TargetKind, scale: f64| TargetSpec {
        kind,
        scale: Some(scale),
        trunc_eps: args.eps0,
    };
    Ok(match args.suite {
        Suite::Hamiltonian => {
            let taus: Vec<f64> = parse_list(&args.tau_list, "tau-list")?;
            taus.iter()
                .flat_map(|&tau| scales.iter().map(move |&s| (tau, s)))
                .map(|(tau, s)| with_scale(TargetKind::Cos { tau }, s))
                .collect()
        }
        Suite::Gaussian => scales
            .iter()
            .map(|&s| {
                with_scale(
                    TargetKind::Gaussian {
                        mu: args.mu,
                        sigma: args.sigma,
                        degree: args.degree,
                    },
                    s,
                )
            })
            .collect(),
    })
}

/// Runs the suite serially (each solve is internally parallel).
pub fn run_bench(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let targets = suite_targets(args)?;
    let methods: Vec<Method> = parse_list(&args.method, "method")?;
    let mut rows = Vec::new();
    for spec in &targets {
        let c = spec.build()?;
        for &method in &methods {
            let mut cfg = SolverConfig::for_method(method).with_tol(args.tol);
            if let Some(m) = args.max_iter {
                cfg.max_iter = m;
            }
            cfg.record_history = false;
            cfg.estimate_condition = true;
            cfg.seed = args.seed;
            let (_, report) = solve_allowing_breakdown(&c, &cfg)?;
            rows.push(BenchRow {
                target: spec.label(),
                degree: c.degree(),
                scale: spec.scale.unwrap_or(1.0),
                method,
                iterations: report.iterations,
                residual_l1: report.final_residual,
                wall_ms: report.wall_time * 1e3,
                cond_estimate: report.condition_estimate,
                converged: report.converged,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let rows = run_bench(args)?;
    match &args.out {
        Some(path) => write_bench(fs::File::create(path)?, &rows)?,
        None => write_bench(&mut *out, &rows)?,
    }
    let failed = rows.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        writeln!(err, "{failed} of {} runs did not converge", rows.len())?;
    }
    Ok(exit_code(failed == 0))
}
