//! Argument grammar and subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use scpdc_core::scp::{fixed_point_check, Algorithm, SolveReport, SolverConfig};
use scpdc_core::DCProgram;

use crate::bench::{run_suite, BenchOptions, Suite};
use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_OK, EXIT_PARSE};
use crate::format::{to_canonical, MpccJson, NmpcJson, ProblemJson};
use crate::run::{run, status_exit_code, AlgorithmArg, SolverArgs};
use crate::source::{resolve_point, SourceArgs, SourceData};
use crate::trace::{write_trace_file, Summary};

#[derive(Debug, Parser)]
#[command(
    name = "scpdc",
    version,
    about = "Sequential convex programming for DC-constrained problems"
)]
pub struct Cli {
    /// Debug-level diagnostics on stderr (overrides SCPDC_LOG).
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem and write the trace and summary.
    Solve(SolveArgs),
    /// Write a generated problem (or generator data) as canonical JSON.
    Gen(GenArgs),
    /// Test whether a point is stationary.
    Check(CheckArgs),
    /// Run a batch suite over seeds 1 to 10.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Scp)]
    pub algorithm: AlgorithmArg,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Starting point: zeros, box-midpoint, dc-feasible, a file, or a list
    /// like `1,2`.
    #[arg(long, default_value = "zeros", allow_hyphen_values = true)]
    pub x0: String,
    /// Per-iteration CSV trace.
    #[arg(long, value_name = "FILE")]
    pub trace: Option<PathBuf>,
    /// One-row CSV summary.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    /// Final point, multipliers and status as JSON.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenFormat {
    /// The DC program.
    Program,
    /// The generator input (mpcc and nmpc only).
    Data,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value_t = GenFormat::Program)]
    pub format: GenFormat,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// The point: a file, a list like `1,2`, or a keyword as for `--x0`.
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Penalty of the relaxed fallback when the plain subproblem is infeasible.
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub inner_tol: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Directory for the result table.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

/// Parses `args`, runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Check(a) => cmd_check(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("scpdc: {e}");
            e.exit_code()
        }
    }
}

fn init_logging(verbose: bool) {
    let level = if verbose {
        log::LevelFilter::Debug
    } else {
        match std::env::var("SCPDC_LOG").as_deref() {
            Ok("quiet") => log::LevelFilter::Off,
            Ok("info") => log::LevelFilter::Info,
            Ok("debug") => log::LevelFilter::Debug,
            _ => log::LevelFilter::Warn,
        }
    };
    let mut builder = env_logger::Builder::new();
    builder.filter_level(level);
    if level == log::LevelFilter::Debug {
        // per-level and per-Newton-step barrier data
        builder.filter_module("scpdc_core::inner", log::LevelFilter::Trace);
    }
    let _ = builder
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .try_init();
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

#[derive(Serialize)]
struct ResultJson<'a> {
    algorithm: &'a str,
    status: &'a str,
    iter: usize,
    f: f64,
    x: &'a [f64],
    lambda: &'a [f64],
    s: &'a [f64],
    #[serde(skip_serializing_if = "Option::is_none")]
    kkt_residual: Option<f64>,
}

fn result_json(r: &SolveReport) -> ResultJson<'_> {
    ResultJson {
        algorithm: r.algorithm.as_str(),
        status: r.status.as_str(),
        iter: r.iter_count(),
        f: r.final_f(),
        x: &r.final_x,
        lambda: &r.final_lambda,
        s: &r.final_s,
        kkt_residual: r.kkt_fixed_point_residual,
    }
}

fn cmd_solve(a: &SolveArgs) -> Result<u8, CliError> {
    let p = a.source.load()?;
    let alg: Algorithm = a.algorithm.into();
    if alg != Algorithm::Scp && (a.solver.mu.is_nan() || a.solver.mu <= 0.0) {
        return Err(CliError::Invalid(format!(
            "{} needs --mu > 0",
            alg.as_str()
        )));
    }
    let cfg = a.solver.config();
    let x0 = resolve_point(&a.x0, &p, &cfg)?;
    log::info!(
        "solving dim {} with {} constraints using {}",
        p.dim,
        p.num_constraints(),
        alg.as_str()
    );
    let report = run(&p, &x0, alg, &cfg)?;
    if report.descent_failures() + report.feasibility_failures() > 0 {
        log::warn!(
            "monitor failures: descent {}, feasibility {}",
            report.descent_failures(),
            report.feasibility_failures()
        );
    }
    if let Some(path) = &a.trace {
        write_trace_file(path, &report)?;
    }
    let summary = Summary::of(&report);
    if let Some(path) = &a.summary {
        summary.write_file(path)?;
    }
    if let Some(path) = &a.out {
        write_output(Some(path), &to_canonical(&result_json(&report))?)?;
    }
    println!("{}", summary.line());
    Ok(status_exit_code(report.status))
}

fn cmd_gen(a: &GenArgs) -> Result<u8, CliError> {
    let text = match a.format {
        GenFormat::Program => to_canonical(&ProblemJson::from_program(&a.source.load()?))?,
        GenFormat::Data => match a.source.data()? {
            SourceData::Mpcc(d) => to_canonical(&MpccJson::from_data(&d))?,
            SourceData::Nmpc(d) => to_canonical(&NmpcJson::from_data(&d))?,
            SourceData::None => {
                return Err(CliError::Invalid(
                    "--format data needs --gen mpcc or --gen nmpc".into(),
                ))
            }
        },
    };
    write_output(a.out.as_ref(), &text)?;
    Ok(EXIT_OK)
}

/// Multipliers above this count as strictly active.
fn strict_threshold(lambda: &[f64]) -> f64 {
    1e-8 * (1.0 + lambda.iter().fold(0.0_f64, |m, l| m.max(l.abs())))
}

fn activity_table(p: &DCProgram, x: &[f64], lambda: Option<&[f64]>) -> String {
    let g = p.constraint_values(x);
    let thr = lambda.map_or(0.0, strict_threshold);
    let mut out = String::from("constraint  g(x)  lambda  activity\n");
    for (i, gi) in g.iter().enumerate() {
        let l = lambda.map(|l| l[i]);
        let active = gi.abs() <= 1e-6 * (1.0 + gi.abs());
        let kind = match l {
            _ if *gi > 1e-6 => "violated",
            Some(l) if active && l > thr => "strictly-active",
            _ if active => "active",
            _ => "inactive",
        };
        let l = l.map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
        out.push_str(&format!("{}  {gi:.6e}  {l}  {kind}\n", p.label(i)));
    }
    out
}

fn cmd_check(a: &CheckArgs) -> Result<u8, CliError> {
    let p = a.source.load()?;
    scpdc_core::model::ensure_valid(&p)?;
    let cfg = SolverConfig {
        eps: a.eps,
        mu0: a.mu,
        inner_tol: a.inner_tol,
        ..SolverConfig::default()
    };
    cfg.validate()?;
    let x = resolve_point(&a.x, &p, &cfg)?;
    let outside = p.omega.violation(&x);
    let feasgap = p.feasgap(&x).max(outside);
    if outside > 1e-8 {
        println!("residual n/a (point outside the convex set, violation {outside:.6e})");
        println!("feasgap {feasgap:.6e}");
        print!("{}", activity_table(&p, &x, None));
        return Ok(EXIT_INVALID);
    }
    let c = fixed_point_check(&p, &x, &cfg)?;
    println!("residual {:.6e}", c.residual);
    println!("step {:.6e}", c.step);
    println!("kkt {:.6e}", c.direct);
    println!("feasgap {feasgap:.6e}");
    if c.relaxed {
        println!(
            "note: plain subproblem infeasible, relaxed subproblem used (mu {})",
            a.mu
        );
    }
    print!("{}", activity_table(&p, &x, Some(&c.lambda)));
    Ok(if c.residual <= a.eps {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cmd_bench(a: &BenchArgs) -> Result<u8, CliError> {
    std::fs::create_dir_all(&a.out).map_err(|e| CliError::io(&a.out, e))?;
    let opts = BenchOptions {
        eps: a.eps,
        mu: a.mu,
        max_iter: a.max_iter,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let outcome = pool.install(|| run_suite(a.suite, &a.out, &opts))?;
    println!(
        "{}: {} rows, {} converged, table {}",
        a.suite.name(),
        outcome.rows,
        outcome.converged,
        outcome.table.display()
    );
    Ok(EXIT_OK)
}
