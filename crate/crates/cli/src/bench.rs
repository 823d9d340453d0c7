//! Batch suites. Rows run in parallel; each row writes its own file and the
//! files are merged into one table at the end.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use scpdc_core::problems::{
    build_dca_comparison, build_mpcc, build_small_example, gen_random_mpcc, gen_random_ncvqcqp,
    mpcc_oracle, SmallCase,
};
use scpdc_core::rng::SplitMix64;
use scpdc_core::scp::{
    dc_feasible_start, Algorithm, MuUpdate, SolveReport, SolveStatus, SolverConfig,
};
use scpdc_core::DCProgram;

use crate::error::CliError;
use crate::run::run;

pub const SEEDS: std::ops::RangeInclusive<u64> = 1..=10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    SmallExample,
    NcvqcqpGrid,
    MpccRandom,
    DcaVsScp,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::SmallExample => "small-example",
            Suite::NcvqcqpGrid => "ncvqcqp-grid",
            Suite::MpccRandom => "mpcc-random",
            Suite::DcaVsScp => "dca-vs-scp",
        }
    }
}

/// One run of one algorithm on one instance.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunRow {
    pub instance: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub algorithm: String,
    pub status: String,
    pub iter: usize,
    pub f_star: f64,
    pub time_s: f64,
    pub error: f64,
    pub feasgap: f64,
    pub kkt_residual: Option<f64>,
    pub descent_pass: usize,
    pub descent_fail: usize,
    pub feas_pass: usize,
    pub feas_fail: usize,
    /// Reference optimum when known (MPCC branch enumeration).
    pub f_ref: Option<f64>,
    pub message: String,
}

/// DCA against SCP from the same start.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CompareRow {
    pub seed: u64,
    pub status_scp: String,
    pub status_dca: String,
    pub iter_scp: usize,
    pub iter_dca: usize,
    pub iter_dca_ge_scp: bool,
    pub f_scp: f64,
    pub f_dca: f64,
    pub kkt_scp: Option<f64>,
    pub kkt_dca: Option<f64>,
    pub time_scp: f64,
    pub time_dca: f64,
    /// DCA's penalty function never increased.
    pub phi_monotone: bool,
    pub message: String,
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub eps: f64,
    pub mu: f64,
    pub max_iter: usize,
}

fn row_from(instance: String, seed: u64, p: &DCProgram, alg: Algorithm, r: &SolveReport) -> RunRow {
    let last = r.iterations.last().unwrap_or(&r.start);
    let count = |f: fn(&scpdc_core::scp::IterationRecord) -> Option<bool>, v: bool| {
        r.iterations.iter().filter(|it| f(it) == Some(v)).count()
    };
    RunRow {
        instance,
        seed,
        n: p.dim,
        m: p.num_constraints(),
        algorithm: alg.as_str().into(),
        status: r.status.as_str().into(),
        iter: r.iter_count(),
        f_star: r.final_f(),
        time_s: r.wall_time.unwrap_or(0.0),
        error: last.step_norm,
        feasgap: last.feasgap,
        kkt_residual: r.kkt_fixed_point_residual,
        descent_pass: count(|it| it.descent_ok, true),
        descent_fail: count(|it| it.descent_ok, false),
        feas_pass: count(|it| it.feasibility_ok, true),
        feas_fail: count(|it| it.feasibility_ok, false),
        f_ref: None,
        message: String::new(),
    }
}

fn failed_row(instance: String, seed: u64, alg: Algorithm, msg: String) -> RunRow {
    RunRow {
        instance,
        seed,
        algorithm: alg.as_str().into(),
        status: "Error".into(),
        f_star: f64::NAN,
        message: msg,
        ..RunRow::default()
    }
}

fn base_config(o: &BenchOptions) -> SolverConfig {
    SolverConfig {
        eps: o.eps,
        mu0: o.mu,
        max_iter: o.max_iter,
        ..SolverConfig::default()
    }
}

enum Job {
    Small(SmallCase),
    Ncv { n: usize, m2: usize, seed: u64 },
    Mpcc { seed: u64 },
    Compare { seed: u64 },
}

fn jobs(suite: Suite) -> Vec<Job> {
    match suite {
        Suite::SmallExample => vec![Job::Small(SmallCase::Case1), Job::Small(SmallCase::Case2)],
        Suite::NcvqcqpGrid => {
            let mut v = Vec::new();
            for n in [10, 30, 50] {
                for m2 in [5, 10] {
                    v.extend(SEEDS.map(|seed| Job::Ncv { n, m2, seed }));
                }
            }
            v
        }
        Suite::MpccRandom => SEEDS.map(|seed| Job::Mpcc { seed }).collect(),
        Suite::DcaVsScp => SEEDS.map(|seed| Job::Compare { seed }).collect(),
    }
}

enum Row {
    Run(RunRow),
    Compare(CompareRow),
}

fn run_job(job: &Job, o: &BenchOptions) -> Row {
    match *job {
        Job::Small(case) => {
            let name = format!("small-{case:?}").to_lowercase();
            let p = build_small_example(case);
            // the illustrative run uses its own tolerance
            let cfg = SolverConfig {
                eps: 1e-5,
                ..base_config(o)
            };
            Row::Run(match run(&p, &[0.0, 0.0], Algorithm::Scp, &cfg) {
                Ok(r) => row_from(name, 0, &p, Algorithm::Scp, &r),
                Err(e) => failed_row(name, 0, Algorithm::Scp, e.to_string()),
            })
        }
        Job::Ncv { n, m2, seed } => {
            let name = format!("ncvqcqp-n{n}-m{m2}");
            let p = gen_random_ncvqcqp(n, m2, seed);
            let cfg = base_config(o);
            let start = match dc_feasible_start(&p, &vec![0.0; n], &cfg) {
                Ok(Some(x)) => x,
                Ok(None) => {
                    return Row::Run(failed_row(
                        name,
                        seed,
                        Algorithm::Scp,
                        "no DC-feasible start".into(),
                    ))
                }
                Err(e) => return Row::Run(failed_row(name, seed, Algorithm::Scp, e.to_string())),
            };
            Row::Run(match run(&p, &start, Algorithm::Scp, &cfg) {
                Ok(r) => row_from(name, seed, &p, Algorithm::Scp, &r),
                Err(e) => failed_row(name, seed, Algorithm::Scp, e.to_string()),
            })
        }
        Job::Mpcc { seed } => {
            let (nx, ny) = (1 + (seed as usize) % 6, (seed as usize) % 3);
            let name = format!("mpcc-nx{nx}-ny{ny}");
            let d = gen_random_mpcc(nx, ny, seed);
            let cfg = SolverConfig {
                mu_update: MuUpdate::Geometric {
                    factor: 10.0,
                    cap: 1e8,
                },
                max_iter: o.max_iter.max(500),
                ..base_config(o)
            };
            let (p, idx) = match build_mpcc(&d) {
                Ok(v) => v,
                Err(e) => return Row::Run(failed_row(name, seed, Algorithm::Rscp, e.to_string())),
            };
            let mut row = match run(&p, &vec![0.0; p.dim], Algorithm::Rscp, &cfg) {
                Ok(r) => {
                    let mut row = row_from(name, seed, &p, Algorithm::Rscp, &r);
                    row.message = format!(
                        "complementarity gap {:.3e}",
                        idx.complementarity_gap(&r.final_x)
                    );
                    row
                }
                Err(e) => failed_row(name, seed, Algorithm::Rscp, e.to_string()),
            };
            match mpcc_oracle(&d, 1e-9) {
                Ok(orc) => row.f_ref = Some(orc.f_star),
                Err(e) => row.message = format!("{}; oracle failed: {e}", row.message),
            }
            Row::Run(row)
        }
        Job::Compare { seed } => Row::Compare(compare(seed, o)),
    }
}

fn compare(seed: u64, o: &BenchOptions) -> CompareRow {
    let p = build_dca_comparison();
    let cfg = SolverConfig {
        max_iter: o.max_iter.max(20_000),
        ..base_config(o)
    };
    let mut rng = SplitMix64::new(seed);
    let anchor: Vec<f64> = (0..p.dim).map(|_| rng.uniform(-5.0, 5.0)).collect();
    let mut row = CompareRow {
        seed,
        ..CompareRow::default()
    };
    let start = match dc_feasible_start(&p, &anchor, &cfg) {
        Ok(Some(x)) => x,
        Ok(None) => {
            row.message = "no DC-feasible start".into();
            return row;
        }
        Err(e) => {
            row.message = e.to_string();
            return row;
        }
    };
    // DCA's penalty weight follows the comparison setting, not --mu
    let dca_mu = 100.0;
    let scp = run(&p, &start, Algorithm::Scp, &cfg);
    let dca = run(
        &p,
        &start,
        Algorithm::Dca,
        &SolverConfig { mu0: dca_mu, ..cfg },
    );
    match (scp, dca) {
        (Ok(s), Ok(d)) => {
            let tol = 1e-9;
            let mut prev = d.start.f_mu_val;
            let mut monotone = true;
            for it in &d.iterations {
                monotone &= it.f_mu_val <= prev + tol * (1.0 + prev.abs());
                prev = it.f_mu_val;
            }
            CompareRow {
                seed,
                status_scp: s.status.as_str().into(),
                status_dca: d.status.as_str().into(),
                iter_scp: s.iter_count(),
                iter_dca: d.iter_count(),
                iter_dca_ge_scp: d.iter_count() >= s.iter_count(),
                f_scp: s.final_f(),
                f_dca: d.final_f(),
                kkt_scp: s.kkt_fixed_point_residual,
                kkt_dca: d.kkt_fixed_point_residual,
                time_scp: s.wall_time.unwrap_or(0.0),
                time_dca: d.wall_time.unwrap_or(0.0),
                phi_monotone: monotone,
                message: String::new(),
            }
        }
        (s, d) => {
            row.message = [s.err(), d.err()]
                .into_iter()
                .flatten()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join("; ");
            row
        }
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::io(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::io(path, e))?;
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::io(path, e)))
        .collect()
}

fn merge<T: Serialize + DeserializeOwned>(
    parts: &[PathBuf],
    out: &Path,
) -> Result<usize, CliError> {
    let mut rows: Vec<T> = Vec::new();
    for part in parts {
        rows.extend(read_csv::<T>(part)?);
    }
    write_csv(out, &rows)?;
    Ok(rows.len())
}

/// Outcome of a suite: the table path and per-row status counts.
#[derive(Debug)]
pub struct BenchOutcome {
    pub table: PathBuf,
    pub rows: usize,
    pub converged: usize,
}

pub fn run_suite(suite: Suite, out_dir: &Path, o: &BenchOptions) -> Result<BenchOutcome, CliError> {
    let parts_dir = out_dir.join(format!("{}.rows", suite.name()));
    std::fs::create_dir_all(&parts_dir).map_err(|e| CliError::io(&parts_dir, e))?;
    let jobs = jobs(suite);
    let parts: Vec<(PathBuf, bool)> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, job)| {
            let path = parts_dir.join(format!("{i:04}.csv"));
            let row = run_job(job, o);
            log::info!("{} row {i} done", suite.name());
            let ok = match &row {
                Row::Run(r) => r.status == SolveStatus::ConvergedStationary.as_str(),
                Row::Compare(c) => {
                    c.status_scp == "ConvergedStationary" && c.status_dca == "ConvergedStationary"
                }
            };
            match row {
                Row::Run(r) => write_csv(&path, &[r]),
                Row::Compare(c) => write_csv(&path, &[c]),
            }
            .map(|()| (path, ok))
        })
        .collect::<Result<_, _>>()?;

    let table = out_dir.join(format!("{}.csv", suite.name()));
    let paths: Vec<PathBuf> = parts.iter().map(|(p, _)| p.clone()).collect();
    let rows = match suite {
        Suite::DcaVsScp => merge::<CompareRow>(&paths, &table)?,
        _ => merge::<RunRow>(&paths, &table)?,
    };
    std::fs::remove_dir_all(&parts_dir).map_err(|e| CliError::io(&parts_dir, e))?;
    Ok(BenchOutcome {
        table,
        rows,
        converged: parts.iter().filter(|(_, ok)| *ok).count(),
    })
}
