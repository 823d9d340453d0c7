//! Per-iteration trace CSV and the one-line run summary.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use scpdc_core::scp::{IterationRecord, SolveReport};

use crate::error::CliError;

#[derive(Debug, Serialize)]
struct TraceRow<'a> {
    iter: usize,
    f: f64,
    f_mu: f64,
    error: f64,
    feasgap: f64,
    mu: f64,
    rho: f64,
    descent_lhs: f64,
    descent_rhs: f64,
    inner_iters: usize,
    inner_status: &'a str,
}

impl<'a> From<&'a IterationRecord> for TraceRow<'a> {
    fn from(r: &'a IterationRecord) -> Self {
        TraceRow {
            iter: r.k,
            f: r.f_val,
            f_mu: r.f_mu_val,
            error: r.step_norm,
            feasgap: r.feasgap,
            mu: r.mu_used,
            rho: r.rho_used,
            descent_lhs: r.descent_lhs,
            descent_rhs: r.descent_rhs,
            inner_iters: r.inner_iters,
            inner_status: r.inner_status.as_str(),
        }
    }
}

/// One row per outer iteration; the start point is not a row.
pub fn write_trace<W: Write>(out: W, report: &SolveReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for r in &report.iterations {
        w.serialize(TraceRow::from(r))
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_trace_file(path: &Path, report: &SolveReport) -> Result<(), CliError> {
    let file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    write_trace(std::io::BufWriter::new(file), report)
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub status: String,
    pub f_star: f64,
    pub iter: usize,
    pub time_s: f64,
    pub error: f64,
    pub feasgap: f64,
}

impl Summary {
    pub fn of(report: &SolveReport) -> Self {
        let last = report.iterations.last().unwrap_or(&report.start);
        Summary {
            status: report.status.as_str().to_string(),
            f_star: report.final_f(),
            iter: report.iter_count(),
            time_s: report.wall_time.unwrap_or(0.0),
            error: last.step_norm,
            feasgap: last.feasgap,
        }
    }

    /// `status, f*, iter, time_s, error, feasgap`
    pub fn line(&self) -> String {
        format!(
            "{}, {:.16e}, {}, {:.6}, {:.6e}, {:.6e}",
            self.status, self.f_star, self.iter, self.time_s, self.error, self.feasgap
        )
    }

    /// Header row plus one data row.
    pub fn write_file(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))?;
        w.serialize(self).map_err(|e| CliError::io(path, e))?;
        w.flush().map_err(|e| CliError::io(path, e))
    }
}
