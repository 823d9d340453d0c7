//! Outer iterations: the feasible-path method, its slack-relaxed variant,
//! the penalty DCA baseline, stationarity checks and runtime monitors.
//!
//! Iteration `k` (0-based) solves the convex subproblem built at `x^k` and
//! stores `x^{k+1}` in record `k`. A run that stops at record `k` reports
//! `k` iterations; the starting point `x⁰` is kept in [`SolveReport::start`].

mod monitor;
mod solve;
mod subproblem;

use alloc::vec::Vec;

use crate::inner::InnerStatus;
use crate::{Error, Result};

pub use monitor::{check_descent, check_feasible_path, DescentCheck};
pub use solve::{
    dc_feasible_start, fixed_point_check, kkt_fixed_point_residual, project_onto_omega, solve_dca,
    solve_rscp, solve_scp, FixedPointCheck,
};
pub use subproblem::{build_dca_subproblem, build_scp_subproblem, Variant};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MuUpdate {
    Fixed,
    /// Multiply by `factor` (up to `cap`) when the slack norm grows, or when
    /// the step has converged while the slacks have not.
    Geometric {
        factor: f64,
        cap: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegTrigger {
    Always,
    /// Re-solve with the proximal term only when the plain step fails to
    /// decrease the objective.
    OnNonDecrease,
    Never,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monitors {
    pub descent: bool,
    pub feasibility: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub eps: f64,
    pub max_iter: usize,
    pub mu0: f64,
    pub mu_update: MuUpdate,
    pub rho_reg: f64,
    pub reg_trigger: RegTrigger,
    pub monitors: Monitors,
    pub inner_tol: f64,
    pub max_newton: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: 1e-6,
            max_iter: 200,
            mu0: 0.1,
            mu_update: MuUpdate::Fixed,
            rho_reg: 1e-3,
            reg_trigger: RegTrigger::OnNonDecrease,
            monitors: Monitors {
                descent: true,
                feasibility: true,
            },
            inner_tol: 1e-8,
            max_newton: 500,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.into()));
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        if !(self.rho_reg >= 0.0) || !self.rho_reg.is_finite() {
            return bad("rho_reg must be finite and nonnegative");
        }
        if !(self.inner_tol > 0.0) {
            return bad("inner_tol must be positive");
        }
        if self.max_newton == 0 {
            return bad("max_newton must be at least 1");
        }
        if let MuUpdate::Geometric { factor, cap } = self.mu_update {
            if !(factor > 1.0) || !(cap > 0.0) {
                return bad("geometric mu update needs factor > 1 and cap > 0");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Scp,
    Rscp,
    Dca,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Scp => "scp",
            Algorithm::Rscp => "rscp",
            Algorithm::Dca => "dca",
        }
    }
}

/// One outer iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: usize,
    pub algorithm: Algorithm,
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Slacks (empty unless relaxed).
    pub s: Vec<f64>,
    pub f_val: f64,
    /// `f + μΣs` for the relaxed method, the penalty `f + μΣ[gᵢ]₊` for DCA,
    /// and `f` otherwise.
    pub f_mu_val: f64,
    pub step_norm: f64,
    pub feasgap: f64,
    pub descent_lhs: f64,
    pub descent_rhs: f64,
    /// `None` when the descent monitor is off or for the start record.
    pub descent_ok: Option<bool>,
    pub feasibility_ok: Option<bool>,
    pub mu_used: f64,
    pub rho_used: f64,
    pub inner_iters: usize,
    pub inner_status: InnerStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    ConvergedStationary,
    MaxIter,
    SubproblemInfeasible,
    NumericalFailure,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::ConvergedStationary => "ConvergedStationary",
            SolveStatus::MaxIter => "MaxIter",
            SolveStatus::SubproblemInfeasible => "SubproblemInfeasible",
            SolveStatus::NumericalFailure => "NumericalFailure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub algorithm: Algorithm,
    pub status: SolveStatus,
    /// The starting point (after projection onto `Omega`), as record with
    /// zero step.
    pub start: IterationRecord,
    pub iterations: Vec<IterationRecord>,
    pub final_x: Vec<f64>,
    pub final_lambda: Vec<f64>,
    pub final_s: Vec<f64>,
    /// Fixed-point residual at `final_x`; `None` if it could not be computed.
    pub kkt_fixed_point_residual: Option<f64>,
    /// Seconds, measured with a monotonic clock (`std` feature only).
    pub wall_time: Option<f64>,
}

impl SolveReport {
    /// `k` of the last record, the conventional iteration count.
    pub fn iter_count(&self) -> usize {
        self.iterations.last().map_or(0, |r| r.k)
    }

    pub fn final_f(&self) -> f64 {
        self.iterations.last().unwrap_or(&self.start).f_val
    }

    pub fn descent_failures(&self) -> usize {
        self.iterations
            .iter()
            .filter(|r| r.descent_ok == Some(false))
            .count()
    }

    pub fn feasibility_failures(&self) -> usize {
        self.iterations
            .iter()
            .filter(|r| r.feasibility_ok == Some(false))
            .count()
    }
}
