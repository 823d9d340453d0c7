//! Solver flags and dispatch.

use clap::{Args, ValueEnum};

use scpdc_core::model::ensure_valid;
use scpdc_core::scp::{
    solve_dca, solve_rscp, solve_scp, Algorithm, Monitors, MuUpdate, RegTrigger, SolveReport,
    SolveStatus, SolverConfig,
};
use scpdc_core::DCProgram;

use crate::error::{CliError, EXIT_MAX_ITER, EXIT_OK, EXIT_SOLVER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Scp,
    Rscp,
    Dca,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Scp => Algorithm::Scp,
            AlgorithmArg::Rscp => Algorithm::Rscp,
            AlgorithmArg::Dca => Algorithm::Dca,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegArg {
    /// Proximal term only when a plain step fails to decrease f.
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MuUpdateArg {
    Fixed,
    Geometric,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Stop when the step norm (and, for rscp, the slack norm) is below this.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
    /// Penalty parameter for rscp and dca.
    #[arg(long, default_value_t = 0.1)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = MuUpdateArg::Fixed)]
    pub mu_update: MuUpdateArg,
    #[arg(long, default_value_t = 10.0)]
    pub mu_factor: f64,
    #[arg(long, default_value_t = 1e8)]
    pub mu_cap: f64,
    /// Proximal regularization of the subproblem objective.
    #[arg(long, value_enum, default_value_t = RegArg::Auto)]
    pub reg: RegArg,
    /// Weight of the proximal term.
    #[arg(long, default_value_t = 1e-3)]
    pub rho: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Tolerance of the inner barrier solver.
    #[arg(long, default_value_t = 1e-8)]
    pub inner_tol: f64,
    #[arg(long, default_value_t = 500)]
    pub max_newton: usize,
    /// Skip the descent and feasibility monitors.
    #[arg(long)]
    pub no_monitors: bool,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            eps: self.eps,
            max_iter: self.max_iter,
            mu0: self.mu,
            mu_update: match self.mu_update {
                MuUpdateArg::Fixed => MuUpdate::Fixed,
                MuUpdateArg::Geometric => MuUpdate::Geometric {
                    factor: self.mu_factor,
                    cap: self.mu_cap,
                },
            },
            rho_reg: self.rho,
            reg_trigger: match self.reg {
                RegArg::Auto => RegTrigger::OnNonDecrease,
                RegArg::On => RegTrigger::Always,
                RegArg::Off => RegTrigger::Never,
            },
            monitors: Monitors {
                descent: !self.no_monitors,
                feasibility: !self.no_monitors,
            },
            inner_tol: self.inner_tol,
            max_newton: self.max_newton,
        }
    }
}

/// Validates the program and runs one algorithm from `x0`.
pub fn run(
    p: &DCProgram,
    x0: &[f64],
    alg: Algorithm,
    cfg: &SolverConfig,
) -> Result<SolveReport, CliError> {
    ensure_valid(p)?;
    cfg.validate()?;
    let report = match alg {
        Algorithm::Scp => solve_scp(p, x0, cfg)?,
        Algorithm::Rscp => solve_rscp(p, x0, cfg)?,
        Algorithm::Dca => solve_dca(p, x0, cfg.mu0, cfg)?,
    };
    Ok(report)
}

pub fn status_exit_code(s: SolveStatus) -> u8 {
    match s {
        SolveStatus::ConvergedStationary => EXIT_OK,
        SolveStatus::MaxIter => EXIT_MAX_ITER,
        SolveStatus::SubproblemInfeasible | SolveStatus::NumericalFailure => EXIT_SOLVER,
    }
}
