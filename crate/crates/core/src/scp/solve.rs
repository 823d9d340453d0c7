use alloc::vec;
use alloc::vec::Vec;

use super::monitor::step_norm;
use super::subproblem::OMEGA_TOL;
use super::{
    build_dca_subproblem, build_scp_subproblem, check_descent, check_feasible_path, Algorithm,
    IterationRecord, MuUpdate, RegTrigger, SolveReport, SolveStatus, SolverConfig, Variant,
};
use crate::inner::{BarrierSolver, ConvexSubproblem, InnerOptions, InnerSolution, InnerStatus};
use crate::math;
use crate::model::{ensure_valid, ConvexQuadratic, DCProgram};
use crate::{Error, Result};

fn solver_for(cfg: &SolverConfig) -> BarrierSolver {
    BarrierSolver::new(InnerOptions {
        tol: cfg.inner_tol,
        max_newton: cfg.max_newton,
    })
}

fn check_start(p: &DCProgram, x0: &[f64]) -> Result<()> {
    if x0.len() != p.dim {
        return Err(Error::DimensionMismatch {
            what: "starting point",
            expected: p.dim,
            found: x0.len(),
        });
    }
    if !x0.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("starting point"));
    }
    Ok(())
}

fn inner_error(sol: &InnerSolution) -> Error {
    Error::InnerSolve(alloc::format!(
        "status {} (kkt residual {:e})",
        sol.status.as_str(),
        sol.kkt_residual
    ))
}

/// `argmin ½‖x − x0‖²` over `Omega`. Fails with
/// [`Error::EmptyFeasibleSet`] when `Omega` has no (strictly interior)
/// point.
pub fn project_onto_omega(p: &DCProgram, x0: &[f64], cfg: &SolverConfig) -> Result<Vec<f64>> {
    check_start(p, x0)?;
    let n = p.dim;
    let obj = ConvexQuadratic::scaled_norm(
        n,
        1.0,
        x0.iter().map(|v| -v).collect(),
        0.5 * x0.iter().map(|v| v * v).sum::<f64>(),
    );
    let sp = ConvexSubproblem::boxed(obj, p.omega.lb.clone(), p.omega.ub.clone())
        .with_ineq(p.omega.a.clone(), p.omega.b.clone())
        .with_eq(p.omega.e.clone(), p.omega.d.clone());
    let sol = solver_for(cfg).solve(&sp, Some(x0))?;
    match sol.status {
        InnerStatus::Optimal => Ok(sol.z),
        InnerStatus::Infeasible => Err(Error::EmptyFeasibleSet),
        _ => Err(inner_error(&sol)),
    }
}

/// A point of `Omega` that satisfies every DC constraint: the projection of
/// `anchor` onto `Omega` intersected with the convex inner approximation
/// built at the projection of `anchor` onto `Omega`. `None` when that
/// approximation is empty.
pub fn dc_feasible_start(
    p: &DCProgram,
    anchor: &[f64],
    cfg: &SolverConfig,
) -> Result<Option<Vec<f64>>> {
    let xa = project_onto_omega(p, anchor, cfg)?;
    let mut sp = build_scp_subproblem(p, &xa, Variant::Plain, p.has_dc_objective())?;
    let n = p.dim;
    sp.objective = ConvexQuadratic::scaled_norm(
        n,
        1.0,
        anchor.iter().map(|v| -v).collect(),
        0.5 * anchor.iter().map(|v| v * v).sum::<f64>(),
    );
    let sol = solver_for(cfg).solve(&sp, Some(&xa))?;
    Ok((sol.status == InnerStatus::Optimal).then_some(sol.z))
}

/// Outcome of the fixed-point stationarity test at `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointCheck {
    /// Solution of the subproblem built at `x`.
    pub x_hat: Vec<f64>,
    /// `‖x̂ − x‖`
    pub step: f64,
    /// Scaled residual of the KKT system of the original problem at `x`,
    /// using the subproblem multipliers.
    pub direct: f64,
    /// Multipliers of the DC constraints.
    pub lambda: Vec<f64>,
    /// True when the plain subproblem was infeasible and the relaxed one
    /// was used.
    pub relaxed: bool,
    /// `max(step, direct)`
    pub residual: f64,
}

/// Solves the subproblem at `x` and compares: `x` is stationary exactly
/// when it solves its own subproblem.
///
/// The direct residual divides stationarity and complementarity by
/// `1 + ‖∇f(x)‖_∞`, since multipliers scale with the objective; the primal
/// violation is absolute.
pub fn fixed_point_check(p: &DCProgram, x: &[f64], cfg: &SolverConfig) -> Result<FixedPointCheck> {
    check_start(p, x)?;
    let n = p.dim;
    let dc = p.has_dc_objective();
    let mut solver = solver_for(cfg);
    let sp = build_scp_subproblem(p, x, Variant::Plain, dc)?;
    let mut sol = solver.solve(&sp, Some(x))?;
    let mut relaxed = false;
    let mut sp_used = sp;
    if sol.status == InnerStatus::Infeasible {
        if !(cfg.mu0 > 0.0) {
            return Err(Error::InvalidArgument(
                "relaxed fallback needs mu0 > 0".into(),
            ));
        }
        let sp = build_scp_subproblem(p, x, Variant::Relaxed { mu: cfg.mu0 }, dc)?;
        let warm = relaxed_warm_start(p, x);
        sol = solver.solve(&sp, Some(&warm))?;
        relaxed = true;
        sp_used = sp;
    }
    if sol.status != InnerStatus::Optimal {
        return Err(inner_error(&sol));
    }
    let x_hat = sol.z[..n].to_vec();
    let step = step_norm(&x_hat, x);

    let grad_f = p.objective.gradient(x);
    let scale = 1.0 + math::norm_inf(&grad_f);
    let mut grad = grad_f;
    for (g, &l) in p.constraints.iter().zip(&sol.lambda_qc) {
        for (gi, v) in grad.iter_mut().zip(g.gradient(x)) {
            *gi += l * v;
        }
    }
    let m = &sol.mult_lin;
    for (gi, v) in grad.iter_mut().zip(sp_used.lin_ineq.a.tr_mul_vec(&m.ineq)) {
        *gi += v;
    }
    for (gi, v) in grad.iter_mut().zip(sp_used.lin_eq.a.tr_mul_vec(&m.eq)) {
        *gi += v;
    }
    for i in 0..n {
        grad[i] += m.upper[i] - m.lower[i];
    }
    let stationarity = math::norm_inf(&grad);

    let mut comp: f64 = 0.0;
    for (g, &l) in p.constraints.iter().zip(&sol.lambda_qc) {
        comp = comp.max((l * g.value(x)).abs());
    }
    for ((ax, b), nu) in p.omega.a.mul_vec(x).iter().zip(&p.omega.b).zip(&m.ineq) {
        comp = comp.max((nu * (ax - b)).abs());
    }
    for i in 0..n {
        if p.omega.lb[i].is_finite() {
            comp = comp.max((m.lower[i] * (x[i] - p.omega.lb[i])).abs());
        }
        if p.omega.ub[i].is_finite() {
            comp = comp.max((m.upper[i] * (p.omega.ub[i] - x[i])).abs());
        }
    }
    let primal = p.feasgap(x).max(p.omega.violation(x));
    let direct = (stationarity / scale).max(comp / scale).max(primal);
    Ok(FixedPointCheck {
        x_hat,
        step,
        direct,
        lambda: sol.lambda_qc[..p.num_constraints()].to_vec(),
        relaxed,
        residual: step.max(direct),
    })
}

/// `max(‖x̂ − x‖, direct KKT residual)`; see [`fixed_point_check`].
pub fn kkt_fixed_point_residual(p: &DCProgram, x: &[f64], cfg: &SolverConfig) -> Result<f64> {
    fixed_point_check(p, x, cfg).map(|c| c.residual)
}

fn relaxed_warm_start(p: &DCProgram, x: &[f64]) -> Vec<f64> {
    let mut w = x.to_vec();
    w.extend(p.constraint_values(x).iter().map(|g| g.max(0.0) + 1.0));
    w
}

fn dca_warm_start(p: &DCProgram, x: &[f64]) -> Vec<f64> {
    let mut w = x.to_vec();
    w.extend(
        p.constraints
            .iter()
            .map(|g| g.u.value(x).max(g.v.value(x)) + 1.0),
    );
    w
}

struct Runner<'a> {
    p: &'a DCProgram,

    alg: Algorithm,
    solver: BarrierSolver,
    dc: bool,
}

impl Runner<'_> {
    fn solve_at(&mut self, xk: &[f64], mu: f64, rho: f64) -> Result<InnerSolution> {
        let (sp, warm) = match self.alg {
            Algorithm::Scp => {
                let v = if rho > 0.0 {
                    Variant::Regularized { rho }
                } else {
                    Variant::Plain
                };
                (build_scp_subproblem(self.p, xk, v, self.dc)?, xk.to_vec())
            }
            Algorithm::Rscp => {
                let v = if rho > 0.0 {
                    Variant::RelaxedRegularized { mu, rho }
                } else {
                    Variant::Relaxed { mu }
                };
                (
                    build_scp_subproblem(self.p, xk, v, self.dc)?,
                    relaxed_warm_start(self.p, xk),
                )
            }
            Algorithm::Dca => (
                build_dca_subproblem(self.p, xk, mu)?,
                dca_warm_start(self.p, xk),
            ),
        };
        self.solver.solve(&sp, Some(&warm))
    }

    fn record(
        &self,
        k: usize,
        prev_x: &[f64],
        sol: &InnerSolution,
        mu: f64,
        rho: f64,
    ) -> IterationRecord {
        let p = self.p;
        let n = p.dim;
        let m = p.num_constraints();
        let x = sol.z[..n].to_vec();
        let (lambda, s) = match self.alg {
            Algorithm::Scp => (sol.lambda_qc.clone(), Vec::new()),
            Algorithm::Rscp => (
                sol.lambda_qc.clone(),
                sol.z[n..n + m].iter().map(|v| v.max(0.0)).collect(),
            ),
            Algorithm::Dca => ((0..m).map(|i| sol.lambda_qc[2 * i]).collect(), Vec::new()),
        };
        let f_val = p.objective_value(&x);
        let f_mu_val = match self.alg {
            Algorithm::Scp => f_val,
            Algorithm::Rscp => f_val + mu * s.iter().sum::<f64>(),
            Algorithm::Dca => p.l1_penalty(&x, mu),
        };
        IterationRecord {
            k,
            algorithm: self.alg,
            step_norm: step_norm(&x, prev_x),
            feasgap: p.feasgap(&x),
            x,
            lambda,
            s,
            f_val,
            f_mu_val,
            descent_lhs: 0.0,
            descent_rhs: 0.0,
            descent_ok: None,
            feasibility_ok: None,
            mu_used: mu,
            rho_used: rho,
            inner_iters: sol.iterations,
            inner_status: sol.status,
        }
    }
}

fn run(
    p: &DCProgram,
    x0: &[f64],
    cfg: &SolverConfig,
    alg: Algorithm,
    mu_start: f64,
) -> Result<SolveReport> {
    #[cfg(feature = "std")]
    let clock = std::time::Instant::now();
    cfg.validate()?;
    ensure_valid(p)?;
    check_start(p, x0)?;
    let n = p.dim;
    let m = p.num_constraints();

    let x_start = if p.omega.violation(x0) > OMEGA_TOL {
        log::info!(
            "starting point outside Omega (violation {:e}); projecting",
            p.omega.violation(x0)
        );
        project_onto_omega(p, x0, cfg)?
    } else {
        x0.to_vec()
    };

    let mut runner = Runner {
        p,

        alg,
        solver: solver_for(cfg),
        dc: p.has_dc_objective(),
    };
    let mut mu = mu_start;
    let f0 = p.objective_value(&x_start);
    let s0: Vec<f64> = match alg {
        Algorithm::Rscp => p
            .constraint_values(&x_start)
            .iter()
            .map(|g| g.max(0.0))
            .collect(),
        _ => Vec::new(),
    };
    let start = IterationRecord {
        k: 0,
        algorithm: alg,
        lambda: vec![0.0; m],
        f_val: f0,
        f_mu_val: match alg {
            Algorithm::Scp => f0,
            Algorithm::Rscp => f0 + mu * s0.iter().sum::<f64>(),
            Algorithm::Dca => p.l1_penalty(&x_start, mu),
        },
        s: s0,
        step_norm: 0.0,
        feasgap: p.feasgap(&x_start),
        descent_lhs: 0.0,
        descent_rhs: 0.0,
        descent_ok: None,
        feasibility_ok: None,
        mu_used: mu,
        rho_used: 0.0,
        inner_iters: 0,
        inner_status: InnerStatus::Optimal,
        x: x_start,
    };
    if alg == Algorithm::Scp && start.feasgap > 0.0 {
        log::warn!(
            "starting point violates the DC constraints by {:e}; feasible-path guarantees do not apply",
            start.feasgap
        );
    }

    let mut records: Vec<IterationRecord> = Vec::new();
    let mut status = SolveStatus::MaxIter;
    let always_rho = if cfg.reg_trigger == RegTrigger::Always {
        cfg.rho_reg
    } else {
        0.0
    };
    for k in 0..cfg.max_iter {
        let prev = records.last().unwrap_or(&start);
        let xk = prev.x.clone();
        let mut rho = always_rho;
        let mut sol = runner.solve_at(&xk, mu, rho)?;
        if sol.status == InnerStatus::Optimal
            && alg != Algorithm::Dca
            && cfg.reg_trigger == RegTrigger::OnNonDecrease
            && cfg.rho_reg > 0.0
        {
            let x_new = &sol.z[..n];
            if step_norm(x_new, &xk) > cfg.eps && p.objective_value(x_new) >= p.objective_value(&xk)
            {
                log::debug!(
                    "iteration {k}: no decrease, re-solving with proximal term {:e}",
                    cfg.rho_reg
                );
                let resolved = runner.solve_at(&xk, mu, cfg.rho_reg)?;
                if resolved.status == InnerStatus::Optimal {
                    sol = resolved;
                    rho = cfg.rho_reg;
                }
            }
        }
        if sol.status != InnerStatus::Optimal {
            log::warn!(
                "iteration {k}: subproblem ended with {}",
                sol.status.as_str()
            );
            status = match (alg, sol.status) {
                (Algorithm::Scp, InnerStatus::Infeasible) => SolveStatus::SubproblemInfeasible,
                _ => SolveStatus::NumericalFailure,
            };
            break;
        }

        let mut rec = runner.record(k, &xk, &sol, mu, rho);
        let prev = records.last().unwrap_or(&start);
        let dc = check_descent(prev, &rec, p);
        rec.descent_lhs = dc.lhs;
        rec.descent_rhs = dc.rhs;
        if cfg.monitors.descent {
            rec.descent_ok = Some(dc.ok);
            if !dc.ok {
                log::warn!(
                    "iteration {k}: descent monitor failed (lhs {:e}, rhs {:e})",
                    dc.lhs,
                    dc.rhs
                );
            }
        }
        if cfg.monitors.feasibility && alg == Algorithm::Scp {
            let ok = check_feasible_path(&rec, p, cfg.inner_tol);
            rec.feasibility_ok = Some(ok);
            if !ok {
                log::warn!(
                    "iteration {k}: feasible-path monitor failed (feasgap {:e})",
                    rec.feasgap
                );
            }
        }
        log::info!(
            "{} k={k} f={:.10e} step={:.3e} feasgap={:.3e} mu={:e} inner={}",
            alg.as_str(),
            rec.f_val,
            rec.step_norm,
            rec.feasgap,
            mu,
            rec.inner_iters
        );

        let s_norm = math::norm2(&rec.s);
        let converged = rec.step_norm <= cfg.eps && (alg != Algorithm::Rscp || s_norm <= cfg.eps);
        if alg == Algorithm::Rscp {
            if let MuUpdate::Geometric { factor, cap } = cfg.mu_update {
                let prev_s = math::norm2(&prev.s);
                let grew = s_norm > cfg.eps && s_norm > prev_s;
                let stuck = rec.step_norm <= cfg.eps && s_norm > cfg.eps;
                if (grew || stuck) && mu < cap {
                    let next = (mu * factor).min(cap);
                    log::info!(
                        "iteration {k}: slack norm {s_norm:e}, raising mu {mu:e} -> {next:e}"
                    );
                    mu = next;
                }
            }
        }
        records.push(rec);
        if converged {
            status = SolveStatus::ConvergedStationary;
            break;
        }
    }

    let last = records.last().unwrap_or(&start);
    let final_x = last.x.clone();
    let final_lambda = last.lambda.clone();
    let final_s = last.s.clone();
    // a relaxed run is certified against the penalty it ended with
    let check_cfg = SolverConfig {
        mu0: if alg == Algorithm::Rscp { mu } else { cfg.mu0 },
        ..*cfg
    };
    let kkt = match fixed_point_check(p, &final_x, &check_cfg) {
        Ok(c) => Some(c.residual),
        Err(e) => {
            log::debug!("fixed-point residual unavailable: {e}");
            None
        }
    };
    #[cfg(feature = "std")]
    let wall_time = Some(clock.elapsed().as_secs_f64());
    #[cfg(not(feature = "std"))]
    let wall_time = None;
    Ok(SolveReport {
        algorithm: alg,
        status,
        start,
        iterations: records,
        final_x,
        final_lambda,
        final_s,
        kkt_fixed_point_residual: kkt,
        wall_time,
    })
}

/// Feasible-path method: every subproblem's feasible set lies inside the
/// feasible set of the program, so all iterates stay feasible once the
/// start is. Stops when `‖x^{k+1} − x^k‖ ≤ ε`.
pub fn solve_scp(p: &DCProgram, x0: &[f64], cfg: &SolverConfig) -> Result<SolveReport> {
    run(p, x0, cfg, Algorithm::Scp, 0.0)
}

/// Slack-relaxed method with penalty `μ` (starting at `cfg.mu0`). The
/// subproblems are feasible whenever `Omega` is nonempty; stops when both
/// the step and `‖s‖` are at most `ε`.
pub fn solve_rscp(p: &DCProgram, x0: &[f64], cfg: &SolverConfig) -> Result<SolveReport> {
    if !(cfg.mu0 > 0.0) || !cfg.mu0.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "relaxed method needs mu0 > 0, got {}",
            cfg.mu0
        )));
    }
    run(p, x0, cfg, Algorithm::Rscp, cfg.mu0)
}

/// DCA on the exact L1 penalty `φ(x; μ) = f(x) + μΣ[gᵢ(x)]₊` with `μ` fixed.
pub fn solve_dca(p: &DCProgram, x0: &[f64], mu: f64, cfg: &SolverConfig) -> Result<SolveReport> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(alloc::format!(
            "DCA needs mu > 0, got {mu}"
        )));
    }
    run(p, x0, cfg, Algorithm::Dca, mu)
}
