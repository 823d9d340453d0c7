use alloc::vec;
use alloc::vec::Vec;

use super::reduce::{reduce, Quad, Reduced, Reduction, RowOrigin, SparseRow};
use super::{
    inner_kkt_residual, ConvexSubproblem, InnerOptions, InnerSolution, InnerStatus,
    LinearMultipliers, Phase1Outcome,
};
use crate::linalg::{Cholesky, Matrix};
use crate::math;
use crate::Result;

const ARMIJO_ALPHA: f64 = 0.25;
const BACKTRACK_BETA: f64 = 0.5;
const BARRIER_GROWTH: f64 = 10.0;
const REG_BASE: f64 = 1e-10;
const REG_GROWTH: f64 = 100.0;
const REG_RETRIES: usize = 3;
const DIVERGENCE_NORM: f64 = 1e15;
/// Extra Newton steps at the final barrier level, run to push the
/// stationarity residual toward roundoff.
const POLISH_STEPS: usize = 3;
const STALL_LIMIT: usize = 5;
const PHASE1_RADIUS: f64 = 1e6;

/// Primal log-barrier solver. Holds its Newton workspace, so one instance
/// runs one solve at a time (`&mut self`).
#[derive(Debug, Clone)]
pub struct BarrierSolver {
    opts: InnerOptions,
    hess: Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CenterStatus {
    Centered,
    MaxIter,
    Failed,
}

struct Run {
    y: Vec<f64>,
    t: f64,
    status: InnerStatus,
    central_path: Vec<f64>,
}

enum Phase1 {
    Point(Vec<f64>),
    Infeasible(f64),
    Failed(InnerStatus),
}

impl BarrierSolver {
    pub fn new(opts: InnerOptions) -> Self {
        BarrierSolver {
            opts,
            hess: Matrix::zeros(0, 0),
        }
    }

    pub fn options(&self) -> InnerOptions {
        self.opts
    }

    fn anchor(sp: &ConvexSubproblem, warm: Option<&[f64]>) -> Vec<f64> {
        match warm {
            Some(w) if w.len() == sp.dim_total && w.iter().all(|x| x.is_finite()) => w.to_vec(),
            _ => sp
                .lb
                .iter()
                .zip(&sp.ub)
                .map(|(&l, &u)| match (l.is_finite(), u.is_finite()) {
                    (true, true) => 0.5 * (l + u),
                    (true, false) => l + 1.0,
                    (false, true) => u - 1.0,
                    (false, false) => 0.0,
                })
                .collect(),
        }
    }

    /// Phase 1 alone: a strictly feasible point of `sp` or a certificate
    /// value showing there is none.
    pub fn phase1(&mut self, sp: &ConvexSubproblem, warm: Option<&[f64]>) -> Result<Phase1Outcome> {
        sp.validate()?;
        let anchor = Self::anchor(sp, warm);
        let red = match reduce(sp, &anchor, self.opts.tol)? {
            Reduction::Ready(r) => r,
            Reduction::Inconsistent(res) => return Ok(Phase1Outcome::Infeasible { residual: res }),
        };
        let y0 = red.map.project(&anchor);
        if red.n == 0 {
            let worst = max_violation(&red, &y0);
            return Ok(if worst <= self.opts.tol {
                Phase1Outcome::Point(red.map.lift(&y0))
            } else {
                Phase1Outcome::Infeasible { residual: worst }
            });
        }
        if strictly_feasible(&red, &y0) {
            return Ok(Phase1Outcome::Point(red.map.lift(&y0)));
        }
        let mut iters = 0;
        Ok(match self.phase1_reduced(&red, &y0, &mut iters) {
            Phase1::Point(y) => Phase1Outcome::Point(red.map.lift(&y)),
            Phase1::Infeasible(r) => Phase1Outcome::Infeasible { residual: r },
            // an unfinished phase 1 proves nothing; report what was reached
            Phase1::Failed(_) => Phase1Outcome::Infeasible { residual: f64::NAN },
        })
    }

    /// Solves the subproblem. A warm start that is strictly feasible skips
    /// phase 1; any other warm start only seeds it.
    pub fn solve(
        &mut self,
        sp: &ConvexSubproblem,
        warm_start: Option<&[f64]>,
    ) -> Result<InnerSolution> {
        sp.validate()?;
        let tol = self.opts.tol;
        let anchor = Self::anchor(sp, warm_start);
        let red = match reduce(sp, &anchor, tol)? {
            Reduction::Ready(r) => r,
            Reduction::Inconsistent(res) => {
                return Ok(failed_solution(
                    sp,
                    anchor,
                    InnerStatus::Infeasible,
                    Some(res),
                    0,
                ))
            }
        };
        let y_start = red.map.project(&anchor);

        if red.n == 0 {
            let worst = max_violation(&red, &y_start);
            let z = red.map.lift(&y_start);
            if worst > tol {
                return Ok(failed_solution(
                    sp,
                    z,
                    InnerStatus::Infeasible,
                    Some(worst),
                    0,
                ));
            }
            let obj = sp.objective_value(&z);
            return Ok(self.assemble(
                sp,
                &red,
                &y_start,
                1.0,
                InnerStatus::Optimal,
                0,
                vec![obj],
                true,
            ));
        }

        let mut iters = 0;
        let y0 = if strictly_feasible(&red, &y_start) {
            y_start
        } else {
            match self.phase1_reduced(&red, &y_start, &mut iters) {
                Phase1::Point(y) => y,
                Phase1::Infeasible(res) => {
                    log::debug!("phase 1: no strictly feasible point (residual {res:e})");
                    let z = red.map.lift(&y_start);
                    return Ok(failed_solution(
                        sp,
                        z,
                        InnerStatus::Infeasible,
                        Some(res),
                        iters,
                    ));
                }
                Phase1::Failed(status) => {
                    let z = red.map.lift(&y_start);
                    return Ok(failed_solution(sp, z, status, None, iters));
                }
            }
        };

        let run = self.minimize(&red, y0, &mut iters, false);
        Ok(self.assemble(
            sp,
            &red,
            &run.y,
            run.t,
            run.status,
            iters,
            run.central_path,
            false,
        ))
    }

    fn phase1_reduced(&mut self, red: &Reduced, y0: &[f64], iters: &mut usize) -> Phase1 {
        let n = red.n;
        let viol = max_violation(red, y0);
        let sigma0 = viol.max(0.0) + 1.0;
        let mut rows: Vec<SparseRow> = red
            .rows
            .iter()
            .map(|r| {
                let mut idx = r.idx.clone();
                let mut val = r.val.clone();
                idx.push(n);
                val.push(-1.0);
                SparseRow {
                    idx,
                    val,
                    rhs: r.rhs,
                    origin: r.origin,
                }
            })
            .collect();
        // a wide box around the start keeps the barrier bounded below when
        // the feasible set is unbounded
        for i in 0..n {
            let radius = PHASE1_RADIUS * (1.0 + y0[i].abs());
            rows.push(SparseRow {
                idx: vec![i],
                val: vec![1.0],
                rhs: y0[i] + radius,
                origin: RowOrigin::Aux,
            });
            rows.push(SparseRow {
                idx: vec![i],
                val: vec![-1.0],
                rhs: radius - y0[i],
                origin: RowOrigin::Aux,
            });
        }
        // σ ≥ −1 keeps the auxiliary problem bounded below
        rows.push(SparseRow {
            idx: vec![n],
            val: vec![-1.0],
            rhs: 1.0,
            origin: RowOrigin::Aux,
        });
        let mut obj_q = vec![0.0; n + 1];
        obj_q[n] = 1.0;
        let aux = Reduced {
            n: n + 1,
            obj: Quad {
                h: crate::linalg::SymMatrix::zeros(n + 1),
                q: obj_q,
                r: 0.0,
                affine: true,
            },
            qcs: red.qcs.iter().map(|c| c.with_aux(-1.0)).collect(),
            rows,
            map: red.map.clone(),
        };
        let mut start = y0.to_vec();
        start.push(sigma0);
        let run = self.minimize(&aux, start, iters, true);
        let y = run.y[..n].to_vec();
        if strictly_feasible(red, &y) {
            return Phase1::Point(y);
        }
        match run.status {
            InnerStatus::Optimal => {
                Phase1::Infeasible(run.y[n].max(max_violation(red, &y)).max(0.0))
            }
            other => Phase1::Failed(other),
        }
    }

    /// Barrier path-following from a strictly feasible `y`. With
    /// `stop_when_feasible` (phase 1) the run returns as soon as a centered
    /// point has a negative auxiliary variable.
    fn minimize(
        &mut self,
        red: &Reduced,
        mut y: Vec<f64>,
        iters: &mut usize,
        stop_when_feasible: bool,
    ) -> Run {
        let tol = self.opts.tol;
        let m_bar = (red.qcs.len() + red.rows.len()) as f64;
        let mut t = 1.0;
        let mut central_path = Vec::new();
        loop {
            let last_level = m_bar == 0.0 || m_bar / t <= 0.5 * tol;
            let status = self.center(red, &mut y, t, iters, last_level);
            match status {
                CenterStatus::Centered => {}
                CenterStatus::MaxIter => {
                    return Run {
                        y,
                        t,
                        status: InnerStatus::MaxIter,
                        central_path,
                    }
                }
                CenterStatus::Failed => {
                    return Run {
                        y,
                        t,
                        status: InnerStatus::NumericalFailure,
                        central_path,
                    }
                }
            }
            let obj = red.obj.value(&y);
            log::trace!("barrier level t = {t:e}, objective {obj:e}, newton total {iters}");
            central_path.push(obj);
            if stop_when_feasible && y[red.n - 1] < 0.0 {
                return Run {
                    y,
                    t,
                    status: InnerStatus::Optimal,
                    central_path,
                };
            }
            if last_level {
                return Run {
                    y,
                    t,
                    status: InnerStatus::Optimal,
                    central_path,
                };
            }
            t *= BARRIER_GROWTH;
        }
    }

    /// Newton's method on `t f₀ + φ` with backtracking.
    fn center(
        &mut self,
        red: &Reduced,
        y: &mut Vec<f64>,
        t: f64,
        iters: &mut usize,
        last_level: bool,
    ) -> CenterStatus {
        let n = red.n;
        let tol = self.opts.tol;
        let mut polish = if last_level { POLISH_STEPS } else { 0 };
        let mut best_dec2 = f64::INFINITY;
        let mut stalled = 0;
        if self.hess.rows() != n {
            self.hess = Matrix::zeros(n, n);
        }
        loop {
            if *iters >= self.opts.max_newton {
                return CenterStatus::MaxIter;
            }
            let c_vals: Vec<f64> = red.qcs.iter().map(|c| c.value(y)).collect();
            let c_grads: Vec<Vec<f64>> = red.qcs.iter().map(|c| c.gradient(y)).collect();
            let slacks: Vec<f64> = red.rows.iter().map(|r| r.rhs - r.dot(y)).collect();

            // gradient and lower triangle of the Hessian
            let mut grad: Vec<f64> = red.obj.gradient(y).into_iter().map(|g| t * g).collect();
            let h = &mut self.hess;
            for i in 0..n {
                for j in 0..=i {
                    h[(i, j)] = if red.obj.affine {
                        0.0
                    } else {
                        t * red.obj.h.get(i, j)
                    };
                }
            }
            for ((c, &cv), g) in red.qcs.iter().zip(&c_vals).zip(&c_grads) {
                let w = 1.0 / (-cv);
                for (gi, v) in grad.iter_mut().zip(g) {
                    *gi += w * v;
                }
                let w2 = w * w;
                for i in 0..n {
                    if g[i] == 0.0 && c.affine {
                        continue;
                    }
                    for j in 0..=i {
                        let mut add = w2 * g[i] * g[j];
                        if !c.affine {
                            add += w * c.h.get(i, j);
                        }
                        h[(i, j)] += add;
                    }
                }
            }
            for (row, &s) in red.rows.iter().zip(&slacks) {
                let w = 1.0 / s;
                let w2 = w * w;
                for (a, &i) in row.val.iter().zip(&row.idx) {
                    grad[i] += w * a;
                    for (b, &j) in row.val.iter().zip(&row.idx) {
                        if j <= i {
                            h[(i, j)] += w2 * a * b;
                        }
                    }
                }
            }

            let Some(step) = solve_regularized(h, &grad) else {
                log::debug!("newton system not positive definite after regularization");
                return CenterStatus::Failed;
            };
            let dec2 = -math::dot(&grad, &step);
            if !dec2.is_finite() {
                return CenterStatus::Failed;
            }
            let centered = 0.5 * dec2 <= 0.5 * tol;
            if !centered {
                // at large t the decrement can sit on a roundoff floor; once
                // it stops shrinking and its effect on f₀ (dec²/t) is far
                // below the tolerance, the point is as centered as it gets
                if dec2 < 0.5 * best_dec2 {
                    best_dec2 = dec2;
                    stalled = 0;
                } else {
                    stalled += 1;
                }
                if stalled >= STALL_LIMIT && dec2 / t <= 1e-3 * tol {
                    log::debug!(
                        "centering stopped at roundoff floor (decrement² {dec2:e}, t = {t:e})"
                    );
                    return CenterStatus::Centered;
                }
            }
            if centered {
                if polish == 0 || dec2 <= f64::EPSILON * f64::EPSILON {
                    return CenterStatus::Centered;
                }
                polish -= 1;
            }

            // directional data for the line search
            let d1 = t * math::dot(&red.obj.gradient(y), &step);
            let d2 = t * red.obj.curvature(&step);
            let qc_lin: Vec<f64> = c_grads.iter().map(|g| math::dot(g, &step)).collect();
            let qc_curv: Vec<f64> = red.qcs.iter().map(|c| c.curvature(&step)).collect();
            let row_lin: Vec<f64> = red.rows.iter().map(|r| r.dot(&step)).collect();

            let delta_phi = |s: f64| -> Option<f64> {
                let mut acc = s * d1 + 0.5 * s * s * d2;
                for i in 0..c_vals.len() {
                    let ratio = (s * qc_lin[i] + 0.5 * s * s * qc_curv[i]) / (-c_vals[i]);
                    if !(ratio < 1.0) {
                        return None;
                    }
                    acc -= math::ln_1p(-ratio);
                }
                for j in 0..slacks.len() {
                    let ratio = s * row_lin[j] / slacks[j];
                    if !(ratio < 1.0) {
                        return None;
                    }
                    acc -= math::ln_1p(-ratio);
                }
                Some(acc)
            };

            let mut s = 1.0;
            let mut accepted = None;
            for _ in 0..80 {
                if let Some(dphi) = delta_phi(s) {
                    if dphi <= ARMIJO_ALPHA * s * (-dec2) || centered {
                        let cand: Vec<f64> = y.iter().zip(&step).map(|(a, b)| a + s * b).collect();
                        if strictly_feasible(red, &cand) {
                            accepted = Some(cand);
                            break;
                        }
                    }
                }
                s *= BACKTRACK_BETA;
            }
            let Some(next) = accepted else {
                if dec2 <= 1e-6 {
                    // roundoff floor: further progress is not measurable
                    return CenterStatus::Centered;
                }
                log::debug!("line search failed (decrement² {dec2:e})");
                return CenterStatus::Failed;
            };
            log::trace!("newton t = {t:e} decrement² = {dec2:e} step = {s:e}");

            *y = next;
            *iters += 1;
            if math::norm_inf(y) > DIVERGENCE_NORM || !y.iter().all(|v| v.is_finite()) {
                log::debug!("barrier iterate diverged; subproblem looks unbounded");
                return CenterStatus::Failed;
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        &self,
        sp: &ConvexSubproblem,
        red: &Reduced,
        y: &[f64],
        t: f64,
        status: InnerStatus,
        iterations: usize,
        central_path: Vec<f64>,
        degenerate: bool,
    ) -> InnerSolution {
        let mut lambda_qc = vec![0.0; sp.qcs.len()];
        let mut nu_rows = vec![0.0; red.rows.len()];
        if !degenerate {
            for (l, c) in lambda_qc.iter_mut().zip(&red.qcs) {
                *l = 1.0 / (t * -c.value(y));
            }
            for (nu, row) in nu_rows.iter_mut().zip(&red.rows) {
                *nu = 1.0 / (t * (row.rhs - row.dot(y)));
            }
            refine_multipliers(red, y, &mut lambda_qc, &mut nu_rows);
        }
        let mut sol = lifted_solution(
            sp,
            red,
            y,
            lambda_qc,
            &nu_rows,
            status,
            iterations,
            central_path,
        );
        // The stopping rule already certifies a duality gap below the
        // tolerance. On degenerate subproblems the stationarity residual can
        // sit above it, so only a residual beyond √tol counts as failure.
        let limit = math::sqrt(self.opts.tol);
        if sol.status == InnerStatus::Optimal && sol.kkt_residual > limit {
            log::debug!(
                "barrier finished but KKT residual {:e} exceeds {limit:e}",
                sol.kkt_residual
            );
            sol.status = InnerStatus::NumericalFailure;
        }
        sol
    }
}

/// Maps reduced-space multipliers back onto the user's rows and computes
/// the equality multipliers by least squares.
#[allow(clippy::too_many_arguments)]
fn lifted_solution(
    sp: &ConvexSubproblem,
    red: &Reduced,
    y: &[f64],
    lambda_qc: Vec<f64>,
    nu_rows: &[f64],
    status: InnerStatus,
    iterations: usize,
    central_path: Vec<f64>,
) -> InnerSolution {
    let z = red.map.lift(y);
    let mut mult = LinearMultipliers::zeros(sp);
    for (row, &nu) in red.rows.iter().zip(nu_rows) {
        match row.origin {
            RowOrigin::Ineq(j) => mult.ineq[j] = nu,
            RowOrigin::Lower(i) => mult.lower[i] = nu,
            RowOrigin::Upper(i) => mult.upper[i] = nu,
            RowOrigin::Aux => {}
        }
    }
    if let Some(eq) = &red.map.eq {
        let mut r = sp.objective.gradient(&z);
        for (c, l) in sp.qcs.iter().zip(&lambda_qc) {
            for (ri, g) in r.iter_mut().zip(c.gradient(&z)) {
                *ri += l * g;
            }
        }
        for (ri, a) in r.iter_mut().zip(sp.lin_ineq.a.tr_mul_vec(&mult.ineq)) {
            *ri += a;
        }
        for i in 0..sp.dim_total {
            r[i] += mult.upper[i] - mult.lower[i];
        }
        let eta = red.map.equality_multipliers(&r);
        let p_user = sp.lin_eq.len();
        mult.eq.copy_from_slice(&eta[..p_user]);
        for (k, &i) in eq.fixed.iter().enumerate() {
            let v = eta[p_user + k];
            if v >= 0.0 {
                mult.upper[i] += v;
            } else {
                mult.lower[i] -= v;
            }
        }
    }
    let mut sol = InnerSolution {
        z,
        lambda_qc,
        mult_lin: mult,
        status,
        kkt_residual: f64::INFINITY,
        iterations,
        central_path,
        infeasibility: None,
    };
    sol.kkt_residual = inner_kkt_residual(sp, &sol);
    sol
}

fn failed_solution(
    sp: &ConvexSubproblem,
    z: Vec<f64>,
    status: InnerStatus,
    infeasibility: Option<f64>,
    iterations: usize,
) -> InnerSolution {
    InnerSolution {
        z,
        lambda_qc: vec![0.0; sp.qcs.len()],
        mult_lin: LinearMultipliers::zeros(sp),
        status,
        kkt_residual: f64::INFINITY,
        iterations,
        central_path: Vec::new(),
        infeasibility,
    }
}

/// Re-estimates the multipliers of nearly active constraints by least
/// squares on the reduced stationarity condition.
///
/// `1/(t·(−cᵢ))` loses digits once `cᵢ` is close to roundoff, while the
/// primal point is still accurate. A constraint counts as nearly active when
/// its barrier multiplier exceeds its slack. The refined values replace the
/// barrier ones only if they are nonnegative and shrink the residual.
fn refine_multipliers(red: &Reduced, y: &[f64], lambda: &mut [f64], nu: &mut [f64]) {
    let n = red.n;
    let mut grads: Vec<Vec<f64>> = Vec::new();
    let mut slots: Vec<(bool, usize)> = Vec::new();
    let mut base = red.obj.gradient(y);
    for (i, c) in red.qcs.iter().enumerate() {
        let g = c.gradient(y);
        if lambda[i] > -c.value(y) {
            grads.push(g);
            slots.push((true, i));
        } else {
            for (b, v) in base.iter_mut().zip(&g) {
                *b += lambda[i] * v;
            }
        }
    }
    for (j, row) in red.rows.iter().enumerate() {
        let mut g = vec![0.0; n];
        for (&k, &a) in row.idx.iter().zip(&row.val) {
            g[k] += a;
        }
        if nu[j] > row.rhs - row.dot(y) {
            grads.push(g);
            slots.push((false, j));
        } else {
            for (b, v) in base.iter_mut().zip(&g) {
                *b += nu[j] * v;
            }
        }
    }
    let k = grads.len();
    if k == 0 {
        return;
    }
    let residual = |mults: &[f64]| {
        let mut r = base.clone();
        for (g, m) in grads.iter().zip(mults) {
            for (ri, gi) in r.iter_mut().zip(g) {
                *ri += m * gi;
            }
        }
        math::norm_inf(&r)
    };
    let current: Vec<f64> = slots
        .iter()
        .map(|&(qc, i)| if qc { lambda[i] } else { nu[i] })
        .collect();
    let mut gram = Matrix::zeros(k, k);
    let mut rhs = vec![0.0; k];
    let mut scale: f64 = 0.0;
    for a in 0..k {
        for b in 0..=a {
            gram[(a, b)] = math::dot(&grads[a], &grads[b]);
        }
        scale = scale.max(gram[(a, a)]);
        rhs[a] = -math::dot(&grads[a], &base);
    }
    for a in 0..k {
        gram[(a, a)] += 1e-14 * (1.0 + scale);
    }
    let Some(refined) = nonnegative_least_squares(&gram, &rhs, 1e-13 * (1.0 + scale)) else {
        return;
    };
    if refined.iter().any(|&m| !(m >= 0.0)) || residual(&refined) >= residual(&current) {
        return;
    }
    for (&(qc, i), m) in slots.iter().zip(refined) {
        if qc {
            lambda[i] = m;
        } else {
            nu[i] = m;
        }
    }
}

/// Lawson-Hanson active set method for `min ½mᵀGm − rᵀm` subject to
/// `m ≥ 0`, with `G` given by its lower triangle.
fn nonnegative_least_squares(gram: &Matrix, rhs: &[f64], tol: f64) -> Option<Vec<f64>> {
    let k = rhs.len();
    let g = |a: usize, b: usize| if a >= b { gram[(a, b)] } else { gram[(b, a)] };
    let mut m = vec![0.0; k];
    let mut passive = vec![false; k];
    for _ in 0..3 * k + 10 {
        let w: Vec<f64> = (0..k)
            .map(|a| rhs[a] - (0..k).map(|b| g(a, b) * m[b]).sum::<f64>())
            .collect();
        let Some(enter) = (0..k)
            .filter(|&a| !passive[a] && w[a] > tol)
            .max_by(|&a, &b| w[a].total_cmp(&w[b]))
        else {
            return Some(m);
        };
        passive[enter] = true;
        loop {
            let idx: Vec<usize> = (0..k).filter(|&a| passive[a]).collect();
            let mut sub = Matrix::zeros(idx.len(), idx.len());
            for (i, &a) in idx.iter().enumerate() {
                for (j, &b) in idx.iter().enumerate().take(i + 1) {
                    sub[(i, j)] = g(a, b);
                }
            }
            let sol =
                Cholesky::factor(&sub)?.solve(&idx.iter().map(|&a| rhs[a]).collect::<Vec<_>>());
            if sol.iter().all(|&v| v > 0.0) {
                for (&a, v) in idx.iter().zip(sol) {
                    m[a] = v;
                }
                break;
            }
            let mut alpha = 1.0f64;
            for (&a, &v) in idx.iter().zip(&sol) {
                if v <= 0.0 {
                    alpha = alpha.min(m[a] / (m[a] - v));
                }
            }
            for (&a, &v) in idx.iter().zip(&sol) {
                m[a] += alpha * (v - m[a]);
                if m[a] <= 0.0 || (v <= 0.0 && m[a] <= tol) {
                    m[a] = 0.0;
                    passive[a] = false;
                }
            }
            if idx.iter().all(|&a| passive[a]) {
                // no coordinate left the set; avoid cycling
                return Some(m);
            }
        }
    }
    Some(m)
}

fn max_violation(red: &Reduced, y: &[f64]) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for c in &red.qcs {
        worst = worst.max(c.value(y));
    }
    for r in &red.rows {
        worst = worst.max(r.dot(y) - r.rhs);
    }
    worst
}

fn strictly_feasible(red: &Reduced, y: &[f64]) -> bool {
    red.qcs.iter().all(|c| c.value(y) < 0.0) && red.rows.iter().all(|r| r.rhs - r.dot(y) > 0.0)
}

/// Solves `H Δ = −g` by Cholesky, adding a diagonal shift proportional to
/// the largest diagonal entry when the factorization fails.
fn solve_regularized(h: &mut Matrix, grad: &[f64]) -> Option<Vec<f64>> {
    let n = grad.len();
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    if let Some(ch) = Cholesky::factor(h) {
        return Some(ch.solve(&rhs));
    }
    let diag_scale = (0..n).fold(1.0f64, |m, i| m.max(h[(i, i)].abs()));
    let mut shift = REG_BASE * diag_scale;
    let mut applied = 0.0;
    for _ in 0..=REG_RETRIES {
        for i in 0..n {
            h[(i, i)] += shift - applied;
        }
        applied = shift;
        if let Some(ch) = Cholesky::factor(h) {
            return Some(ch.solve(&rhs));
        }
        shift *= REG_GROWTH;
    }
    None
}
