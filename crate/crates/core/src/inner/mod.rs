//! Convex QCQP subproblems and the primal log-barrier solver used for them.
//!
//! A [`ConvexSubproblem`] is
//!
//! ```text
//! minimize    f₀(z)
//! subject to  cᵢ(z) ≤ 0          (convex quadratics)
//!             A z ≤ b,  E z = d,  lb ≤ z ≤ ub
//! ```
//!
//! Equalities (including box coordinates with `lb = ub`) are eliminated onto
//! an orthonormal null-space basis computed by the Jacobi solver. The
//! remaining inequality-only problem is solved by Newton's method on
//! `t f₀ − Σ ln(−cᵢ) − Σ ln(b − aᵀy)` with `t ← 10 t`, starting from a
//! strictly feasible point produced by a phase-1 problem.

mod barrier;
mod reduce;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::linalg::Matrix;
use crate::math;
use crate::model::ConvexQuadratic;
use crate::{Error, Result};

pub use barrier::BarrierSolver;

/// Rows `A z ≤ b` or `E z = d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRows {
    pub a: Matrix,
    pub b: Vec<f64>,
}

impl LinearRows {
    pub fn empty(n: usize) -> Self {
        LinearRows {
            a: Matrix::zeros(0, n),
            b: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSubproblem {
    /// Number of variables, original coordinates plus any appended slacks.
    pub dim_total: usize,
    pub objective: ConvexQuadratic,
    /// Each entry encodes `cᵢ(z) ≤ 0`.
    pub qcs: Vec<ConvexQuadratic>,
    pub lin_ineq: LinearRows,
    pub lin_eq: LinearRows,
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    /// Coordinates holding slack variables (empty when there are none).
    pub slack_range: Range<usize>,
    /// `constraint_origin[i]` is the index of the DC constraint that produced
    /// `qcs[i]`.
    pub constraint_origin: Vec<usize>,
}

impl ConvexSubproblem {
    /// Subproblem with only a box.
    pub fn boxed(objective: ConvexQuadratic, lb: Vec<f64>, ub: Vec<f64>) -> Self {
        let n = objective.dim();
        ConvexSubproblem {
            dim_total: n,
            objective,
            qcs: Vec::new(),
            lin_ineq: LinearRows::empty(n),
            lin_eq: LinearRows::empty(n),
            lb,
            ub,
            slack_range: 0..0,
            constraint_origin: Vec::new(),
        }
    }

    pub fn with_qc(mut self, c: ConvexQuadratic) -> Self {
        self.constraint_origin.push(self.qcs.len());
        self.qcs.push(c);
        self
    }

    pub fn with_ineq(mut self, a: Matrix, b: Vec<f64>) -> Self {
        self.lin_ineq = LinearRows { a, b };
        self
    }

    pub fn with_eq(mut self, e: Matrix, d: Vec<f64>) -> Self {
        self.lin_eq = LinearRows { a: e, b: d };
        self
    }

    /// Checks dimensions, finiteness and the PSD requirement on every block
    /// (using the cached eigenvalue of each quadratic).
    pub fn validate(&self) -> Result<()> {
        let n = self.dim_total;
        let dim = |what, found| {
            if found != n {
                Err(Error::DimensionMismatch {
                    what,
                    expected: n,
                    found,
                })
            } else {
                Ok(())
            }
        };
        dim("subproblem objective", self.objective.dim())?;
        for c in &self.qcs {
            dim("subproblem constraint", c.dim())?;
        }
        dim("subproblem lb", self.lb.len())?;
        dim("subproblem ub", self.ub.len())?;
        dim("subproblem A", self.lin_ineq.a.cols())?;
        dim("subproblem E", self.lin_eq.a.cols())?;
        if self.lin_ineq.a.rows() != self.lin_ineq.b.len()
            || self.lin_eq.a.rows() != self.lin_eq.b.len()
        {
            return Err(Error::InvalidArgument(
                "linear rows and right-hand side differ in length".into(),
            ));
        }
        if self.constraint_origin.len() != self.qcs.len() {
            return Err(Error::InvalidArgument(
                "constraint_origin must have one entry per qc".into(),
            ));
        }
        if self.slack_range.end > n {
            return Err(Error::InvalidArgument(
                "slack range exceeds dim_total".into(),
            ));
        }
        for q in core::iter::once(&self.objective).chain(&self.qcs) {
            let tol = crate::model::default_psd_tol(&q.hessian);
            if q.min_eig() < -tol {
                return Err(Error::InvalidArgument(format!(
                    "subproblem block is not PSD (min eigenvalue {:e})",
                    q.min_eig()
                )));
            }
            if !q.hessian.is_finite()
                || !q.linear.iter().all(|x| x.is_finite())
                || !q.constant.is_finite()
            {
                return Err(Error::NonFinite("subproblem quadratic"));
            }
        }
        for i in 0..n {
            if self.lb[i].is_nan() || self.ub[i].is_nan() {
                return Err(Error::NonFinite("subproblem bounds"));
            }
            if self.lb[i] > self.ub[i] {
                return Err(Error::InvalidArgument(format!(
                    "empty box at coordinate {i}"
                )));
            }
        }
        if !self.lin_ineq.a.is_finite()
            || !self.lin_eq.a.is_finite()
            || !self
                .lin_ineq
                .b
                .iter()
                .chain(&self.lin_eq.b)
                .all(|x| x.is_finite())
        {
            return Err(Error::NonFinite("subproblem linear rows"));
        }
        Ok(())
    }

    pub fn objective_value(&self, z: &[f64]) -> f64 {
        self.objective.value(z)
    }

    /// Largest violation over all constraint rows.
    pub fn primal_violation(&self, z: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.qcs {
            worst = worst.max(c.value(z));
        }
        for (ax, b) in self.lin_ineq.a.mul_vec(z).iter().zip(&self.lin_ineq.b) {
            worst = worst.max(ax - b);
        }
        for (ex, d) in self.lin_eq.a.mul_vec(z).iter().zip(&self.lin_eq.b) {
            worst = worst.max((ex - d).abs());
        }
        for i in 0..self.dim_total {
            worst = worst.max(self.lb[i] - z[i]).max(z[i] - self.ub[i]);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InnerStatus {
    Optimal,
    MaxIter,
    Infeasible,
    NumericalFailure,
}

impl InnerStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            InnerStatus::Optimal => "Optimal",
            InnerStatus::MaxIter => "MaxIter",
            InnerStatus::Infeasible => "Infeasible",
            InnerStatus::NumericalFailure => "NumericalFailure",
        }
    }
}

/// Multipliers of the linear rows and of the box.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearMultipliers {
    pub ineq: Vec<f64>,
    pub eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LinearMultipliers {
    pub fn zeros(sp: &ConvexSubproblem) -> Self {
        LinearMultipliers {
            ineq: vec![0.0; sp.lin_ineq.len()],
            eq: vec![0.0; sp.lin_eq.len()],
            lower: vec![0.0; sp.dim_total],
            upper: vec![0.0; sp.dim_total],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerSolution {
    pub z: Vec<f64>,
    pub lambda_qc: Vec<f64>,
    pub mult_lin: LinearMultipliers,
    pub status: InnerStatus,
    pub kkt_residual: f64,
    /// Newton iterations, phase 1 included.
    pub iterations: usize,
    /// Objective after each centering step, one entry per barrier level.
    pub central_path: Vec<f64>,
    /// Phase-1 optimum when the subproblem was declared infeasible.
    pub infeasibility: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerOptions {
    pub tol: f64,
    pub max_newton: usize,
}

impl Default for InnerOptions {
    fn default() -> Self {
        InnerOptions {
            tol: 1e-8,
            max_newton: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phase1Outcome {
    Point(Vec<f64>),
    /// No strictly feasible point; `residual` is the smallest achievable
    /// uniform constraint slack (≥ 0).
    Infeasible {
        residual: f64,
    },
}

/// Solves `sp` with a fresh [`BarrierSolver`].
pub fn solve_subproblem(
    sp: &ConvexSubproblem,
    warm_start: Option<&[f64]>,
    inner_tol: f64,
    max_newton: usize,
) -> Result<InnerSolution> {
    BarrierSolver::new(InnerOptions {
        tol: inner_tol,
        max_newton,
    })
    .solve(sp, warm_start)
}

/// Finds a point strictly inside the box and the quadratic constraints that
/// satisfies the linear rows, or reports infeasibility.
pub fn phase1_point(sp: &ConvexSubproblem, inner_tol: f64) -> Result<Phase1Outcome> {
    BarrierSolver::new(InnerOptions {
        tol: inner_tol,
        ..InnerOptions::default()
    })
    .phase1(sp, None)
}

/// Max of the scaled stationarity residual, primal violation,
/// complementarity violation and multiplier negativity.
///
/// Stationarity is divided by `1 + ` the largest term of the gradient sum so
/// that badly scaled data are judged relative to their own magnitude; the
/// other parts are absolute. Computed from `sp` and `sol` only.
pub fn inner_kkt_residual(sp: &ConvexSubproblem, sol: &InnerSolution) -> f64 {
    let n = sp.dim_total;
    let z = &sol.z;
    let m = &sol.mult_lin;
    if z.len() != n
        || sol.lambda_qc.len() != sp.qcs.len()
        || m.ineq.len() != sp.lin_ineq.len()
        || m.eq.len() != sp.lin_eq.len()
        || m.lower.len() != n
        || m.upper.len() != n
    {
        return f64::INFINITY;
    }

    let g0 = sp.objective.gradient(z);
    let mut scale = math::norm_inf(&g0);
    let mut grad = g0;
    for (c, &l) in sp.qcs.iter().zip(&sol.lambda_qc) {
        let gc = c.gradient(z);
        scale = scale.max(l.abs() * math::norm_inf(&gc));
        for (g, v) in grad.iter_mut().zip(&gc) {
            *g += l * v;
        }
    }
    for (terms, mult) in [(&sp.lin_ineq, &m.ineq), (&sp.lin_eq, &m.eq)] {
        let t = terms.a.tr_mul_vec(mult);
        scale = scale.max(math::norm_inf(&t));
        for (g, v) in grad.iter_mut().zip(&t) {
            *g += v;
        }
    }
    scale = scale
        .max(math::norm_inf(&m.lower))
        .max(math::norm_inf(&m.upper));
    for i in 0..n {
        grad[i] += m.upper[i] - m.lower[i];
    }
    let stationarity = math::norm_inf(&grad) / (1.0 + scale);

    let primal = sp.primal_violation(z).max(0.0);

    let mut comp: f64 = 0.0;
    let mut neg: f64 = 0.0;
    for (c, &l) in sp.qcs.iter().zip(&sol.lambda_qc) {
        comp = comp.max((l * c.value(z)).abs());
        neg = neg.max(-l);
    }
    for ((ax, b), &nu) in sp
        .lin_ineq
        .a
        .mul_vec(z)
        .iter()
        .zip(&sp.lin_ineq.b)
        .zip(&m.ineq)
    {
        comp = comp.max((nu * (ax - b)).abs());
        neg = neg.max(-nu);
    }
    for i in 0..n {
        for (bound, mult, gap) in [
            (sp.lb[i], m.lower[i], z[i] - sp.lb[i]),
            (sp.ub[i], m.upper[i], sp.ub[i] - z[i]),
        ] {
            neg = neg.max(-mult);
            if bound.is_finite() {
                comp = comp.max((mult * gap).abs());
            } else {
                comp = comp.max(mult.abs());
            }
        }
    }
    stationarity.max(primal).max(comp).max(neg)
}

#[cfg(test)]
mod tests;
