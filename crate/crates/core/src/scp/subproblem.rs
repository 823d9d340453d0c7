use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::inner::{ConvexSubproblem, LinearRows};
use crate::model::{ConvexQuadratic, DCProgram};
use crate::{Error, Result};

/// Tolerance on `Omega` membership of the linearization point for the
/// feasible-path subproblems.
pub(crate) const OMEGA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Variant {
    Plain,
    /// Adds `(ρ/2)‖x − x^k‖²` to the objective.
    Regularized {
        rho: f64,
    },
    /// Appends slacks `s ≥ 0` to the linearized constraints and `μΣs` to the
    /// objective.
    Relaxed {
        mu: f64,
    },
    RelaxedRegularized {
        mu: f64,
        rho: f64,
    },
}

impl Variant {
    pub fn mu(self) -> Option<f64> {
        match self {
            Variant::Relaxed { mu } | Variant::RelaxedRegularized { mu, .. } => Some(mu),
            _ => None,
        }
    }

    pub fn rho(self) -> f64 {
        match self {
            Variant::Regularized { rho } | Variant::RelaxedRegularized { rho, .. } => rho,
            _ => 0.0,
        }
    }
}

fn check_point(p: &DCProgram, xk: &[f64]) -> Result<()> {
    if xk.len() != p.dim {
        return Err(Error::DimensionMismatch {
            what: "linearization point",
            expected: p.dim,
            found: xk.len(),
        });
    }
    if !xk.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("linearization point"));
    }
    Ok(())
}

/// `Omega` rows padded with `extra` trailing columns.
fn omega_rows(p: &DCProgram, extra: usize) -> (LinearRows, LinearRows) {
    (
        LinearRows {
            a: p.omega.a.pad_cols(extra),
            b: p.omega.b.clone(),
        },
        LinearRows {
            a: p.omega.e.pad_cols(extra),
            b: p.omega.d.clone(),
        },
    )
}

/// Objective `f₁ − [f₂(x^k) + ∇f₂(x^k)ᵀ(x − x^k)]` (the bracket only with
/// `dc_objective`) plus the proximal term of `variant`, over `n` variables.
fn linearized_objective(
    p: &DCProgram,
    xk: &[f64],
    rho: f64,
    dc_objective: bool,
) -> ConvexQuadratic {
    let n = p.dim;
    let mut obj = p.objective.u.clone();
    if dc_objective {
        let (a, c) = p.objective.v.tangent(xk);
        obj = obj.minus_affine(&a, c);
    }
    if rho > 0.0 {
        let lin: Vec<f64> = xk.iter().map(|v| -rho * v).collect();
        let c = 0.5 * rho * xk.iter().map(|v| v * v).sum::<f64>();
        obj = obj.plus(&ConvexQuadratic::scaled_norm(n, rho, lin, c));
    }
    obj
}

/// Convex subproblem at `xk`: each `uᵢ − vᵢ ≤ 0` becomes
/// `uᵢ(x) − [vᵢ(x^k) + ∇vᵢ(x^k)ᵀ(x − x^k)] ≤ 0` (`≤ sᵢ` when relaxed).
/// Constants are kept, so objective values compare across iterations.
pub fn build_scp_subproblem(
    p: &DCProgram,
    xk: &[f64],
    variant: Variant,
    dc_objective: bool,
) -> Result<ConvexSubproblem> {
    check_point(p, xk)?;
    if !dc_objective && p.has_dc_objective() {
        return Err(Error::InvalidArgument(
            "program has a concave objective part; build with dc_objective".into(),
        ));
    }
    let n = p.dim;
    let m = p.num_constraints();
    let mu = variant.mu();
    if mu.is_none() {
        let viol = p.omega.violation(xk);
        if viol > OMEGA_TOL {
            return Err(Error::PointOutsideOmega { violation: viol });
        }
    }
    if let Some(mu) = mu {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "penalty parameter must be positive, got {mu}"
            )));
        }
    }
    let extra = if mu.is_some() { m } else { 0 };
    let dim_total = n + extra;

    let mut objective =
        linearized_objective(p, xk, variant.rho(), dc_objective).embed(dim_total, 0);
    if let Some(mu) = mu {
        for i in 0..m {
            objective.linear[n + i] = mu;
        }
    }

    let mut qcs = Vec::with_capacity(m);
    for (i, g) in p.constraints.iter().enumerate() {
        let (mut a, c) = g.v.tangent(xk);
        a.resize(dim_total, 0.0);
        if mu.is_some() {
            a[n + i] = 1.0;
        }
        qcs.push(g.u.embed(dim_total, 0).minus_affine(&a, c));
    }

    let mut lb = p.omega.lb.clone();
    let mut ub = p.omega.ub.clone();
    lb.resize(dim_total, 0.0);
    ub.resize(dim_total, f64::INFINITY);
    let (lin_ineq, lin_eq) = omega_rows(p, extra);
    Ok(ConvexSubproblem {
        dim_total,
        objective,
        qcs,
        lin_ineq,
        lin_eq,
        lb,
        ub,
        slack_range: n..n + extra,
        constraint_origin: (0..m).collect(),
    })
}

/// DCA subproblem for `φ = f + μΣ[gᵢ]₊` with `u_μ = f + μΣmax{uᵢ, vᵢ}` and
/// `v_μ = μΣvᵢ`, over `(x, t)`:
///
/// ```text
/// min  f(x) + μΣtᵢ − μΣ∇vᵢ(x^k)ᵀx
/// s.t. uᵢ(x) ≤ tᵢ,  vᵢ(x) ≤ tᵢ,  x ∈ Omega
/// ```
///
/// The concave objective part, if any, is linearized as well. `qcs[2i]` is
/// `uᵢ ≤ tᵢ` and `qcs[2i+1]` is `vᵢ ≤ tᵢ`.
pub fn build_dca_subproblem(p: &DCProgram, xk: &[f64], mu: f64) -> Result<ConvexSubproblem> {
    check_point(p, xk)?;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "penalty parameter must be positive, got {mu}"
        )));
    }
    let n = p.dim;
    let m = p.num_constraints();
    let dim_total = n + m;
    let mut objective = linearized_objective(p, xk, 0.0, p.has_dc_objective());
    for g in &p.constraints {
        let grad = g.v.gradient(xk);
        let scaled: Vec<f64> = grad.iter().map(|v| mu * v).collect();
        objective = objective.minus_affine(&scaled, 0.0);
    }
    let mut objective = objective.embed(dim_total, 0);
    for i in 0..m {
        objective.linear[n + i] = mu;
    }

    let mut qcs = Vec::with_capacity(2 * m);
    let mut origin = Vec::with_capacity(2 * m);
    for (i, g) in p.constraints.iter().enumerate() {
        let mut a = vec![0.0; dim_total];
        a[n + i] = 1.0;
        qcs.push(g.u.embed(dim_total, 0).minus_affine(&a, 0.0));
        qcs.push(g.v.embed(dim_total, 0).minus_affine(&a, 0.0));
        origin.push(i);
        origin.push(i);
    }
    let mut lb = p.omega.lb.clone();
    let mut ub = p.omega.ub.clone();
    lb.resize(dim_total, f64::NEG_INFINITY);
    ub.resize(dim_total, f64::INFINITY);
    let (lin_ineq, lin_eq) = omega_rows(p, m);
    Ok(ConvexSubproblem {
        dim_total,
        objective,
        qcs,
        lin_ineq,
        lin_eq,
        lb,
        ub,
        slack_range: 0..0,
        constraint_origin: origin,
    })
}
