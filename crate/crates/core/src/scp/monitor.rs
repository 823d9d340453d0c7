use crate::math;
use crate::model::DCProgram;

use super::{Algorithm, IterationRecord};

/// Two sides of the sufficient-decrease inequality for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescentCheck {
    pub ok: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; the step passes when this is at least `−tol`.
    pub margin: f64,
    pub tol: f64,
}

/// Sufficient decrease between consecutive records.
///
/// For the feasible-path and relaxed methods
///
/// ```text
/// f_μ(x^k) − f_μ(x^{k+1}) ≥ ½(ρ^f + ρ_reg + Σρ^{uᵢ}λᵢ)‖x^{k+1} − x^k‖²
///                          + ½Σρ^{vᵢ}λᵢ‖x^k − x^{k−1}‖²
/// ```
///
/// with `λ = λ^{k+1}`, `f_μ = f + μΣs` (plain `f` without slacks), `μ` the
/// value used for the current step, and `ρ^f = ρ(f₁) + ρ(f₂)`. For DCA the
/// left side is the decrease of `φ(·; μ)` and the right side is
/// `½(ρ^f + μΣmin(ρ^{uᵢ}, ρ^{vᵢ}) + μΣρ^{vᵢ})‖x^{k+1} − x^k‖²`.
///
/// The tolerance is `10⁻⁶(1 + |f(x^k)|)`.
pub fn check_descent(
    prev: &IterationRecord,
    curr: &IterationRecord,
    p: &DCProgram,
) -> DescentCheck {
    let rho_f = p.objective.u.rho() + p.objective.v.rho();
    let d2 = curr.step_norm * curr.step_norm;
    let mu = curr.mu_used;
    let (lhs, rhs) = match curr.algorithm {
        Algorithm::Dca => {
            let lhs = p.l1_penalty(&prev.x, mu) - p.l1_penalty(&curr.x, mu);
            let mut coeff = rho_f;
            for g in &p.constraints {
                coeff += mu * (g.u.rho().min(g.v.rho()) + g.v.rho());
            }
            (lhs, 0.5 * coeff * d2)
        }
        Algorithm::Scp | Algorithm::Rscp => {
            let s_prev: f64 = prev.s.iter().sum();
            let s_curr: f64 = curr.s.iter().sum();
            let lhs = (prev.f_val + mu * s_prev) - (curr.f_val + mu * s_curr);
            let prev_d2 = prev.step_norm * prev.step_norm;
            let mut first = rho_f + curr.rho_used;
            let mut second = 0.0;
            for (g, &l) in p.constraints.iter().zip(&curr.lambda) {
                first += g.u.rho() * l;
                second += g.v.rho() * l;
            }
            (lhs, 0.5 * first * d2 + 0.5 * second * prev_d2)
        }
    };
    let tol = 1e-6 * (1.0 + prev.f_val.abs());
    let margin = lhs - rhs;
    DescentCheck {
        ok: margin >= -tol,
        lhs,
        rhs,
        margin,
        tol,
    }
}

/// Feasible-path check for the iterate in `curr`:
/// `gᵢ(x^{k+1}) ≤ −(ρ^{vᵢ}/2)‖x^{k+1} − x^k‖² + 10·inner_tol` for every `i`.
pub fn check_feasible_path(curr: &IterationRecord, p: &DCProgram, inner_tol: f64) -> bool {
    let d2 = curr.step_norm * curr.step_norm;
    p.constraints
        .iter()
        .all(|g| g.value(&curr.x) <= -0.5 * g.v.rho() * d2 + 10.0 * inner_tol)
}

pub(crate) fn step_norm(a: &[f64], b: &[f64]) -> f64 {
    math::dist2(a, b)
}
