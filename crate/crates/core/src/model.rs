//! Problem representation: convex quadratics, DC pairs, the convex set
//! `Omega`, whole programs, validation and DC-decomposition utilities.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::eigen::{min_eigenvalue, SymmetricEigen};
use crate::linalg::{Matrix, SymMatrix};
use crate::math;
use crate::{Error, Result};

/// `½ xᵀ Q x + qᵀ x + r` with `Q` positive semidefinite.
///
/// `min_eig` caches `λ_min(Q)` and `rho = max(λ_min(Q), 0)` is the strong
/// convexity parameter. A quadratic built from non-PSD data is still
/// representable so that [`validate_program`] can name the offender.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexQuadratic {
    pub hessian: SymMatrix,
    pub linear: Vec<f64>,
    pub constant: f64,
    min_eig: f64,
}

impl ConvexQuadratic {
    /// Builds the quadratic and computes `λ_min(Q)` with the Jacobi solver.
    pub fn new(hessian: SymMatrix, linear: Vec<f64>, constant: f64) -> Result<Self> {
        check_len("linear term", hessian.dim(), linear.len())?;
        if !hessian.is_finite() || !linear.iter().all(|x| x.is_finite()) || !constant.is_finite() {
            return Err(Error::NonFinite("quadratic data"));
        }
        let min_eig = min_eigenvalue(&hessian)?;
        Ok(ConvexQuadratic {
            hessian,
            linear,
            constant,
            min_eig,
        })
    }

    /// Builds the quadratic with a caller-supplied `λ_min(Q)`; used when the
    /// value follows from construction (sums with multiples of `I`, zero
    /// padding) and a fresh eigensolve would be wasted.
    pub(crate) fn with_min_eig(
        hessian: SymMatrix,
        linear: Vec<f64>,
        constant: f64,
        min_eig: f64,
    ) -> Self {
        debug_assert_eq!(hessian.dim(), linear.len());
        ConvexQuadratic {
            hessian,
            linear,
            constant,
            min_eig,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::with_min_eig(SymMatrix::zeros(dim), vec![0.0; dim], 0.0, 0.0)
    }

    pub fn affine(linear: Vec<f64>, constant: f64) -> Self {
        let n = linear.len();
        Self::with_min_eig(SymMatrix::zeros(n), linear, constant, 0.0)
    }

    pub fn constant(dim: usize, r: f64) -> Self {
        Self::with_min_eig(SymMatrix::zeros(dim), vec![0.0; dim], r, 0.0)
    }

    /// `(α/2)‖x‖² + qᵀx + r`
    pub fn scaled_norm(dim: usize, alpha: f64, linear: Vec<f64>, constant: f64) -> Self {
        Self::with_min_eig(
            SymMatrix::scaled_identity(dim, alpha),
            linear,
            constant,
            alpha,
        )
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.linear.len()
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    /// Strong convexity parameter `max(λ_min(Q), 0)`.
    pub fn rho(&self) -> f64 {
        self.min_eig.max(0.0)
    }

    pub fn is_affine(&self) -> bool {
        self.hessian.is_zero()
    }

    /// Value without dimension checks; see [`eval_quadratic`].
    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.hessian.quad_form(x) + math::dot(&self.linear, x) + self.constant
    }

    /// Gradient `Qx + q` without dimension checks; see [`grad_quadratic`].
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.hessian.mul_vec(x);
        for (gi, qi) in g.iter_mut().zip(&self.linear) {
            *gi += qi;
        }
        g
    }

    /// `self + other`; the cached eigenvalue becomes a valid lower bound.
    pub fn plus(&self, other: &ConvexQuadratic) -> ConvexQuadratic {
        ConvexQuadratic::with_min_eig(
            self.hessian.add(&other.hessian),
            self.linear
                .iter()
                .zip(&other.linear)
                .map(|(a, b)| a + b)
                .collect(),
            self.constant + other.constant,
            self.min_eig + other.min_eig,
        )
    }

    /// `α · self` for `α ≥ 0`.
    pub fn scaled(&self, alpha: f64) -> ConvexQuadratic {
        debug_assert!(alpha >= 0.0);
        ConvexQuadratic::with_min_eig(
            self.hessian.scale(alpha),
            self.linear.iter().map(|a| alpha * a).collect(),
            alpha * self.constant,
            alpha * self.min_eig,
        )
    }

    /// Subtracts the affine function `aᵀx + c`.
    pub fn minus_affine(&self, a: &[f64], c: f64) -> ConvexQuadratic {
        ConvexQuadratic::with_min_eig(
            self.hessian.clone(),
            self.linear.iter().zip(a).map(|(q, ai)| q - ai).collect(),
            self.constant - c,
            self.min_eig,
        )
    }

    /// Re-expresses the quadratic over a larger variable vector of size
    /// `new_dim`, with the original variables at `offset..offset + dim`.
    pub fn embed(&self, new_dim: usize, offset: usize) -> ConvexQuadratic {
        let mut linear = vec![0.0; new_dim];
        linear[offset..offset + self.dim()].copy_from_slice(&self.linear);
        let min_eig = if new_dim > self.dim() {
            self.min_eig.min(0.0)
        } else {
            self.min_eig
        };
        ConvexQuadratic::with_min_eig(
            self.hessian.embed(new_dim, offset),
            linear,
            self.constant,
            min_eig,
        )
    }

    /// Affine minorant at `x0`: returns `(∇f(x0), f(x0) − ∇f(x0)ᵀx0)` so that
    /// the tangent plane is `aᵀx + c`.
    pub fn tangent(&self, x0: &[f64]) -> (Vec<f64>, f64) {
        let g = self.gradient(x0);
        let c = self.value(x0) - math::dot(&g, x0);
        (g, c)
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// `½xᵀQx + qᵀx + r`
pub fn eval_quadratic(f: &ConvexQuadratic, x: &[f64]) -> Result<f64> {
    check_len("evaluation point", f.dim(), x.len())?;
    Ok(f.value(x))
}

/// `Qx + q`, the unique subgradient of a quadratic.
pub fn grad_quadratic(f: &ConvexQuadratic, x: &[f64]) -> Result<Vec<f64>> {
    check_len("evaluation point", f.dim(), x.len())?;
    Ok(f.gradient(x))
}

/// Recomputes `max(λ_min(Q), 0)` with the Jacobi solver and refreshes the
/// cached value.
pub fn strong_convexity_param(f: &mut ConvexQuadratic) -> Result<f64> {
    f.min_eig = min_eigenvalue(&f.hessian)?;
    Ok(f.rho())
}

/// A DC function `g = u − v` with both parts convex.
#[derive(Debug, Clone, PartialEq)]
pub struct DCPair {
    pub u: ConvexQuadratic,
    pub v: ConvexQuadratic,
}

impl DCPair {
    pub fn new(u: ConvexQuadratic, v: ConvexQuadratic) -> Result<Self> {
        check_len("DC pair", u.dim(), v.dim())?;
        Ok(DCPair { u, v })
    }

    /// `g` convex: `v = 0`.
    pub fn convex(u: ConvexQuadratic) -> Self {
        let n = u.dim();
        DCPair {
            u,
            v: ConvexQuadratic::zero(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.u.value(x) - self.v.value(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = self.u.gradient(x);
        for (gi, vi) in g.iter_mut().zip(self.v.gradient(x)) {
            *gi -= vi;
        }
        g
    }

    /// The assembled (generally indefinite) quadratic
    /// `(Qᵤ − Qᵥ, qᵤ − qᵥ, rᵤ − rᵥ)`.
    pub fn assembled(&self) -> (SymMatrix, Vec<f64>, f64) {
        (
            self.u.hessian.sub(&self.v.hessian),
            self.u
                .linear
                .iter()
                .zip(&self.v.linear)
                .map(|(a, b)| a - b)
                .collect(),
            self.u.constant - self.v.constant,
        )
    }
}

/// `(u + ρ/2‖·‖², v + ρ/2‖·‖²)`: same difference, both parts now strongly
/// convex with parameter at least `rho`.
pub fn shift_dc_pair(g: &DCPair, rho: f64) -> Result<DCPair> {
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "shift parameter must be positive, got {rho}"
        )));
    }
    let n = g.dim();
    let bump = ConvexQuadratic::scaled_norm(n, rho, vec![0.0; n], 0.0);
    DCPair::new(g.u.plus(&bump), g.v.plus(&bump))
}

/// Splits a symmetric matrix as `P = P₁ − P₂` with `P₁ = VΣ₊Vᵀ`,
/// `P₂ = VΣ₋Vᵀ` from its eigendecomposition.
pub fn spectral_dc_split(p: &SymMatrix) -> Result<(SymMatrix, SymMatrix)> {
    let eig = SymmetricEigen::new(p)?;
    let pos = eig.reassemble(|s| s.max(0.0));
    let neg = eig.reassemble(|s| (-s).max(0.0));
    Ok((pos, neg))
}

/// `Omega = { x : lb ≤ x ≤ ub, A x ≤ b, E x = d }`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexSetOmega {
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
    pub a: Matrix,
    pub b: Vec<f64>,
    pub e: Matrix,
    pub d: Vec<f64>,
}

impl ConvexSetOmega {
    /// Unbounded: all of `Rⁿ`.
    pub fn free(n: usize) -> Self {
        Self::boxed(vec![f64::NEG_INFINITY; n], vec![f64::INFINITY; n])
    }

    pub fn boxed(lb: Vec<f64>, ub: Vec<f64>) -> Self {
        let n = lb.len();
        ConvexSetOmega {
            lb,
            ub,
            a: Matrix::zeros(0, n),
            b: Vec::new(),
            e: Matrix::zeros(0, n),
            d: Vec::new(),
        }
    }

    pub fn with_inequalities(mut self, a: Matrix, b: Vec<f64>) -> Self {
        self.a = a;
        self.b = b;
        self
    }

    pub fn with_equalities(mut self, e: Matrix, d: Vec<f64>) -> Self {
        self.e = e;
        self.d = d;
        self
    }

    pub fn dim(&self) -> usize {
        self.lb.len()
    }

    /// Largest violation of any defining row at `x` (0 when inside).
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..x.len() {
            worst = worst.max(self.lb[i] - x[i]).max(x[i] - self.ub[i]);
        }
        for (ax, b) in self.a.mul_vec(x).iter().zip(&self.b) {
            worst = worst.max(ax - b);
        }
        for (ex, d) in self.e.mul_vec(x).iter().zip(&self.d) {
            worst = worst.max((ex - d).abs());
        }
        worst
    }

    /// Box midpoint; infinite sides are clamped (a one-sided bound gives
    /// that bound ± 1, a free coordinate gives 0).
    pub fn box_midpoint(&self) -> Vec<f64> {
        self.lb
            .iter()
            .zip(&self.ub)
            .map(|(&l, &u)| match (l.is_finite(), u.is_finite()) {
                (true, true) => 0.5 * (l + u),
                (true, false) => l + 1.0,
                (false, true) => u - 1.0,
                (false, false) => 0.0,
            })
            .collect()
    }
}

/// Problem `min f₁ − f₂  s.t.  uᵢ − vᵢ ≤ 0, x ∈ Omega`.
#[derive(Debug, Clone, PartialEq)]
pub struct DCProgram {
    pub dim: usize,
    pub objective: DCPair,
    pub constraints: Vec<DCPair>,
    pub omega: ConvexSetOmega,
    pub labels: Vec<String>,
}

impl DCProgram {
    pub fn new(objective: DCPair, constraints: Vec<DCPair>, omega: ConvexSetOmega) -> Self {
        let labels = (0..constraints.len())
            .map(|i| format!("g{}", i + 1))
            .collect();
        DCProgram {
            dim: objective.dim(),
            objective,
            constraints,
            omega,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// `f(x) = f₁(x) − f₂(x)`
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }

    pub fn constraint_values(&self, x: &[f64]) -> Vec<f64> {
        self.constraints.iter().map(|g| g.value(x)).collect()
    }

    /// `max(0, maxᵢ gᵢ(x))`
    pub fn feasgap(&self, x: &[f64]) -> f64 {
        self.constraints.iter().fold(0.0, |m, g| m.max(g.value(x)))
    }

    /// L1 penalty `f(x) + μ Σ max(gᵢ(x), 0)`.
    pub fn l1_penalty(&self, x: &[f64], mu: f64) -> f64 {
        self.objective_value(x)
            + mu * self
                .constraints
                .iter()
                .map(|g| g.value(x).max(0.0))
                .sum::<f64>()
    }

    /// True when the objective has a nonzero concave part `f₂`.
    pub fn has_dc_objective(&self) -> bool {
        let f2 = &self.objective.v;
        !(f2.hessian.is_zero() && f2.linear.iter().all(|&x| x == 0.0))
    }

    pub fn label(&self, i: usize) -> &str {
        self.labels.get(i).map(String::as_str).unwrap_or("")
    }
}

/// One named problem with a program.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    NotPsd {
        what: String,
        min_eig: f64,
        tol: f64,
    },
    EmptyBox {
        index: usize,
        lb: f64,
        ub: f64,
    },
    NonFinite {
        what: String,
    },
    EigenFailure {
        what: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::DimensionMismatch {
                what,
                expected,
                found,
            } => {
                write!(f, "{what}: dimension {found}, expected {expected}")
            }
            Diagnostic::NotPsd { what, min_eig, tol } => {
                write!(f, "{what}: not PSD (min eigenvalue {min_eig:e} < -{tol:e})")
            }
            Diagnostic::EmptyBox { index, lb, ub } => {
                write!(f, "empty box at coordinate {index}: lb = {lb} > ub = {ub}")
            }
            Diagnostic::NonFinite { what } => write!(f, "{what}: NaN or infinite entry"),
            Diagnostic::EigenFailure { what } => write!(f, "{what}: eigensolver failed"),
        }
    }
}

/// Default PSD tolerance `1e-9 · (1 + ‖Q‖_∞)` (max-abs entry norm).
pub fn default_psd_tol(q: &SymMatrix) -> f64 {
    1e-9 * (1.0 + q.max_abs())
}

/// Checks dimensions, finiteness, PSD-ness of every quadratic block and a
/// nonempty box. An empty list means the program is ready to solve.
///
/// `psd_tol = None` uses [`default_psd_tol`] per matrix.
pub fn validate_program(p: &DCProgram, psd_tol: Option<f64>) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = p.dim;
    let check_quad = |what: String, f: &ConvexQuadratic, out: &mut Vec<Diagnostic>| {
        if f.dim() != n || f.hessian.dim() != n {
            out.push(Diagnostic::DimensionMismatch {
                what,
                expected: n,
                found: f.dim(),
            });
            return;
        }
        if !f.hessian.is_finite()
            || !f.linear.iter().all(|x| x.is_finite())
            || !f.constant.is_finite()
        {
            out.push(Diagnostic::NonFinite { what });
            return;
        }
        let tol = psd_tol.unwrap_or_else(|| default_psd_tol(&f.hessian));
        match min_eigenvalue(&f.hessian) {
            Ok(l) if l < -tol => out.push(Diagnostic::NotPsd {
                what,
                min_eig: l,
                tol,
            }),
            Ok(_) => {}
            Err(_) => out.push(Diagnostic::EigenFailure { what }),
        }
    };
    check_quad("objective f1".into(), &p.objective.u, &mut out);
    check_quad("objective f2".into(), &p.objective.v, &mut out);
    for (i, g) in p.constraints.iter().enumerate() {
        let name = p.label(i);
        check_quad(format!("constraint {name} u"), &g.u, &mut out);
        check_quad(format!("constraint {name} v"), &g.v, &mut out);
    }

    let om = &p.omega;
    for (what, len) in [("omega lb", om.lb.len()), ("omega ub", om.ub.len())] {
        if len != n {
            out.push(Diagnostic::DimensionMismatch {
                what: what.into(),
                expected: n,
                found: len,
            });
        }
    }
    if om.lb.len() == n && om.ub.len() == n {
        for i in 0..n {
            let (l, u) = (om.lb[i], om.ub[i]);
            if l.is_nan() || u.is_nan() || l == f64::INFINITY || u == f64::NEG_INFINITY {
                out.push(Diagnostic::NonFinite {
                    what: format!("omega bound {i}"),
                });
            } else if l > u {
                out.push(Diagnostic::EmptyBox {
                    index: i,
                    lb: l,
                    ub: u,
                });
            }
        }
    }
    for (what, m, rhs) in [("omega A", &om.a, &om.b), ("omega E", &om.e, &om.d)] {
        if m.cols() != n {
            out.push(Diagnostic::DimensionMismatch {
                what: what.into(),
                expected: n,
                found: m.cols(),
            });
        }
        if m.rows() != rhs.len() {
            out.push(Diagnostic::DimensionMismatch {
                what: format!("{what} right-hand side"),
                expected: m.rows(),
                found: rhs.len(),
            });
        }
        if !m.is_finite() || !rhs.iter().all(|x| x.is_finite()) {
            out.push(Diagnostic::NonFinite { what: what.into() });
        }
    }
    out
}

/// Turns a non-empty diagnostic list into an error.
pub fn ensure_valid(p: &DCProgram) -> Result<()> {
    let diags = validate_program(p, None);
    if diags.is_empty() {
        return Ok(());
    }
    let msg = diags
        .iter()
        .map(|d| format!("{d}"))
        .collect::<Vec<_>>()
        .join("; ");
    Err(Error::InvalidProgram(msg))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(rows: &[[f64; 2]], q: [f64; 2], r: f64) -> ConvexQuadratic {
        ConvexQuadratic::new(SymMatrix::from_rows(rows).unwrap(), q.to_vec(), r).unwrap()
    }

    #[test]
    fn eval_examples() {
        let c = ConvexQuadratic::constant(3, 5.0);
        assert_eq!(eval_quadratic(&c, &[1.0, -7.0, 2.0]).unwrap(), 5.0);
        let half_norm = quad(&[[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0);
        assert_eq!(eval_quadratic(&half_norm, &[1.0, 1.0]).unwrap(), 1.0);
        // ½(2·1 + 4·4) + (1 − 2) + 0.5 = 8.5
        let f = quad(&[[2.0, 0.0], [0.0, 4.0]], [1.0, -1.0], 0.5);
        assert_eq!(eval_quadratic(&f, &[1.0, 2.0]).unwrap(), 8.5);
    }

    #[test]
    fn eval_rejects_wrong_length() {
        let f = ConvexQuadratic::zero(2);
        assert!(matches!(
            eval_quadratic(&f, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(grad_quadratic(&f, &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn grad_examples() {
        let id = quad(&[[1.0, 0.0], [0.0, 1.0]], [0.0, 0.0], 0.0);
        assert_eq!(grad_quadratic(&id, &[3.0, -1.0]).unwrap(), vec![3.0, -1.0]);
        let aff = ConvexQuadratic::affine(vec![2.5, -4.0], 1.0);
        assert_eq!(
            grad_quadratic(&aff, &[10.0, 11.0]).unwrap(),
            vec![2.5, -4.0]
        );
        let f = quad(&[[2.0, 1.0], [1.0, 2.0]], [0.0, 1.0], 0.0);
        assert_eq!(grad_quadratic(&f, &[1.0, 1.0]).unwrap(), vec![3.0, 4.0]);
    }

    #[test]
    fn strong_convexity_examples() {
        let mut id = ConvexQuadratic::new(SymMatrix::identity(4), vec![0.0; 4], 0.0).unwrap();
        assert!((strong_convexity_param(&mut id).unwrap() - 1.0).abs() < 1e-14);
        let mut d = quad(&[[2.0, 0.0], [0.0, 0.0]], [0.0, 0.0], 0.0);
        assert_eq!(strong_convexity_param(&mut d).unwrap(), 0.0);
        let mut f = quad(&[[2.0, 1.0], [1.0, 2.0]], [0.0, 0.0], 0.0);
        assert!((strong_convexity_param(&mut f).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_split_of_psd_matrix_is_trivial() {
        let p = SymMatrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]).unwrap();
        let (p1, p2) = spectral_dc_split(&p).unwrap();
        assert!(p1.sub(&p).max_abs() < 1e-14);
        assert!(p2.max_abs() < 1e-14);
    }

    #[test]
    fn spectral_split_of_swap_matrix() {
        let p = SymMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let (p1, p2) = spectral_dc_split(&p).unwrap();
        let e1 = SymMatrix::from_rows(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let e2 = SymMatrix::from_rows(&[[0.5, -0.5], [-0.5, 0.5]]).unwrap();
        assert!(p1.sub(&e1).max_abs() < 1e-14);
        assert!(p2.sub(&e2).max_abs() < 1e-14);
    }

    #[test]
    fn shift_of_zero_pair() {
        let g = DCPair::convex(ConvexQuadratic::zero(3));
        let s = shift_dc_pair(&g, 2.0).unwrap();
        let x = [1.0, 2.0, -1.0];
        // ‖x‖² = 6 for both parts
        assert!((s.u.value(&x) - 6.0).abs() < 1e-14);
        assert!((s.v.value(&x) - 6.0).abs() < 1e-14);
        assert_eq!(s.value(&x), 0.0);
    }

    #[test]
    fn shift_lifts_min_eigenvalue() {
        // u = x₁² − 4, v = x₂²
        let u = quad(&[[2.0, 0.0], [0.0, 0.0]], [0.0, 0.0], -4.0);
        let v = quad(&[[0.0, 0.0], [0.0, 2.0]], [0.0, 0.0], 0.0);
        let mut s = shift_dc_pair(&DCPair::new(u, v).unwrap(), 2.0).unwrap();
        // diag(2,0) + 2I = diag(4,2)
        assert!((strong_convexity_param(&mut s.u).unwrap() - 2.0).abs() < 1e-14);
        assert!((s.u.rho() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn shift_rejects_nonpositive_rho() {
        let g = DCPair::convex(ConvexQuadratic::zero(1));
        assert!(shift_dc_pair(&g, 0.0).is_err());
        assert!(shift_dc_pair(&g, -1.0).is_err());
    }

    fn small_program(u: ConvexQuadratic) -> DCProgram {
        DCProgram::new(
            DCPair::convex(ConvexQuadratic::affine(vec![-4.0, 1.0], 0.0)),
            vec![DCPair::new(u, quad(&[[0.0, 0.0], [0.0, 2.0]], [0.0, 0.0], 0.0)).unwrap()],
            ConvexSetOmega::boxed(vec![-3.0, -2.0], vec![3.0, 2.0]),
        )
    }

    #[test]
    fn validate_clean_program() {
        let p = small_program(quad(&[[2.0, 0.0], [0.0, 0.0]], [0.0, 0.0], -4.0));
        assert!(validate_program(&p, None).is_empty());
    }

    #[test]
    fn validate_flags_indefinite_block() {
        // λ_min = −0.5
        let p = small_program(quad(&[[2.0, 0.0], [0.0, -0.5]], [0.0, 0.0], -4.0));
        let d = validate_program(&p, None);
        assert_eq!(d.len(), 1);
        match &d[0] {
            Diagnostic::NotPsd { what, min_eig, .. } => {
                assert!(what.contains("g1"));
                assert!((min_eig + 0.5).abs() < 1e-12);
            }
            other => panic!("unexpected diagnostic {other:?}"),
        }
    }

    #[test]
    fn validate_flags_empty_box() {
        let p = DCProgram::new(
            DCPair::convex(ConvexQuadratic::zero(1)),
            Vec::new(),
            ConvexSetOmega::boxed(vec![1.0], vec![0.0]),
        );
        let d = validate_program(&p, None);
        assert_eq!(d.len(), 1);
        assert!(matches!(d[0], Diagnostic::EmptyBox { index: 0, .. }));
    }

    #[test]
    fn validate_flags_dimension_and_nan() {
        let mut p = small_program(quad(&[[2.0, 0.0], [0.0, 0.0]], [0.0, 0.0], -4.0));
        p.omega.b = vec![1.0];
        p.objective.u.linear[0] = f64::NAN;
        let d = validate_program(&p, None);
        assert!(d
            .iter()
            .any(|x| matches!(x, Diagnostic::DimensionMismatch { .. })));
        assert!(d.iter().any(|x| matches!(x, Diagnostic::NonFinite { .. })));
    }

    #[test]
    fn l1_penalty_and_feasgap() {
        let p = small_program(quad(&[[2.0, 0.0], [0.0, 0.0]], [0.0, 0.0], -4.0));
        // g(3, 0) = 9 − 0 − 4 = 5
        assert_eq!(p.feasgap(&[3.0, 0.0]), 5.0);
        assert_eq!(p.l1_penalty(&[3.0, 0.0], 2.0), -12.0 + 10.0);
        assert_eq!(p.feasgap(&[0.0, 0.0]), 0.0);
    }
}
