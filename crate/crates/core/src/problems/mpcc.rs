use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::{uniform_matrix, uniform_vec};
use crate::inner::{BarrierSolver, ConvexSubproblem, InnerOptions, InnerStatus};
use crate::linalg::{Matrix, SymMatrix};
use crate::model::{ConvexQuadratic, ConvexSetOmega, DCPair, DCProgram};
use crate::rng::SplitMix64;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    pub lb: Vec<f64>,
    pub ub: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lb: Vec<f64>, ub: Vec<f64>) -> Self {
        BoxBounds { lb, ub }
    }

    pub fn free(n: usize) -> Self {
        BoxBounds {
            lb: vec![f64::NEG_INFINITY; n],
            ub: vec![f64::INFINITY; n],
        }
    }
}

/// ```text
/// min  f(x, y)
/// s.t. A x + B y ≤ a
///      x ≥ 0,  C x + D y + e ≥ 0,  xᵀ(C x + D y + e) = 0
///      x ∈ omega_x,  y ∈ omega_y
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct MpccData {
    pub nx: usize,
    pub ny: usize,
    /// Over the stacked vector `(x, y)`.
    pub objective: ConvexQuadratic,
    pub a_mat: Matrix,
    pub b_mat: Matrix,
    pub a: Vec<f64>,
    pub c_mat: Matrix,
    pub d_mat: Matrix,
    pub e: Vec<f64>,
    pub omega_x: BoxBounds,
    pub omega_y: BoxBounds,
}

/// Where `x`, `y` and the slack `z = Cx + Dy + e` sit inside `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpccIndex {
    pub x: Range<usize>,
    pub y: Range<usize>,
    pub z: Range<usize>,
}

impl MpccIndex {
    pub fn dim(&self) -> usize {
        self.z.end
    }

    /// `xᵀz` at `w`.
    pub fn complementarity_gap(&self, w: &[f64]) -> f64 {
        w[self.x.clone()]
            .iter()
            .zip(&w[self.z.clone()])
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl MpccData {
    pub fn check(&self) -> Result<()> {
        let (nx, ny) = (self.nx, self.ny);
        let dims = [
            ("mpcc objective", nx + ny, self.objective.dim()),
            ("mpcc A rows", self.a.len(), self.a_mat.rows()),
            ("mpcc A cols", nx, self.a_mat.cols()),
            ("mpcc B rows", self.a.len(), self.b_mat.rows()),
            ("mpcc B cols", ny, self.b_mat.cols()),
            ("mpcc C rows", nx, self.c_mat.rows()),
            ("mpcc C cols", nx, self.c_mat.cols()),
            ("mpcc D rows", nx, self.d_mat.rows()),
            ("mpcc D cols", ny, self.d_mat.cols()),
            ("mpcc e", nx, self.e.len()),
            ("mpcc omega_x lb", nx, self.omega_x.lb.len()),
            ("mpcc omega_x ub", nx, self.omega_x.ub.len()),
            ("mpcc omega_y lb", ny, self.omega_y.lb.len()),
            ("mpcc omega_y ub", ny, self.omega_y.ub.len()),
        ];
        for (what, expected, found) in dims {
            if expected != found {
                return Err(Error::DimensionMismatch {
                    what,
                    expected,
                    found,
                });
            }
        }
        let tol = crate::model::default_psd_tol(&self.objective.hessian);
        if self.objective.min_eig() < -tol {
            return Err(Error::InvalidProgram(format!(
                "mpcc objective is not PSD (min eigenvalue {:e})",
                self.objective.min_eig()
            )));
        }
        Ok(())
    }

    pub fn index(&self) -> MpccIndex {
        let (nx, ny) = (self.nx, self.ny);
        MpccIndex {
            x: 0..nx,
            y: nx..nx + ny,
            z: nx + ny..2 * nx + ny,
        }
    }

    /// `C x + D y + e`
    pub fn comp_value(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let cx = self.c_mat.mul_vec(x);
        let dy = self.d_mat.mul_vec(y);
        (0..self.nx).map(|i| cx[i] + dy[i] + self.e[i]).collect()
    }
}

/// Lifts the MPCC to `w = (x, y, z)` with `C x + D y − z + e = 0` and the
/// single DC constraint `‖w‖² − (‖x − z‖² + ‖y‖²) ≤ 0`, i.e. `2xᵀz ≤ 0`.
pub fn build_mpcc(d: &MpccData) -> Result<(DCProgram, MpccIndex)> {
    d.check()?;
    let idx = d.index();
    let (nx, ny) = (d.nx, d.ny);
    let n = idx.dim();

    let objective = DCPair::convex(d.objective.embed(n, 0));

    let u = ConvexQuadratic::scaled_norm(n, 2.0, vec![0.0; n], 0.0);
    let mut vh = SymMatrix::zeros(n);
    for i in 0..nx {
        vh.set(i, i, 2.0);
        vh.set(idx.z.start + i, idx.z.start + i, 2.0);
        vh.set(idx.z.start + i, i, -2.0);
    }
    for j in idx.y.clone() {
        vh.set(j, j, 2.0);
    }
    let v = ConvexQuadratic::new(vh, vec![0.0; n], 0.0)?;
    let g = DCPair::new(u, v)?;

    let mut lb = vec![0.0; n];
    let mut ub = vec![f64::INFINITY; n];
    for i in 0..nx {
        lb[i] = d.omega_x.lb[i].max(0.0);
        ub[i] = d.omega_x.ub[i];
    }
    lb[nx..nx + ny].copy_from_slice(&d.omega_y.lb);
    ub[nx..nx + ny].copy_from_slice(&d.omega_y.ub);

    let mut a = Matrix::zeros(d.a.len(), n);
    for r in 0..d.a.len() {
        a.row_mut(r)[..nx].copy_from_slice(d.a_mat.row(r));
        a.row_mut(r)[nx..nx + ny].copy_from_slice(d.b_mat.row(r));
    }
    let mut e = Matrix::zeros(nx, n);
    for r in 0..nx {
        e.row_mut(r)[..nx].copy_from_slice(d.c_mat.row(r));
        e.row_mut(r)[nx..nx + ny].copy_from_slice(d.d_mat.row(r));
        e.row_mut(r)[idx.z.start + r] = -1.0;
    }
    let rhs: Vec<f64> = d.e.iter().map(|v| -v).collect();
    let omega = ConvexSetOmega::boxed(lb, ub)
        .with_inequalities(a, d.a.clone())
        .with_equalities(e, rhs);
    let labels = vec![alloc::string::String::from("complementarity")];
    Ok((
        DCProgram::new(objective, vec![g], omega).with_labels(labels),
        idx,
    ))
}

/// Result of the branch enumeration: the best objective and its lifted
/// point `w = (x, y, Cx + Dy + e)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MpccOracle {
    pub f_star: f64,
    pub w_star: Vec<f64>,
    pub feasible_branches: usize,
}

/// Enumerates all `2^nx` complementarity patterns. Branch `S` fixes
/// `xᵢ = 0, (Cx+Dy+e)ᵢ ≥ 0` for `i ∈ S` and `xᵢ ≥ 0, (Cx+Dy+e)ᵢ = 0`
/// otherwise; each branch is a convex QP over `(x, y)`.
pub fn mpcc_oracle(d: &MpccData, inner_tol: f64) -> Result<MpccOracle> {
    d.check()?;
    let (nx, ny) = (d.nx, d.ny);
    if nx > 12 {
        return Err(Error::InvalidArgument(format!(
            "branch enumeration needs nx <= 12, got {nx}"
        )));
    }
    let n = nx + ny;
    let mut solver = BarrierSolver::new(InnerOptions {
        tol: inner_tol,
        max_newton: 2000,
    });
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut feasible = 0;
    for mask in 0u32..(1u32 << nx) {
        let mut lb: Vec<f64> = d
            .omega_x
            .lb
            .iter()
            .map(|l| l.max(0.0))
            .chain(d.omega_y.lb.iter().copied())
            .collect();
        let mut ub: Vec<f64> = d.omega_x.ub.iter().chain(&d.omega_y.ub).copied().collect();
        let mut ineq_rows: Vec<Vec<f64>> = Vec::new();
        let mut ineq_rhs = Vec::new();
        for r in 0..d.a.len() {
            let mut row = d.a_mat.row(r).to_vec();
            row.extend_from_slice(d.b_mat.row(r));
            ineq_rows.push(row);
            ineq_rhs.push(d.a[r]);
        }
        let mut eq_rows: Vec<Vec<f64>> = Vec::new();
        let mut eq_rhs = Vec::new();
        let mut impossible = false;
        for i in 0..nx {
            let mut row = d.c_mat.row(i).to_vec();
            row.extend_from_slice(d.d_mat.row(i));
            if mask & (1 << i) != 0 {
                if lb[i] > 0.0 {
                    impossible = true;
                }
                lb[i] = 0.0;
                ub[i] = 0.0;
                ineq_rows.push(row.iter().map(|v| -v).collect());
                ineq_rhs.push(d.e[i]);
            } else {
                eq_rows.push(row);
                eq_rhs.push(-d.e[i]);
            }
        }
        if impossible {
            continue;
        }
        let sp = ConvexSubproblem::boxed(d.objective.clone(), lb, ub)
            .with_ineq(Matrix::from_rows(&ineq_rows, n)?, ineq_rhs)
            .with_eq(Matrix::from_rows(&eq_rows, n)?, eq_rhs);
        let sol = solver.solve(&sp, None)?;
        match sol.status {
            InnerStatus::Optimal => {}
            InnerStatus::Infeasible => continue,
            other => {
                log::debug!("oracle branch {mask:#b} ended with {}", other.as_str());
                continue;
            }
        }
        feasible += 1;
        let f = sp.objective_value(&sol.z);
        if best.as_ref().is_none_or(|(fb, _)| f < *fb) {
            best = Some((f, sol.z));
        }
    }
    let Some((f_star, xy)) = best else {
        return Err(Error::EmptyFeasibleSet);
    };
    let comp = d.comp_value(&xy[..nx], &xy[nx..]);
    let mut w_star = xy;
    w_star.extend(comp);
    Ok(MpccOracle {
        f_star,
        w_star,
        feasible_branches: feasible,
    })
}

/// Random MPCC with a known feasible point.
///
/// A reference point `(x̄, ȳ)` with random support of `x̄` and a strictly
/// complementary `z̄` is drawn first; `e` is then chosen so that
/// `C x̄ + D ȳ + e = z̄`. `C` is strictly diagonally dominant with positive
/// diagonal. The linear rows hold `x̄` and `x̄ + 𝟙` with margin.
pub fn gen_random_mpcc(nx: usize, ny: usize, seed: u64) -> MpccData {
    let mut rng = SplitMix64::new(seed);
    let mut xbar = vec![0.0; nx];
    let mut zbar = vec![0.0; nx];
    for i in 0..nx {
        if rng.next_f64() < 0.5 {
            xbar[i] = rng.uniform(0.5, 5.0);
        } else {
            zbar[i] = rng.uniform(0.5, 5.0);
        }
    }
    let ybar = uniform_vec(&mut rng, ny, -5.0, 5.0);

    let mut c_mat = uniform_matrix(&mut rng, nx, nx, -1.0, 1.0);
    for i in 0..nx {
        c_mat[(i, i)] = rng.uniform(nx as f64 + 1.0, nx as f64 + 3.0);
    }
    let d_mat = uniform_matrix(&mut rng, nx, ny, -1.0, 1.0);
    let cx = c_mat.mul_vec(&xbar);
    let dy = d_mat.mul_vec(&ybar);
    let e: Vec<f64> = (0..nx).map(|i| zbar[i] - cx[i] - dy[i]).collect();

    let rows = 2;
    let a_mat = uniform_matrix(&mut rng, rows, nx, -1.0, 1.0);
    let b_mat = uniform_matrix(&mut rng, rows, ny, -1.0, 1.0);
    let shifted: Vec<f64> = xbar.iter().map(|v| v + 1.0).collect();
    let by = b_mat.mul_vec(&ybar);
    let ax0 = a_mat.mul_vec(&xbar);
    let ax1 = a_mat.mul_vec(&shifted);
    let a: Vec<f64> = (0..rows)
        .map(|r| ax0[r].max(ax1[r]) + by[r] + rng.uniform(0.5, 2.0))
        .collect();

    let n = nx + ny;
    let m = uniform_matrix(&mut rng, n, n, -1.0, 1.0);
    let q = uniform_vec(&mut rng, n, -5.0, 5.0);
    let hess = SymMatrix::symmetrize(&m.transpose().mul(&m))
        .expect("square")
        .add_diag(0.1);
    let objective = ConvexQuadratic::new(hess, q, 0.0).expect("finite data");

    MpccData {
        nx,
        ny,
        objective,
        a_mat,
        b_mat,
        a,
        c_mat,
        d_mat,
        e,
        omega_x: BoxBounds::new(vec![0.0; nx], vec![10.0; nx]),
        omega_y: BoxBounds::new(vec![-10.0; ny], vec![10.0; ny]),
    }
}
