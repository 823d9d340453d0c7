use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{Matrix, SymMatrix};
use crate::model::{
    default_psd_tol, spectral_dc_split, ConvexQuadratic, ConvexSetOmega, DCPair, DCProgram,
};
use crate::{Error, Result};

/// Finite-horizon control of `x_{k+1} = A x_k + B[x_k, u_k] + C u_k`,
/// where `B[x, u]ᵢ = Σⱼₗ b_bilinear[i][j][l] xⱼ uₗ`.
///
/// The weights and bounds are the same at every stage.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearNmpcData {
    pub nx: usize,
    pub nu: usize,
    pub hp: usize,
    pub a: Matrix,
    pub c: Matrix,
    pub b_bilinear: Vec<Vec<Vec<f64>>>,
    pub wx: SymMatrix,
    pub wu: SymMatrix,
    pub we: SymMatrix,
    pub x_init: Vec<f64>,
    pub x_lb: Vec<f64>,
    pub x_ub: Vec<f64>,
    pub u_lb: Vec<f64>,
    pub u_ub: Vec<f64>,
    pub r_f: f64,
}

impl BilinearNmpcData {
    /// Dimension of `w = (x₀, …, x_Hp, u₀, …, u_{Hp−1})`.
    pub fn dim(&self) -> usize {
        (self.hp + 1) * self.nx + self.hp * self.nu
    }

    pub fn x_offset(&self, k: usize) -> usize {
        k * self.nx
    }

    pub fn u_offset(&self, k: usize) -> usize {
        (self.hp + 1) * self.nx + k * self.nu
    }

    pub fn check(&self) -> Result<()> {
        let (nx, nu) = (self.nx, self.nu);
        let dims = [
            ("nmpc A rows", nx, self.a.rows()),
            ("nmpc A cols", nx, self.a.cols()),
            ("nmpc C rows", nx, self.c.rows()),
            ("nmpc C cols", nu, self.c.cols()),
            ("nmpc Wx", nx, self.wx.dim()),
            ("nmpc Wu", nu, self.wu.dim()),
            ("nmpc We", nx, self.we.dim()),
            ("nmpc x_init", nx, self.x_init.len()),
            ("nmpc x_lb", nx, self.x_lb.len()),
            ("nmpc x_ub", nx, self.x_ub.len()),
            ("nmpc u_lb", nu, self.u_lb.len()),
            ("nmpc u_ub", nu, self.u_ub.len()),
            ("nmpc B_bilinear", nx, self.b_bilinear.len()),
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
        for plane in &self.b_bilinear {
            if plane.len() != nx {
                return Err(Error::DimensionMismatch {
                    what: "nmpc B_bilinear rows",
                    expected: nx,
                    found: plane.len(),
                });
            }
            for row in plane {
                if row.len() != nu {
                    return Err(Error::DimensionMismatch {
                        what: "nmpc B_bilinear cols",
                        expected: nu,
                        found: row.len(),
                    });
                }
            }
        }
        for (name, w) in [("Wx", &self.wx), ("Wu", &self.wu), ("We", &self.we)] {
            let min = crate::eigen::min_eigenvalue(w)?;
            if min < -default_psd_tol(w) {
                return Err(Error::InvalidProgram(format!(
                    "weight {name} is not PSD (min eigenvalue {min:e})"
                )));
            }
        }
        if !(self.r_f > 0.0) {
            return Err(Error::InvalidProgram(format!(
                "terminal radius must be positive, got {}",
                self.r_f
            )));
        }
        Ok(())
    }

    /// Dynamics residual `hᵢ(w) = ½wᵀQᵢw + qᵢᵀw` for state row `r` of stage
    /// `k`, as `(Qᵢ, qᵢ)`.
    pub fn dynamics_row(&self, k: usize, r: usize) -> (SymMatrix, Vec<f64>) {
        let n = self.dim();
        let xo = self.x_offset(k);
        let uo = self.u_offset(k);
        let mut q = vec![0.0; n];
        for j in 0..self.nx {
            q[xo + j] += self.a[(r, j)];
        }
        for l in 0..self.nu {
            q[uo + l] += self.c[(r, l)];
        }
        q[self.x_offset(k + 1) + r] -= 1.0;
        // wᵀPw with P[xj, ul] = b/2 has Hessian 2P, so ½wᵀQw uses Q = 2P
        let mut h = SymMatrix::zeros(n);
        for j in 0..self.nx {
            for l in 0..self.nu {
                let b = self.b_bilinear[r][j][l];
                if b != 0.0 {
                    h.add_at(uo + l, xo + j, b);
                }
            }
        }
        (h, q)
    }
}

/// Stacks the horizon into one DC program. A dynamics row whose bilinear
/// part vanishes is linear and goes into `Omega` as an equality; every other
/// row `h = 0` becomes the pair `h ≤ 0`, `−h ≤ 0` from one spectral split of
/// its Hessian, with the affine part kept in `u`.
pub fn build_bilinear_nmpc(d: &BilinearNmpcData) -> Result<DCProgram> {
    d.check()?;
    let n = d.dim();
    let (nx, nu, hp) = (d.nx, d.nu, d.hp);

    let mut h = SymMatrix::zeros(n);
    for k in 0..=hp {
        let w = if k < hp { &d.wx } else { &d.we };
        let o = d.x_offset(k);
        for i in 0..nx {
            for j in 0..=i {
                h.set(o + i, o + j, w.get(i, j));
            }
        }
    }
    for k in 0..hp {
        let o = d.u_offset(k);
        for i in 0..nu {
            for j in 0..=i {
                h.set(o + i, o + j, d.wu.get(i, j));
            }
        }
    }
    let objective = DCPair::convex(ConvexQuadratic::new(h, vec![0.0; n], 0.0)?);

    let mut constraints = Vec::new();
    let mut labels = Vec::new();
    let mut eq_rows: Vec<Vec<f64>> = Vec::new();
    let mut eq_rhs = Vec::new();
    for i in 0..nx {
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        eq_rows.push(row);
        eq_rhs.push(d.x_init[i]);
    }
    for k in 0..hp {
        for r in 0..nx {
            let (q_mat, q) = d.dynamics_row(k, r);
            if q_mat.is_zero() {
                eq_rows.push(q);
                eq_rhs.push(0.0);
                continue;
            }
            let (p1, p2) = spectral_dc_split(&q_mat)?;
            let neg_q: Vec<f64> = q.iter().map(|v| -v).collect();
            let up = ConvexQuadratic::new(p1.clone(), q, 0.0)?;
            let vp = ConvexQuadratic::new(p2.clone(), vec![0.0; n], 0.0)?;
            let um = ConvexQuadratic::new(p2, neg_q, 0.0)?;
            let vm = ConvexQuadratic::new(p1, vec![0.0; n], 0.0)?;
            constraints.push(DCPair::new(up, vp)?);
            labels.push(format!("dyn[{k}][{r}]+"));
            constraints.push(DCPair::new(um, vm)?);
            labels.push(format!("dyn[{k}][{r}]-"));
        }
    }
    let term = d.we.scale(2.0).embed(n, d.x_offset(hp));
    constraints.push(DCPair::convex(ConvexQuadratic::new(
        term,
        vec![0.0; n],
        -d.r_f,
    )?));
    labels.push(String::from("terminal"));

    let mut lb = Vec::with_capacity(n);
    let mut ub = Vec::with_capacity(n);
    for _ in 0..=hp {
        lb.extend_from_slice(&d.x_lb);
        ub.extend_from_slice(&d.x_ub);
    }
    for _ in 0..hp {
        lb.extend_from_slice(&d.u_lb);
        ub.extend_from_slice(&d.u_ub);
    }
    let omega =
        ConvexSetOmega::boxed(lb, ub).with_equalities(Matrix::from_rows(&eq_rows, n)?, eq_rhs);
    Ok(DCProgram::new(objective, constraints, omega).with_labels(labels))
}
