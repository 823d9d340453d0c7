//! JSON file formats and their canonical serialization.
//!
//! Canonical form: object keys sorted, every float written with 17
//! significant digits in exponent notation, infinite bounds written as the
//! strings `"inf"` / `"-inf"`. Parsing a canonical file and writing it again
//! reproduces it byte for byte.

use std::fmt::Write as _;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use scpdc_core::problems::{BilinearNmpcData, BoxBounds, MpccData};
use scpdc_core::{ConvexQuadratic, ConvexSetOmega, DCPair, DCProgram, Matrix, SymMatrix};

use crate::error::CliError;

/// Real number that may be infinite; used for bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ext(pub f64);

impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0 == f64::INFINITY {
            s.serialize_str("inf")
        } else if self.0 == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Ext(v)),
            Raw::Text(t) => match t.to_ascii_lowercase().as_str() {
                "inf" | "+inf" | "infinity" | "+infinity" => Ok(Ext(f64::INFINITY)),
                "-inf" | "-infinity" => Ok(Ext(f64::NEG_INFINITY)),
                _ => Err(de::Error::custom(format!(
                    "expected a number or \"inf\"/\"-inf\", got {t:?}"
                ))),
            },
        }
    }
}

fn ext_vec(v: &[f64]) -> Vec<Ext> {
    v.iter().copied().map(Ext).collect()
}

fn plain_vec(v: &[Ext]) -> Vec<f64> {
    v.iter().map(|e| e.0).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadJson {
    #[serde(rename = "Q", default)]
    pub q_mat: Vec<Vec<f64>>,
    #[serde(default)]
    pub q: Vec<f64>,
    #[serde(default)]
    pub r: f64,
}

impl QuadJson {
    pub fn from_quadratic(c: &ConvexQuadratic) -> Self {
        QuadJson {
            q_mat: c.hessian.to_rows(),
            q: c.linear.clone(),
            r: c.constant,
        }
    }

    /// Missing `Q` or `q` mean zero.
    pub fn to_quadratic(&self, dim: usize, what: &str) -> Result<ConvexQuadratic, CliError> {
        let h = if self.q_mat.is_empty() {
            SymMatrix::zeros(dim)
        } else {
            check_rows(&self.q_mat, dim, &format!("{what}.Q"))?;
            SymMatrix::from_rows(&self.q_mat)
                .map_err(|e| CliError::Invalid(format!("{what}.Q: {e}")))?
        };
        let q = if self.q.is_empty() {
            vec![0.0; dim]
        } else {
            self.q.clone()
        };
        if q.len() != dim {
            return Err(CliError::Invalid(format!(
                "{what}.q has length {}, expected {dim}",
                q.len()
            )));
        }
        ConvexQuadratic::new(h, q, self.r).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
    }
}

fn check_rows(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<(), CliError> {
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
        return Err(CliError::Invalid(format!(
            "{what} row {i} has {} entries, expected {cols}",
            r.len()
        )));
    }
    Ok(())
}

fn matrix(rows: &[Vec<f64>], cols: usize, what: &str) -> Result<Matrix, CliError> {
    check_rows(rows, cols, what)?;
    Matrix::from_rows(rows, cols).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

fn sym(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<SymMatrix, CliError> {
    if rows.len() != dim {
        return Err(CliError::Invalid(format!(
            "{what} has {} rows, expected {dim}",
            rows.len()
        )));
    }
    check_rows(rows, dim, what)?;
    SymMatrix::from_rows(rows).map_err(|e| CliError::Invalid(format!("{what}: {e}")))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveJson {
    pub f1: QuadJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<QuadJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub u: QuadJson,
    pub v: QuadJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaJson {
    pub lb: Vec<Ext>,
    pub ub: Vec<Ext>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a_mat: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(rename = "E", default, skip_serializing_if = "Option::is_none")]
    pub e_mat: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<f64>>,
}

/// The problem file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    pub dim: usize,
    pub objective: ObjectiveJson,
    #[serde(default)]
    pub constraints: Vec<ConstraintJson>,
    pub omega: OmegaJson,
}

impl ProblemJson {
    pub fn from_program(p: &DCProgram) -> Self {
        let f2 = &p.objective.v;
        let om = &p.omega;
        ProblemJson {
            dim: p.dim,
            objective: ObjectiveJson {
                f1: QuadJson::from_quadratic(&p.objective.u),
                f2: (!(f2.hessian.is_zero()
                    && f2.linear.iter().all(|v| *v == 0.0)
                    && f2.constant == 0.0))
                    .then(|| QuadJson::from_quadratic(f2)),
            },
            constraints: p
                .constraints
                .iter()
                .enumerate()
                .map(|(i, g)| ConstraintJson {
                    name: Some(p.label(i).to_string()),
                    u: QuadJson::from_quadratic(&g.u),
                    v: QuadJson::from_quadratic(&g.v),
                })
                .collect(),
            omega: OmegaJson {
                lb: ext_vec(&om.lb),
                ub: ext_vec(&om.ub),
                a_mat: (om.a.rows() > 0).then(|| om.a.to_rows()),
                b: (om.a.rows() > 0).then(|| om.b.clone()),
                e_mat: (om.e.rows() > 0).then(|| om.e.to_rows()),
                d: (om.e.rows() > 0).then(|| om.d.clone()),
            },
        }
    }

    pub fn to_program(&self) -> Result<DCProgram, CliError> {
        let n = self.dim;
        if n == 0 {
            return Err(CliError::Invalid("dim must be positive".into()));
        }
        let f1 = self.objective.f1.to_quadratic(n, "objective.f1")?;
        let f2 = match &self.objective.f2 {
            Some(q) => q.to_quadratic(n, "objective.f2")?,
            None => ConvexQuadratic::zero(n),
        };
        let objective = DCPair::new(f1, f2).map_err(|e| CliError::Invalid(e.to_string()))?;
        let mut constraints = Vec::new();
        let mut labels = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            let what = format!("constraints[{i}]");
            let u = c.u.to_quadratic(n, &format!("{what}.u"))?;
            let v = c.v.to_quadratic(n, &format!("{what}.v"))?;
            constraints
                .push(DCPair::new(u, v).map_err(|e| CliError::Invalid(format!("{what}: {e}")))?);
            labels.push(c.name.clone().unwrap_or_else(|| format!("g{}", i + 1)));
        }
        let om = &self.omega;
        if om.lb.len() != n || om.ub.len() != n {
            return Err(CliError::Invalid(format!(
                "omega.lb/ub have lengths {}/{}, expected {n}",
                om.lb.len(),
                om.ub.len()
            )));
        }
        let mut omega = ConvexSetOmega::boxed(plain_vec(&om.lb), plain_vec(&om.ub));
        let pair = |m: &Option<Vec<Vec<f64>>>,
                    v: &Option<Vec<f64>>,
                    what: &str|
         -> Result<Option<(Matrix, Vec<f64>)>, CliError> {
            match (m, v) {
                (None, None) => Ok(None),
                (Some(m), Some(v)) => {
                    if m.len() != v.len() {
                        return Err(CliError::Invalid(format!(
                            "omega.{what} has {} rows but its right-hand side has {}",
                            m.len(),
                            v.len()
                        )));
                    }
                    Ok(Some((matrix(m, n, &format!("omega.{what}"))?, v.clone())))
                }
                (None, Some(v)) if v.is_empty() => Ok(None),
                (Some(m), None) if m.is_empty() => Ok(None),
                _ => Err(CliError::Invalid(format!(
                    "omega.{what} and its right-hand side must be given together"
                ))),
            }
        };
        if let Some((a, b)) = pair(&om.a_mat, &om.b, "A")? {
            omega = omega.with_inequalities(a, b);
        }
        if let Some((e, d)) = pair(&om.e_mat, &om.d, "E")? {
            omega = omega.with_equalities(e, d);
        }
        Ok(DCProgram::new(objective, constraints, omega).with_labels(labels))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxJson {
    pub lb: Vec<Ext>,
    pub ub: Vec<Ext>,
}

impl BoxJson {
    fn from_bounds(b: &BoxBounds) -> Self {
        BoxJson {
            lb: ext_vec(&b.lb),
            ub: ext_vec(&b.ub),
        }
    }

    fn to_bounds(&self) -> BoxBounds {
        BoxBounds::new(plain_vec(&self.lb), plain_vec(&self.ub))
    }
}

/// MPCC data: `min f(x,y)` s.t. `Ax + By ≤ a`, `x ≥ 0`, `Cx + Dy + e ≥ 0`,
/// `xᵀ(Cx + Dy + e) = 0`, boxes on `x` and `y`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MpccJson {
    pub nx: usize,
    pub ny: usize,
    pub objective: QuadJson,
    #[serde(rename = "A")]
    pub a_mat: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b_mat: Vec<Vec<f64>>,
    pub a: Vec<f64>,
    #[serde(rename = "C")]
    pub c_mat: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d_mat: Vec<Vec<f64>>,
    pub e: Vec<f64>,
    pub omega_x: BoxJson,
    pub omega_y: BoxJson,
}

impl MpccJson {
    pub fn from_data(d: &MpccData) -> Self {
        MpccJson {
            nx: d.nx,
            ny: d.ny,
            objective: QuadJson::from_quadratic(&d.objective),
            a_mat: d.a_mat.to_rows(),
            b_mat: d.b_mat.to_rows(),
            a: d.a.clone(),
            c_mat: d.c_mat.to_rows(),
            d_mat: d.d_mat.to_rows(),
            e: d.e.clone(),
            omega_x: BoxJson::from_bounds(&d.omega_x),
            omega_y: BoxJson::from_bounds(&d.omega_y),
        }
    }

    pub fn to_data(&self) -> Result<MpccData, CliError> {
        let (nx, ny) = (self.nx, self.ny);
        let d = MpccData {
            nx,
            ny,
            objective: self.objective.to_quadratic(nx + ny, "objective")?,
            a_mat: matrix(&self.a_mat, nx, "A")?,
            b_mat: matrix(&self.b_mat, ny, "B")?,
            a: self.a.clone(),
            c_mat: matrix(&self.c_mat, nx, "C")?,
            d_mat: matrix(&self.d_mat, ny, "D")?,
            e: self.e.clone(),
            omega_x: self.omega_x.to_bounds(),
            omega_y: self.omega_y.to_bounds(),
        };
        d.check().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(d)
    }
}

/// Bilinear NMPC data; `B_bilinear[r][i][j]` is the coefficient of
/// `x_i u_j` in state row `r`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NmpcJson {
    pub nx: usize,
    pub nu: usize,
    #[serde(rename = "Hp")]
    pub hp: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "B_bilinear")]
    pub b_bilinear: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "Wx")]
    pub wx: Vec<Vec<f64>>,
    #[serde(rename = "Wu")]
    pub wu: Vec<Vec<f64>>,
    #[serde(rename = "We")]
    pub we: Vec<Vec<f64>>,
    pub x_init: Vec<f64>,
    pub x_lb: Vec<Ext>,
    pub x_ub: Vec<Ext>,
    pub u_lb: Vec<Ext>,
    pub u_ub: Vec<Ext>,
    pub r_f: f64,
}

impl NmpcJson {
    pub fn from_data(d: &BilinearNmpcData) -> Self {
        NmpcJson {
            nx: d.nx,
            nu: d.nu,
            hp: d.hp,
            a: d.a.to_rows(),
            c: d.c.to_rows(),
            b_bilinear: d.b_bilinear.clone(),
            wx: d.wx.to_rows(),
            wu: d.wu.to_rows(),
            we: d.we.to_rows(),
            x_init: d.x_init.clone(),
            x_lb: ext_vec(&d.x_lb),
            x_ub: ext_vec(&d.x_ub),
            u_lb: ext_vec(&d.u_lb),
            u_ub: ext_vec(&d.u_ub),
            r_f: d.r_f,
        }
    }

    pub fn to_data(&self) -> Result<BilinearNmpcData, CliError> {
        let d = BilinearNmpcData {
            nx: self.nx,
            nu: self.nu,
            hp: self.hp,
            a: matrix(&self.a, self.nx, "A")?,
            c: matrix(&self.c, self.nu, "C")?,
            b_bilinear: self.b_bilinear.clone(),
            wx: sym(&self.wx, self.nx, "Wx")?,
            wu: sym(&self.wu, self.nu, "Wu")?,
            we: sym(&self.we, self.nx, "We")?,
            x_init: self.x_init.clone(),
            x_lb: plain_vec(&self.x_lb),
            x_ub: plain_vec(&self.x_ub),
            u_lb: plain_vec(&self.u_lb),
            u_ub: plain_vec(&self.u_ub),
            r_f: self.r_f,
        };
        d.check().map_err(|e| CliError::Invalid(e.to_string()))?;
        Ok(d)
    }
}

/// Parses JSON text; the error message carries line and column.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{source}: {e}")))
}

/// Canonical text of any serializable value.
pub fn to_canonical<T: Serialize>(value: &T) -> Result<String, CliError> {
    let v = serde_json::to_value(value)
        .map_err(|e| CliError::Invalid(format!("cannot serialize: {e}")))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

/// 17 significant digits, exponent notation.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // keep the sign of negative zero out of canonical text
        return "0.0000000000000000e0".into();
    }
    format!("{x:.16e}")
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                let _ = write!(out, "{i}");
            } else if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            let flat = items
                .iter()
                .all(|i| !matches!(i, Value::Array(_) | Value::Object(_)));
            if items.is_empty() {
                out.push_str("[]");
            } else if flat {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, item, indent);
                }
                out.push(']');
            } else {
                out.push_str("[\n");
                for (k, item) in items.iter().enumerate() {
                    pad(out, indent + 1);
                    write_value(out, item, indent + 1);
                    if k + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                pad(out, indent);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (k, key) in keys.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*key], indent + 1);
                if k + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}
