//! Problem sources and starting points.

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, ValueEnum};

use scpdc_core::problems::{
    build_bilinear_nmpc, build_dca_comparison, build_mpcc, build_small_example, gen_random_mpcc,
    gen_random_ncvqcqp, BilinearNmpcData, MpccData, SmallCase,
};
use scpdc_core::scp::{dc_feasible_start, SolverConfig};
use scpdc_core::DCProgram;

use crate::error::CliError;
use crate::format::{parse, MpccJson, NmpcJson, ProblemJson};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    /// Two-variable illustrative problem (`--case 1|2`).
    SmallExample,
    /// Random nonconvex QCQP (`--n`, `--m2`, `--seed`).
    Ncvqcqp,
    /// MPCC reformulation, from `--data` or random (`--nx`, `--ny`, `--seed`).
    Mpcc,
    /// Bilinear NMPC from `--data`.
    Nmpc,
    /// Outside-a-disc instance used to compare DCA with SCP.
    DcaComparison,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["problem", "gen"])))]
pub struct SourceArgs {
    /// Problem JSON file.
    #[arg(long, value_name = "FILE")]
    pub problem: Option<PathBuf>,
    /// Built-in problem generator.
    #[arg(long, value_name = "NAME")]
    pub gen: Option<Generator>,
    /// Decomposition of the small example.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub case: u8,
    /// Number of variables (ncvqcqp).
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Number of nonconvex constraints (ncvqcqp).
    #[arg(long, default_value_t = 5)]
    pub m2: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Complementarity pairs (random mpcc).
    #[arg(long, default_value_t = 2)]
    pub nx: usize,
    /// Free variables (random mpcc).
    #[arg(long, default_value_t = 1)]
    pub ny: usize,
    /// MpccData or BilinearNmpcData JSON file.
    #[arg(long, value_name = "FILE")]
    pub data: Option<PathBuf>,
}

/// Generator input data, when the source has any.
#[derive(Debug, Clone)]
pub enum SourceData {
    None,
    Mpcc(MpccData),
    Nmpc(BilinearNmpcData),
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

impl SourceArgs {
    pub fn data(&self) -> Result<SourceData, CliError> {
        match self.gen {
            Some(Generator::Mpcc) => Ok(SourceData::Mpcc(match &self.data {
                Some(path) => {
                    let j: MpccJson = parse(&read_text(path)?, &path.display().to_string())?;
                    j.to_data()?
                }
                None => {
                    if self.nx == 0 {
                        return Err(CliError::Invalid("--nx must be positive".into()));
                    }
                    gen_random_mpcc(self.nx, self.ny, self.seed)
                }
            })),
            Some(Generator::Nmpc) => {
                let path = self
                    .data
                    .as_ref()
                    .ok_or_else(|| CliError::Invalid("--gen nmpc needs --data FILE".into()))?;
                let j: NmpcJson = parse(&read_text(path)?, &path.display().to_string())?;
                Ok(SourceData::Nmpc(j.to_data()?))
            }
            _ => Ok(SourceData::None),
        }
    }

    pub fn load(&self) -> Result<DCProgram, CliError> {
        if let Some(path) = &self.problem {
            let j: ProblemJson = parse(&read_text(path)?, &path.display().to_string())?;
            return j.to_program();
        }
        let gen = self.gen.expect("clap enforces one source");
        if self.data.is_some() && !matches!(gen, Generator::Mpcc | Generator::Nmpc) {
            return Err(CliError::Invalid(
                "--data only applies to mpcc and nmpc".into(),
            ));
        }
        match gen {
            Generator::SmallExample => Ok(build_small_example(if self.case == 1 {
                SmallCase::Case1
            } else {
                SmallCase::Case2
            })),
            Generator::Ncvqcqp => {
                if self.n == 0 {
                    return Err(CliError::Invalid("--n must be positive".into()));
                }
                Ok(gen_random_ncvqcqp(self.n, self.m2, self.seed))
            }
            Generator::DcaComparison => Ok(build_dca_comparison()),
            Generator::Mpcc | Generator::Nmpc => match self.data()? {
                SourceData::Mpcc(d) => Ok(build_mpcc(&d)?.0),
                SourceData::Nmpc(d) => Ok(build_bilinear_nmpc(&d)?),
                SourceData::None => unreachable!("generator has data"),
            },
        }
    }
}

/// Reads a point: a keyword (`zeros`, `box-midpoint`, `dc-feasible`), a
/// file, or an inline list such as `1,2.5` or `[1, 2.5]`.
///
/// Files hold a JSON array, an object with an `"x"` array, or whitespace or
/// comma separated numbers.
pub fn resolve_point(input: &str, p: &DCProgram, cfg: &SolverConfig) -> Result<Vec<f64>, CliError> {
    let x = match input.trim() {
        "zeros" => vec![0.0; p.dim],
        "box-midpoint" => p.omega.box_midpoint(),
        "dc-feasible" => dc_feasible_start(p, &vec![0.0; p.dim], cfg)?
            .ok_or_else(|| CliError::Solver("no DC-feasible point found near the origin".into()))?,
        s => {
            let path = Path::new(s);
            if path.is_file() {
                parse_point_text(&read_text(path)?, s)?
            } else {
                parse_point_text(s, "x")?
            }
        }
    };
    if x.len() != p.dim {
        return Err(CliError::Invalid(format!(
            "point has {} entries, problem has dim {}",
            x.len(),
            p.dim
        )));
    }
    Ok(x)
}

fn parse_point_text(text: &str, source: &str) -> Result<Vec<f64>, CliError> {
    let t = text.trim();
    if t.starts_with('[') || t.starts_with('{') {
        let v: serde_json::Value = parse(t, source)?;
        let arr = match &v {
            serde_json::Value::Object(m) => m.get("x"),
            other => Some(other),
        };
        return arr
            .and_then(|a| a.as_array())
            .and_then(|a| a.iter().map(|e| e.as_f64()).collect::<Option<Vec<_>>>())
            .ok_or_else(|| CliError::Parse(format!("{source}: expected an array of numbers")));
    }
    t.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|e| {
                CliError::Parse(format!("{source}: cannot read {s:?} as a number: {e}"))
            })
        })
        .collect()
}
