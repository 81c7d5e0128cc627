use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "orbital-heat", version, about = "Orbit counts, heat kernels and graph walk models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Orbital counting function of a group.
    Count,
    /// Numerical verification of a heat-kernel identity or inequality.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Experiments on model graphs.
    Graph {
        #[arg(value_enum)]
        model: Model,
        #[arg(value_enum)]
        analysis: Analysis,
    },
    /// ε-net of an orbit and its quasi-isometry constants.
    Discretise,
}

#[derive(Debug, Clone, Copy, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Stieltjes,
    UpperBound,
    Sandwich,
    Chop,
    GaussianTail,
    LogLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Star,
    Mixed,
    Absorbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Decay,
    Poincare,
    Sobolev,
    Doubling,
    Spectrum,
    Volume,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gf {
    BinaryTree,
    WeightedRay,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    /// Builtin (trivial, cyclic[:l], schottky[:l], parabolic) or JSON group file.
    #[arg(long, global = true, default_value = "cyclic:1")]
    pub group: String,
    /// Enumeration radius.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Times `a:b:n`, `n` evenly spaced points from `a` to `b`.
    #[arg(long = "time-grid", global = true)]
    pub time_grid: Option<Grid>,
    /// Net spacing for `discretise`.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Number of degenerate rays.
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Number of GF components.
    #[arg(long, global = true)]
    pub p: Option<usize>,
    /// Depth of GF components.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Chopping widths or Gaussian-tail parameters, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub k: Vec<f64>,
    /// Profile exponents for chopping, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Seed for random test functions.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output stem: writes `<out>.json` and, where there is a table, `<out>.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Walk length, e.g. `16384` or `2^14`.
    #[arg(long, global = true)]
    pub n: Option<Pow2>,
    /// Ball radius for graph analyses.
    #[arg(long, global = true)]
    pub r: Option<usize>,
    /// GF component of the mixed model.
    #[arg(long, global = true, value_enum, default_value_t = Gf::BinaryTree)]
    pub gf: Gf,
    /// Random test functions per check.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Node cap for orbit enumeration.
    #[arg(long, global = true, default_value_t = 50_000_000)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub a: f64,
    pub b: f64,
    pub n: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.a];
        }
        (0..self.n).map(|i| self.a + (self.b - self.a) * i as f64 / (self.n - 1) as f64).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else {
            return Err(format!("expected a:b:n, got {s:?}"));
        };
        let a: f64 = a.parse().map_err(|_| format!("bad start {a:?}"))?;
        let b: f64 = b.parse().map_err(|_| format!("bad end {b:?}"))?;
        let n: usize = n.parse().map_err(|_| format!("bad count {n:?}"))?;
        if !(a.is_finite() && b.is_finite() && a <= b) || n == 0 {
            return Err(format!("grid {s:?} needs finite a <= b and n >= 1"));
        }
        Ok(Self { a, b, n })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.a, self.b, self.n)
    }
}

impl Serialize for Grid {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A count written plainly or as `2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Pow2(pub usize);

impl FromStr for Pow2 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = match s.split_once('^') {
            Some(("2", k)) => {
                let k: u32 = k.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
                1usize.checked_shl(k).filter(|_| k < 40).ok_or_else(|| format!("{s} is too large"))?
            }
            Some(_) => return Err(format!("only powers of two are accepted, got {s:?}")),
            None => s.parse().map_err(|_| format!("bad count {s:?}"))?,
        };
        Ok(Self(v))
    }
}
