//! Run configuration shared by the flags and `--config` JSON files.
//!
//! Every field is optional so a file and the command line can be layered:
//! flags given explicitly win over the file. Defaults are applied when a
//! command resolves its plan.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "DMG_OUTPUT_DIR";
pub const DEFAULT_OUTPUT_DIR: &str = "dmg-output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Solve,
    Verify,
    Bench,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemName {
    Helmholtz1d,
    Helmholtz2d,
    Dirichlet1d,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    Multiplicative,
    Additive,
    AdditiveMultichannel,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SourceChoice {
    TwoFrequency,
    PointPatch,
    UnitImpulse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Aliasing,
    Filterbank,
    Twogrid,
    Multigrid,
    All,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

/// Basis used by the aliasing suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisChoice {
    Dft1d,
    Dft2d,
    /// Sine basis; the size defaults to the suite's `n`.
    Sine(Option<usize>),
}

impl FromStr for BasisChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dft1d" => Ok(Self::Dft1d),
            "dft2d" => Ok(Self::Dft2d),
            "sine" => Ok(Self::Sine(None)),
            other => other
                .strip_prefix("sine")
                .and_then(|n| n.parse().ok())
                .map(|n| Self::Sine(Some(n)))
                .ok_or_else(|| {
                    format!("unknown basis '{s}' (expected dft1d, dft2d, sine or sine<n>)")
                }),
        }
    }
}

impl fmt::Display for BasisChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dft1d => f.write_str("dft1d"),
            Self::Dft2d => f.write_str("dft2d"),
            Self::Sine(None) => f.write_str("sine"),
            Self::Sine(Some(n)) => write!(f, "sine{n}"),
        }
    }
}

impl Serialize for BasisChoice {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisChoice {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Parses a real number written as a decimal or as a multiple of π:
/// `0.5`, `pi`, `pi/3`, `2pi/3`, `-3*pi/4`, `π/2`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t: String = s
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase()
        .replace('π', "pi");
    let bad = || format!("cannot parse '{s}' as a number or multiple of pi");
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b.parse::<f64>().map_err(|_| bad())?)),
        None => (t.as_str(), None),
    };
    let value = match num.strip_suffix("pi") {
        Some(coef) => {
            let coef = coef.strip_suffix('*').unwrap_or(coef);
            let c = match coef {
                "" | "+" => 1.0,
                "-" => -1.0,
                c => c.parse::<f64>().map_err(|_| bad())?,
            };
            c * PI
        }
        None => num.parse::<f64>().map_err(|_| bad())?,
    };
    let value = match den {
        Some(0.0) => return Err(format!("division by zero in '{s}'")),
        Some(d) => value / d,
        None => value,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn de_real<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }
    match Option::<Repr>::deserialize(d)? {
        None => Ok(None),
        Some(Repr::Number(x)) => Ok(Some(x)),
        Some(Repr::Text(s)) => parse_real(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields, default)]
pub struct RunConfig {
    pub command: Option<CommandKind>,
    pub problem: Option<ProblemName>,
    /// Matrix Market file replacing the built-in problem.
    pub matrix: Option<PathBuf>,
    pub n: Option<usize>,
    /// Side of the 2D torus.
    #[serde(rename = "N")]
    pub side: Option<usize>,
    #[serde(deserialize_with = "de_real")]
    pub k: Option<f64>,
    pub method: Option<MethodChoice>,
    pub source: Option<SourceChoice>,
    pub source_file: Option<PathBuf>,
    pub n0: Option<usize>,
    /// Channel depth of the multichannel solver.
    pub depth: Option<usize>,
    pub output_dir: Option<PathBuf>,
    /// Residual threshold for `solve`; check tolerance override for `verify`.
    pub tolerance: Option<f64>,
    pub dump_fields: Option<bool>,
    pub threads: Option<usize>,
    pub suite: Option<Suite>,
    pub basis: Option<BasisChoice>,
    /// Perturbation injected into one filter symbol by `verify`.
    pub break_symbol: Option<f64>,
    pub sizes: Option<Vec<usize>>,
    /// CSV destination of `bench` (stdout when absent).
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

macro_rules! layer {
    ($base:ident, $over:ident; $($f:ident),*) => {
        RunConfig { $($f: $over.$f.or($base.$f)),* }
    };
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// `over` wins wherever it sets a value.
    pub fn layered(self, over: RunConfig) -> RunConfig {
        let base = self;
        layer!(base, over; command, problem, matrix, n, side, k, method, source, source_file, n0, depth,
            output_dir, tolerance, dump_fields, threads, suite, basis, break_symbol, sizes, output, seed)
    }

    /// Output directory: the configured one, else `$DMG_OUTPUT_DIR`, else
    /// `dmg-output`.
    pub fn output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| {
                std::env::var_os(OUTPUT_DIR_ENV)
                    .filter(|v| !v.is_empty())
                    .map(PathBuf::from)
            })
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR))
    }

    /// Checks ranges that do not depend on the command.
    pub fn validate(&self) -> CliResult<()> {
        let fail = |m: String| Err(CliError::Config(m));
        for (name, v) in [
            ("n", self.n),
            ("N", self.side),
            ("n0", self.n0),
            ("depth", self.depth),
            ("threads", self.threads),
        ] {
            if v == Some(0) {
                return fail(format!("{name} must be positive"));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t.is_finite() && t > 0.0) {
                return fail(format!("tolerance must be positive, got {t}"));
            }
        }
        if let Some(b) = self.break_symbol {
            if !b.is_finite() {
                return fail("break-symbol must be finite".into());
            }
        }
        if let Some(k) = self.k {
            if !k.is_finite() {
                return fail("k must be finite".into());
            }
        }
        if self.problem.is_some() && self.matrix.is_some() {
            return fail("give either a built-in problem or a matrix file, not both".into());
        }
        if self.source.is_some() && self.source_file.is_some() {
            return fail("give either a built-in source or a source file, not both".into());
        }
        if let Some(sizes) = &self.sizes {
            if sizes.is_empty() || sizes.contains(&0) {
                return fail("sizes must be a non-empty list of positive integers".into());
            }
        }
        Ok(())
    }
}
