//! Command-line surface. Every subcommand's arguments are also the body of a
//! saved run configuration, so a run can be replayed from its JSON file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use leslie_core::{ModelParams64, Parameter, SetId};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "leslie-dyn",
    version,
    about = "Discrete-time Leslie prey-predator model"
)]
pub struct Cli {
    /// Replay the run stored in FILE instead of a subcommand.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Save the run configuration to FILE before executing it.
    #[arg(long, global = true, value_name = "FILE")]
    pub save_config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

/// A complete, replayable run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub run: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "kebab-case")]
pub enum Command {
    /// Iterate the map and write the trajectory as `n,x,y` CSV.
    Simulate(SimulateArgs),
    /// Locate and classify the fixed points.
    FixedPoints(FixedPointsArgs),
    /// Detect the limit cycle reached from an initial state.
    Cycles(CyclesArgs),
    /// Sample the attractor over a parameter grid as `param,x,y` CSV.
    Bifurcate(BifurcateArgs),
    /// Estimate the largest Lyapunov exponent.
    Lyapunov(LyapunovArgs),
    /// Report the logistic conjugacy of the prey-axis map.
    Conjugacy(ConjugacyArgs),
    /// Monte-Carlo check of one-step invariance of M1 or M2.
    InvariantCheck(InvariantArgs),
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Simulate(c) => &c.output,
            Command::FixedPoints(c) => &c.output,
            Command::Cycles(c) => &c.output,
            Command::Bifurcate(c) => &c.output,
            Command::Lyapunov(c) => &c.output,
            Command::Conjugacy(c) => &c.output,
            Command::InvariantCheck(c) => &c.output,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct OutputArgs {
    /// Report encoding.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Write the primary output to FILE (atomically) instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

/// Model parameters. `a` and `b` are always required; `c`, `d` and
/// `alpha` only where the full planar map is evaluated.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ParamArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

impl ParamArgs {
    pub fn model(&self) -> Result<ModelParams64, Failure> {
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| Failure::usage(format!("--{flag} is required for the planar map")))
        };
        ModelParams64::new(
            self.a,
            self.b,
            need(self.c, "c")?,
            need(self.d, "d")?,
            need(self.alpha, "alpha")?,
        )
        .map_err(Failure::usage)
    }

    /// Checks the prey-axis parameters `a > 1`, `b > 0`.
    pub fn axis(&self) -> Result<(f64, f64), Failure> {
        if !(self.a.is_finite() && self.a > 1.0) {
            return Err(Failure::usage(format!(
                "--a {} must be finite and > 1",
                self.a
            )));
        }
        if !(self.b.is_finite() && self.b > 0.0) {
            return Err(Failure::usage(format!(
                "--b {} must be finite and > 0",
                self.b
            )));
        }
        Ok((self.a, self.b))
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DetectArgs {
    /// Steps discarded before cycle detection.
    #[arg(long, default_value_t = 1000)]
    pub transient: usize,
    /// Relative tolerance for cycle detection.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Largest period searched.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_period: u64,
}

fn positive_steps() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long, value_parser = positive_steps())]
    pub steps: u64,
    #[command(flatten)]
    pub detect: DetectArgs,
    /// Write the summary report to FILE instead of stderr.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FixedPointsArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CyclesArgs {
    /// 1 for the prey-axis map, 2 for the planar map.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: u8,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Initial prey; defaults to the critical point (a-1)/(2b) when dim = 1.
    #[arg(long, allow_negative_numbers = true)]
    pub x0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    #[arg(long, default_value_t = 100_000, value_parser = positive_steps())]
    pub steps: u64,
    #[command(flatten)]
    pub detect: DetectArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BifurcateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Parameter swept: a, b, c, d or alpha.
    #[arg(long)]
    pub param: Parameter,
    #[arg(long, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub end: f64,
    #[arg(long, default_value_t = 200, value_parser = positive_steps())]
    pub points: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: f64,
    #[arg(long, default_value_t = 1000, value_parser = positive_steps())]
    pub transient: u64,
    /// States recorded per grid value.
    #[arg(long, default_value_t = 64, value_parser = positive_steps())]
    pub samples: u64,
    /// Write the summary report to FILE instead of stderr.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct LyapunovArgs {
    /// 1 for the prey-axis map, 2 for the planar map.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub dim: u8,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub x0: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub y0: Option<f64>,
    #[arg(long, default_value_t = 100_000, value_parser = positive_steps())]
    pub steps: u64,
    #[arg(long, default_value_t = 1000)]
    pub transient: usize,
    /// Steps between tangent-vector renormalisations (planar map only).
    #[arg(long, default_value_t = 1, value_parser = positive_steps())]
    pub renorm_interval: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ConjugacyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetArg {
    M1,
    M2,
}

impl From<SetArg> for SetId {
    fn from(s: SetArg) -> Self {
        match s {
            SetArg::M1 => SetId::M1,
            SetArg::M2 => SetId::M2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct InvariantArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum)]
    pub set: SetArg,
    #[arg(long, default_value_t = 10_000, value_parser = positive_steps())]
    pub samples: u64,
    /// Seed of the sampler; sample `i` uses stream `i` of ChaCha8 seeded with it.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}
