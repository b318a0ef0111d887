use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "netspace",
    version,
    about = "Topological probes of fixed-architecture neural network sets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every command.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output directory (manifest.json, data.csv, networks/)
    #[arg(long, default_value = "netspace-out")]
    pub out: PathBuf,
    /// Replace the contents of an existing output directory
    #[arg(long)]
    pub force: bool,
    /// Print the manifest as JSON on stdout
    #[arg(long)]
    pub json: bool,
    /// Seed for every random choice
    #[arg(long, env = "NETSPACE_SEED", default_value_t = 0)]
    pub seed: u64,
}

/// The box `[-B, B]^d` and its grid.
#[derive(Debug, Clone, Args, Serialize)]
pub struct DomainArgs {
    /// Input dimension
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Half-width of the domain box
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    /// Grid points per axis (default: 1025 for d=1, 65 for d=2, 17 above)
    #[arg(long)]
    pub grid: Option<usize>,
}

/// Comma-separated positive integers; `a..b` expands to the inclusive range.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct IndexList(pub Vec<u64>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let num = |t: &str| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|e| format!("bad index {t:?}: {e}"))
            };
            match tok.split_once("..") {
                Some((lo, hi)) => {
                    let (lo, hi) = (num(lo)?, num(hi)?);
                    if lo > hi {
                        return Err(format!("empty range {tok:?}"));
                    }
                    out.extend(lo..=hi);
                }
                None => out.push(num(tok)?),
            }
        }
        if out.is_empty() {
            return Err("index list is empty".into());
        }
        Ok(IndexList(out))
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct RealList(pub Vec<f64>);

impl FromStr for RealList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad number {t:?}: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(RealList)
    }
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Certified approximation of the identity map
    Identity(IdentityArgs),
    /// Sequences of networks converging to a function outside the set
    Witness(WitnessArgs),
    /// Networks converging uniformly to 0 with diverging Lipschitz constants
    Instability(InstabilityArgs),
    /// Bias canonicalization (ReLU) or row normalization (parametric ReLU)
    Canonicalize(CanonicalizeArgs),
    /// Numerical rank of a family of realizations at Halton points
    RankProbe(RankProbeArgs),
    /// Train toward a target and track weight growth with the sample size
    Explode(ExplodeArgs),
    /// Best distance reachable by training toward the midpoint of two networks
    MidpointGap(MidpointGapArgs),
    /// Compare grid Lipschitz estimates with the a-priori bound
    LipschitzCheck(LipschitzCheckArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Identity(_) => "identity",
            Command::Witness(_) => "witness",
            Command::Instability(_) => "instability",
            Command::Canonicalize(_) => "canonicalize",
            Command::RankProbe(_) => "rank-probe",
            Command::Explode(_) => "explode",
            Command::MidpointGap(_) => "midpoint-gap",
            Command::LipschitzCheck(_) => "lipschitz-check",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Identity(a) => &a.common,
            Command::Witness(a) => &a.common,
            Command::Instability(a) => &a.common,
            Command::Canonicalize(a) => &a.common,
            Command::RankProbe(a) => &a.common,
            Command::Explode(a) => &a.common,
            Command::MidpointGap(a) => &a.common,
            Command::LipschitzCheck(a) => &a.common,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct IdentityArgs {
    /// Activation id, e.g. relu, sigmoid, parametric_relu:a=0.2
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// Input dimension
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    /// Number of layers
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    /// Target sup-error
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Half-width of the box the error is certified on
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    /// Approximate x -> x_i (zero-based) with a (d, 1, ..., 1) network instead
    #[arg(long)]
    pub coordinate: Option<usize>,
    /// Grid points per axis for the independent error measurement
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessFamily {
    Step,
    Derivative,
    Analytic,
    Homogeneity,
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    /// Witness family
    #[arg(value_enum)]
    pub family: WitnessFamily,
    /// Activation id
    #[arg(long, default_value = "sigmoid")]
    pub activation: String,
    /// Number of layers (step, derivative, analytic)
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    /// Indices n, e.g. 1,2,4 or 1..16
    #[arg(long, default_value = "1,2,4,8,16,32,64,128,256,512,1024")]
    pub n_list: IndexList,
    #[command(flatten)]
    #[serde(flatten)]
    pub domain: DomainArgs,
    /// Point on the hyperplane (step, default origin) or the expansion point (analytic, first entry)
    #[arg(long)]
    pub x_star: Option<RealList>,
    /// Unit normal of the hyperplane (step, default e_1)
    #[arg(long)]
    pub v: Option<RealList>,
    /// Exponent of the L^p distance (step)
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// Scale lambda of the derivative limit (derivative)
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Homogeneity order on x >= 0 (homogeneity; default from activation metadata)
    #[arg(long)]
    pub r: Option<u32>,
    /// Homogeneity order on x <= 0
    #[arg(long)]
    pub q: Option<u32>,
    /// Homogeneity slack
    #[arg(long)]
    pub s: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct InstabilityArgs {
    /// Activation id
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// Architecture, e.g. 1,3,1
    #[arg(long, default_value = "1,3,1")]
    pub arch: String,
    /// Second-difference step a (default: first of 1, 1/2, 1/4, ... with non-constant f_a)
    #[arg(long)]
    pub a: Option<f64>,
    /// Centre x0 (default origin)
    #[arg(long)]
    pub x0: Option<RealList>,
    /// Indices n
    #[arg(long, default_value = "1..16")]
    pub n_list: IndexList,
    /// Half-width of the domain box
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    /// Grid points per axis
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct CanonicalizeArgs {
    /// Network JSON document
    #[arg(long = "in")]
    pub input: PathBuf,
    /// relu (bias canonicalization) or parametric_relu:a=<a> (row normalization)
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// Half-width of the domain box
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    /// Grid points per axis
    #[arg(long)]
    pub grid: Option<usize>,
    /// Random domain points for the before/after comparison
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct RankProbeArgs {
    /// Network JSON documents sharing one architecture (default: the shipped ReLU kink family)
    #[arg(long = "in")]
    pub inputs: Vec<PathBuf>,
    /// Activation id
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// Number of Halton points
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Relative singular-value cutoff
    #[arg(long, default_value_t = netspace::probes::DEFAULT_RANK_TOLERANCE)]
    pub tolerance: f64,
    /// Half-width of the domain box
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerChoice {
    Gd,
    Momentum,
}

/// Training hyperparameters.
#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Learning rate
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    /// Iterations per run
    #[arg(long, default_value_t = 2000)]
    pub iterations: usize,
    /// Optimizer
    #[arg(long, value_enum, default_value = "gd")]
    pub optimizer: OptimizerChoice,
    /// Momentum coefficient
    #[arg(long, default_value_t = 0.9)]
    pub beta: f64,
    /// Initial parameters are uniform on [-s, s]
    #[arg(long, default_value_t = 0.5)]
    pub init_scale: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetChoice {
    /// Indicator of x_1 > 0
    Step,
    /// lambda f'(lambda x_1) for the training activation
    Derivative,
    /// A fixed small (1, 2, 1) network
    Control,
}

#[derive(Debug, Args, Serialize)]
pub struct ExplodeArgs {
    /// Activation id
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// Architecture
    #[arg(long, default_value = "1,2,1")]
    pub arch: String,
    /// Regression target
    #[arg(long, value_enum, default_value = "step")]
    pub target: TargetChoice,
    /// Scale of the derivative target
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    /// Sample sizes N
    #[arg(long, default_value = "64,128,256,512,1024,2048,4096")]
    pub n_list: IndexList,
    /// Half-width of the domain box
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct MidpointGapArgs {
    /// Activation id
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// First endpoint (default: shipped instance)
    #[arg(long, requires = "f2")]
    pub f1: Option<PathBuf>,
    /// Second endpoint
    #[arg(long, requires = "f1")]
    pub f2: Option<PathBuf>,
    /// Training restarts
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Grid points per axis for data and distance
    #[arg(long, default_value_t = 257)]
    pub grid: usize,
    /// Half-width of the domain box
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub train: TrainArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct LipschitzCheckArgs {
    /// Network JSON documents (default: --count random networks)
    #[arg(long = "in")]
    pub inputs: Vec<PathBuf>,
    /// Activation id
    #[arg(long, default_value = "relu")]
    pub activation: String,
    /// Number of random networks
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Architecture of the random networks
    #[arg(long, default_value = "1,4,4,1")]
    pub arch: String,
    /// Random parameters are uniform on [-s, s]
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Half-width of the domain box
    #[arg(long = "B", default_value_t = 1.0)]
    pub half_width: f64,
    /// Grid points per axis
    #[arg(long)]
    pub grid: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}
