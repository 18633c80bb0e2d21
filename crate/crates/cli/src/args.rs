use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "hsl",
    version,
    about = "Scaling limits of the hypercube random walk: simulation and statistical checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Simulate a regime and write samples, covariance or decay tables.
    Simulate(ExperimentArgs),
    /// Simulate a regime and run its full test battery.
    Diagnose(ExperimentArgs),
    /// Closed-form mean and variance of the odd-parity count after Δ draws.
    Moments(MomentsArgs),
    /// Local CLT gap over a list of N.
    Lclt(LcltArgs),
    /// Exact vague-convergence check of the initial marginal in the slow regime.
    Vague(VagueArgs),
    /// KS check of Rademacher partial sums at jittered times.
    Donsker(DonskerArgs),
    /// Concentration of the parity-signature sets B(J).
    Partition(PartitionArgs),
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory for CSV and JSON files.
    #[arg(long, default_value = "hsl-out")]
    pub out: PathBuf,
    /// Write `runtime_seconds: null` so that reruns are byte-identical.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Worker threads for the Monte Carlo ensemble.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Flat key = value TOML file mirroring the flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeArg {
    Intermediate,
    Fast,
    Slow,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CRuleArg {
    /// c = √(n/σ²).
    Diffusive,
    /// c = K.
    Dimension,
    /// c given by `--c`.
    Explicit,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    Uniform,
    AllPlus,
    /// Point mass nearest to `--fraction`·K.
    Fraction,
    /// Explicit pmf from `--init-pmf`.
    Pmf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineArg {
    Urn,
    Full,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 100.0)]
    pub fast_min: f64,
    #[arg(long, default_value_t = 0.05)]
    pub slow_max: f64,
    #[arg(long, default_value_t = 0.15)]
    pub drift_max: f64,
    #[arg(long, default_value_t = 50.0)]
    pub gap_min: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub regime: RegimeArg,
    /// Hypercube dimension.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: u64,
    /// Steps per unit time (intermediate: defaults to round(λK)).
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub sigma2: Option<f64>,
    #[arg(long, value_enum)]
    pub c_rule: Option<CRuleArg>,
    /// Explicit normalization (implies `--c-rule explicit`).
    #[arg(long)]
    pub c: Option<f64>,
    /// Comma-separated, strictly increasing times.
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "uniform")]
    pub init: InitArg,
    #[arg(long)]
    pub fraction: Option<f64>,
    /// `m:p` pairs separated by commas.
    #[arg(long)]
    pub init_pmf: Option<String>,
    #[arg(long, value_enum, default_value = "urn")]
    pub engine: EngineArg,
    #[arg(long, default_value_t = 0.001)]
    pub p_threshold: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: u64,
    #[arg(long)]
    pub delta: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LcltArgs {
    /// Comma-separated, strictly increasing N.
    #[arg(long = "N", value_delimiter = ',', default_value = "100,1000,10000")]
    #[serde(rename = "N")]
    pub n: Vec<u64>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VagueArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DonskerArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: u64,
    /// Comma-separated positive times.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub times: Vec<f64>,
    /// `none`, `shrinking` (width K^{-1/2}) or a fixed width.
    #[arg(long, default_value = "shrinking")]
    pub jitter: String,
    #[arg(long, default_value_t = 20_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PartitionArgs {
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub grid: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub thresholds: ThresholdArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::Simulate(a) | Command::Diagnose(a) => &a.output,
            Command::Moments(a) => &a.output,
            Command::Lclt(a) => &a.output,
            Command::Vague(a) => &a.output,
            Command::Donsker(a) => &a.output,
            Command::Partition(a) => &a.output,
        }
    }
}
