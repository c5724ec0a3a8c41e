use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "attrmeaning",
    version,
    about = "Measure how meaningful discovered binary attributes are and turn them into keywords"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a discovery model and write its codes for the training features.
    Discover(DiscoverArgs),
    /// Encode features with a saved model.
    Encode(EncodeArgs),
    /// Reconstruction distance from discovered attributes to a meaningful subspace.
    Distance(DistanceArgs),
    /// Rank several discovered attribute sets by convex-hull distance.
    Rank(RankArgs),
    /// Split-validation, noise curves and labelling cost.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Keyword generation and hit-rate evaluation.
    #[command(subcommand)]
    Keywords(KeywordsCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lsh,
    Sh,
    Mmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Plain,
    Cvx,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative objective change that stops the simplex solver.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iterations: usize,
}

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub bits: usize,
    #[arg(long)]
    pub features: PathBuf,
    /// One class label per line; required by mmc.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Apply the order-1 intersection-kernel feature map first.
    #[arg(long)]
    pub lift: bool,
    #[arg(long, default_value_t = 1, requires = "lift")]
    pub lift_order: usize,
    #[arg(long, default_value_t = 0.65, requires = "lift")]
    pub lift_period: f64,
    /// Keep this fraction of PCA directions before hashing.
    #[arg(long)]
    pub pca_keep: Option<f64>,
    #[arg(long)]
    pub model_out: PathBuf,
    #[arg(long)]
    pub codes_out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-4)]
    pub lambda: f64,
    #[arg(long, default_value_t = 20)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub codes_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long)]
    pub meaningful: PathBuf,
    #[arg(long)]
    pub discovered: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Cvx)]
    pub mode: Mode,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub meaningful: PathBuf,
    /// NAME=PATH of a discovered attribute CSV; repeatable.
    #[arg(long = "method", required = true)]
    pub methods: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Score a held-out half of the meaningful set against the other half.
    SplitValidate(SplitArgs),
    /// Distance as random attributes are appended to a discovered set.
    NoiseCurve(NoiseArgs),
    /// Labelling cost of naming attributes versus keywording instances.
    HitCost(HitCostArgs),
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub meaningful: PathBuf,
    /// NAME=PATH of a discovered attribute CSV; repeatable.
    #[arg(long = "method")]
    pub methods: Vec<String>,
    #[arg(long, default_value_t = 0.5)]
    pub left_fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long)]
    pub meaningful: PathBuf,
    #[arg(long)]
    pub discovered: PathBuf,
    #[arg(long)]
    pub max_noise: usize,
    #[arg(long)]
    pub step: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct HitCostArgs {
    #[arg(long)]
    pub attributes: usize,
    #[arg(long)]
    pub instances: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum KeywordsCommand {
    /// Emit the names of positive, nameable bits per item.
    Generate(GenerateArgs),
    /// Score emitted keywords against human judgments.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub codes: PathBuf,
    #[arg(long)]
    pub names: PathBuf,
    /// One identifier per line; defaults to row indices.
    #[arg(long)]
    pub item_ids: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub keywords: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub actions: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}
