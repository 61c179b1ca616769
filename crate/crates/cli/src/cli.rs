//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Parser)]
#[command(name = "wealthstat", version, about = "Ownership-based wealth distributions")]
pub struct Cli {
    /// Key=value or JSON config file; flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Write the result here instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Seed for sampling commands (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability mass function of one owner's holding.
    Dist(DistArgs),
    /// Gini coefficients.
    Gini(GiniArgs),
    /// Lorenz curves.
    Lorenz(LorenzArgs),
    /// Shannon entropies.
    Entropy(EntropyArgs),
    /// Total-value laws and other convolutions.
    Convolve(ConvolveArgs),
    /// Deposits spread over equal banks.
    Banks(BanksArgs),
    /// The UTXO ladder model.
    Bitcoin(BitcoinArgs),
    /// Monte Carlo allocation sampling.
    Simulate(SimulateArgs),
    /// Exact configuration counts on small instances.
    Verify(VerifyArgs),
}

impl Command {
    pub const NAMES: [&'static str; 9] = [
        "dist", "gini", "lorenz", "entropy", "convolve", "banks", "bitcoin", "simulate", "verify",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Dist(_) => "dist",
            Command::Gini(_) => "gini",
            Command::Lorenz(_) => "lorenz",
            Command::Entropy(_) => "entropy",
            Command::Convolve(_) => "convolve",
            Command::Banks(_) => "banks",
            Command::Bitcoin(_) => "bitcoin",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
        }
    }

    pub fn parameters(&self) -> serde_json::Value {
        let v = match self {
            Command::Dist(a) => serde_json::to_value(a),
            Command::Gini(a) => serde_json::to_value(a),
            Command::Lorenz(a) => serde_json::to_value(a),
            Command::Entropy(a) => serde_json::to_value(a),
            Command::Convolve(a) => serde_json::to_value(a),
            Command::Banks(a) => serde_json::to_value(a),
            Command::Bitcoin(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Verify(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistKind {
    Poisson,
    Bosonic,
    Fermionic,
    TruncatedPoisson,
    TruncatedGeometric,
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub kind: DistKind,
    /// Mean holding (atomic laws).
    #[arg(long)]
    pub m: Option<f64>,
    /// Multiplier β (truncated laws).
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// Maximal holding Λ, or `inf`.
    #[arg(long, default_value = "inf")]
    pub cutoff: String,
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
    /// Report Σ_{k>m} P(k) instead of the pmf.
    #[arg(long)]
    pub tail_above_mean: bool,
    /// Mean grid `lo:hi:n`, log-spaced.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GiniKind {
    Poisson,
    Bosonic,
    Fermionic,
    /// Gini of the analytic geometric Lorenz curve.
    BosonicLorenz,
}

#[derive(Debug, Args, Serialize)]
pub struct GiniArgs {
    #[arg(long, value_enum)]
    pub kind: GiniKind,
    #[arg(long)]
    pub m: Option<f64>,
    /// Mean grid `lo:hi:n`, log-spaced.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LorenzKind {
    Poisson,
    Geometric,
    Fermionic,
}

#[derive(Debug, Args, Serialize)]
pub struct LorenzArgs {
    #[arg(long, value_enum)]
    pub kind: LorenzKind,
    #[arg(long)]
    pub m: f64,
    /// Sample the curve at x = i/points.
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    /// Emit the exact breakpoints of the discrete law instead.
    #[arg(long)]
    pub breakpoints: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyKind {
    Poisson,
    Bosonic,
    Fermionic,
    PoissonAsymptotic,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long, value_enum)]
    pub kind: EntropyKind,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvolveLaw {
    /// Total value of a solved system of species.
    System,
    /// Poisson(m) ⊗ geometric(m̄).
    PoissonGeometric,
    /// Binomial(total, 1/owners).
    FermionicBinomial,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvolveArgs {
    #[arg(long, value_enum, default_value_t = ConvolveLaw::System)]
    pub law: ConvolveLaw,
    /// `distinguishable:w=1:cutoff=inf:m=0.5` or `identical:w=2:cutoff=3`; repeatable.
    #[arg(long)]
    pub species: Vec<String>,
    /// Mean total value of the identical species.
    #[arg(long, default_value_t = 0.0)]
    pub value_mean: f64,
    #[arg(long)]
    pub v_max: Option<usize>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub mbar: Option<f64>,
    #[arg(long)]
    pub total: Option<u64>,
    #[arg(long)]
    pub owners: Option<u64>,
    /// Report Σ P(v) q^v and the closed-form Z(q) at these q instead.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct BanksArgs {
    /// Mean deposit per owner.
    #[arg(long)]
    pub m: f64,
    #[arg(long, default_value_t = 1)]
    pub banks: u64,
    /// Tabulate TV to Poisson and Gini for 1, 2, 4, … up to this many banks.
    #[arg(long)]
    pub sweep: Option<u64>,
    /// Mean debt per owner; emits the net-balance law of deposits minus debts.
    #[arg(long)]
    pub debt: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BitcoinTable {
    Summary,
    Value,
    Popularity,
    Partitions,
}

#[derive(Debug, Args, Serialize)]
pub struct BitcoinArgs {
    #[arg(long, value_enum, default_value_t = BitcoinTable::Summary)]
    pub table: BitcoinTable,
    /// Mean wallet value in satoshi.
    #[arg(long)]
    pub value_mean: Option<f64>,
    #[arg(long)]
    pub betabar: Option<f64>,
    /// Largest denomination d̄.
    #[arg(long, default_value_t = wealthstat::bitcoin::HARD_CAP_SATOSHI)]
    pub dbar: u64,
    /// Largest wallet value for the value and partitions tables.
    #[arg(long, default_value_t = 1000)]
    pub max_value: u64,
    /// Number of denominations in the popularity table.
    #[arg(long, default_value_t = 100)]
    pub denominations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimKind {
    Distinguishable,
    Bosonic,
    Fermionic,
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kind: SimKind,
    /// Total units M.
    #[arg(long)]
    pub units: u64,
    /// Owners N.
    #[arg(long)]
    pub owners: u64,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    /// Stream id of the first sample; sample i uses stream + i.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCase {
    /// Two units among two owners, both classes.
    Intro,
    /// Exhaustive Ω maximization for the given instance.
    Extremum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassArg {
    Distinguishable,
    Identical,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub case: VerifyCase,
    #[arg(long, default_value_t = 2)]
    pub owners: u64,
    #[arg(long, default_value_t = 2)]
    pub units: u64,
    #[arg(long, value_enum, default_value_t = ClassArg::Distinguishable)]
    pub class: ClassArg,
    #[arg(long, default_value = "inf")]
    pub cutoff: String,
}
