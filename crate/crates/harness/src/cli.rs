use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug, Clone)]
#[command(name = "ldm-lab", version, about = "Largest-differencing laboratory")]
pub struct Cli {
    /// Base seed; trial `i` uses substream `i` of this seed.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,

    /// Output file (a directory for `figure`). Standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Also write the run record (spec, payload, warnings) as JSON.
    #[arg(long, global = true)]
    pub record: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Monte Carlo mean of the LDM (or PDM) output on uniform instances.
    LdmSim(LdmSimArgs),
    /// Exact output distribution from the λ-tuple enumeration.
    ExactPdf(ExactPdfArgs),
    /// Sampled terminal rates from random walks down the λ-tuple tree.
    LambdaWalk(LambdaWalkArgs),
    /// Deterministic rate equation.
    RateEq(RateEqArgs),
    /// Scaling curve of F(n) = F(n−1) + F(⌊n/2⌋).
    Fibonacci(FibonacciArgs),
    /// Continuum series f(n) against its asymptotic expansion.
    Series(SeriesArgs),
    /// Piecewise γ_k diagnostics.
    Gamma(GammaArgs),
    /// Least-squares fits of scaling data.
    Fit(FitArgs),
    /// Data files for one of the bundled figure presets.
    Figure(FigureArgs),
    /// Re-run a saved run record and compare payloads.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::LdmSim(_) => "ldm-sim",
            Command::ExactPdf(_) => "exact-pdf",
            Command::LambdaWalk(_) => "lambda-walk",
            Command::RateEq(_) => "rate-eq",
            Command::Fibonacci(_) => "fibonacci",
            Command::Series(_) => "series",
            Command::Gamma(_) => "gamma",
            Command::Fit(_) => "fit",
            Command::Figure(_) => "figure",
            Command::Replay(_) => "replay",
        }
    }
}

/// Bit width of the simulated fixed-point values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bits {
    Auto,
    Fixed(u32),
}

impl FromStr for Bits {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Bits::Auto);
        }
        s.parse::<u32>()
            .map(Bits::Fixed)
            .map_err(|_| format!("expected `auto` or a bit count, got {s:?}"))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bits::Auto => f.write_str("auto"),
            Bits::Fixed(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Ldm,
    Pdm,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdmSimArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = Bits::Auto)]
    pub bits: Bits,
    #[arg(long, value_enum, default_value_t = MethodArg::Ldm)]
    pub method: MethodArg,
    /// Histogram of L_n/⟨L_n⟩ as `bin_center,density`.
    #[arg(long)]
    pub hist_out: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactPdfArgs {
    #[arg(long)]
    pub n: usize,
    /// Lift the enumeration cap. Memory grows exponentially in n.
    #[arg(long)]
    pub max_n_override: bool,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaWalkArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// Histogram of λ₂/⟨λ₂⟩ as `bin_center,density`.
    #[arg(long)]
    pub hist_out: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEqArgs {
    #[arg(long)]
    pub n: usize,
    /// Dump `t,i,ln_lambda` over the whole triangle.
    #[arg(long)]
    pub field_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sample {
    Dyadic,
    List,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FibonacciArgs {
    /// Largest n; required for dyadic sampling, an upper bound for lists.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = Sample::Dyadic)]
    pub sample: Sample,
    /// Comma-separated n values for `--sample list`.
    #[arg(long, value_delimiter = ',')]
    pub list: Vec<usize>,
    #[arg(long)]
    pub memory_budget: Option<usize>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesArgs {
    /// One or more comma-separated values of log₂ n.
    #[arg(long, value_delimiter = ',', required = true)]
    pub log2_n: Vec<u32>,
    #[arg(long, default_value_t = 256)]
    pub precision: usize,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaArgs {
    #[arg(long)]
    pub n: f64,
    #[arg(long, default_value_t = 8)]
    pub k_max: u32,
    /// Sample points per piece for the recursion residual.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Fit,
    Naive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Simulation,
    Rate,
    Fibonacci,
    Series,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitArgs {
    /// CSV with an `n`, `log2_n` or `ln_n` column plus `scaled_value` (fit) or `mean_L` (naive).
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: FitKind,
    /// Inclusive n range `nmin:nmax`; bounds may be written `2^k` or `10^k`.
    #[arg(long)]
    pub range: String,
    /// Which model produced the data; recorded only.
    #[arg(long, value_enum, default_value_t = Source::Series)]
    pub source: Source,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureName {
    Fig2,
    Fig3,
    Fig5,
    Fig6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Minutes on one core.
    Desk,
    /// Seconds; for checking the plumbing.
    Smoke,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub name: FigureName,
    #[arg(long, value_enum, default_value_t = Profile::Desk)]
    pub profile: Profile,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub record_path: PathBuf,
}
