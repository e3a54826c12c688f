//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use estimkit::series::Axis;
use estimkit::synthlab::analytic::TruthDensity;
use estimkit::synthlab::Bandwidth;
use estimkit::volatility::VolVolMode;

#[derive(Parser, Debug)]
#[command(
    name = "estimkit",
    version,
    about = "Density and volatility estimation from price series and sample pairs",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Per-step volatility |dS|/S from a price series
    Vol(VolArgs),
    /// Volatility of volatility from a price series (or a precomputed
    /// volatility series)
    Volvol(VolvolArgs),
    /// Non-parametric joint or marginal density from empirical CDF
    /// differences
    DensityNp(DensityNpArgs),
    /// Polynomial density fit to the non-parametric estimate
    DensityFit(DensityFitArgs),
    /// Generate synthetic data with a seeded deterministic generator
    Simulate(SimulateArgs),
    /// Score the CDF-difference estimator against a KDE baseline and an
    /// analytic truth
    Compare(CompareArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AxisArg {
    X,
    Y,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Axis {
        match a {
            AxisArg::X => Axis::X,
            AxisArg::Y => Axis::Y,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelArg {
    Gbm,
    Heston,
    Gaussian,
}

fn parse_mode(s: &str) -> Result<VolVolMode, String> {
    s.parse()
}

fn parse_truth(s: &str) -> Result<TruthDensity, String> {
    s.parse()
}

fn parse_bandwidth(s: &str) -> Result<Bandwidth, String> {
    if s.eq_ignore_ascii_case("silverman") {
        return Ok(Bandwidth::Silverman);
    }
    s.parse::<f64>()
        .map(Bandwidth::Explicit)
        .map_err(|_| format!("bandwidth must be `silverman` or a number, got `{s}`"))
}

/// Evaluation-lattice flags shared by the density subcommands. Unset ranges
/// default to the sample min/max per axis, unset steps to range/50.
#[derive(Args, Debug, Clone, Copy)]
pub struct GridArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub dy: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VolArgs {
    /// Price CSV with header `timestamp,price`
    #[arg(long)]
    pub input: PathBuf,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Sampling interval override (otherwise the median timestamp spacing)
    #[arg(long)]
    pub dt: Option<f64>,
    /// Scale values by sqrt(1/dt) for display; a presentation transform,
    /// the estimator itself is per-step
    #[arg(long)]
    pub annualized: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct VolvolArgs {
    /// Price CSV, or a volatility CSV (`t,v`) with --from-vols
    #[arg(long)]
    pub input: PathBuf,
    /// Treat the input as an already-computed volatility series
    #[arg(long)]
    pub from_vols: bool,
    /// `literal` applies the difference to v^2; `analogous` mirrors the
    /// volatility formula itself
    #[arg(long, default_value = "literal", value_parser = parse_mode)]
    pub mode: VolVolMode,
    /// Rolling-mean window applied to the output series
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct DensityNpArgs {
    /// Sample CSV with header `x,y`
    #[arg(long)]
    pub input: PathBuf,
    /// Estimate a 1-D marginal instead of the joint surface
    #[arg(long, value_enum)]
    pub marginal: Option<AxisArg>,
    /// Clip negatives and rescale to unit integral
    #[arg(long)]
    pub normalize: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct DensityFitArgs {
    /// Sample CSV with header `x,y`
    #[arg(long)]
    pub input: PathBuf,
    /// Total degree of the polynomial
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Also report the closed-form marginal of this axis
    #[arg(long, value_enum)]
    pub marginal: Option<AxisArg>,
    /// Also report a conditional slice, e.g. `y=0.25` or `x=-1`
    #[arg(long)]
    pub conditional: Option<String>,
    /// Also report the fitted CDF at `X,Y`, e.g. `0.5,0.5`
    #[arg(long)]
    pub cdf: Option<String>,
    /// Write the fitted polynomial as JSON here
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Which generator to run
    #[arg(value_enum)]
    pub model: ModelArg,
    /// JSON parameter file for the generator
    #[arg(long)]
    pub params: PathBuf,
    /// Seed override (flag > params file > ESTIMKIT_SEED > 0)
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: PathBuf,
    /// Heston only: also write the latent variance path here
    #[arg(long)]
    pub variance_output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// Sample CSV with header `x,y`
    #[arg(long)]
    pub input: PathBuf,
    /// Analytic truth to score against: `standard-normal` or `uniform`
    #[arg(long, value_parser = parse_truth)]
    pub truth: TruthDensity,
    /// KDE bandwidth: `silverman` or an explicit number
    #[arg(long, default_value = "silverman", value_parser = parse_bandwidth)]
    pub bandwidth: Bandwidth,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Write the two error reports as JSON here
    #[arg(long)]
    pub output: Option<PathBuf>,
}
