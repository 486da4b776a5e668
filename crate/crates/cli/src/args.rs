//! Flag definitions. Mutual-exclusion and range rules are validated after
//! parsing (see `config`) so that contradictions exit with code 4 rather
//! than the parser's usage code.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "evt",
    version,
    about = "Peaks-over-threshold tail analysis: GPD fitting, VaR/ES, diagnostics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit the tail at a threshold and report VaR/ES per confidence level
    Analyze(AnalyzeArgs),
    /// Threshold-selection diagnostics over a grid, plus band sensitivity
    Diagnose(DiagnoseArgs),
    /// Generate a deterministic simulated loss series
    Simulate(SimulateArgs),
    /// Fit on a training split and count VaR exceedances out of sample
    Backtest(BacktestArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// One value per row
    Single,
    /// `timestamp,value` rows
    Ts,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    /// Use values as stored
    AsIs,
    /// Multiply by -1 (returns-to-losses convention)
    Negate,
}

#[derive(Args)]
pub struct InputArgs {
    /// Input CSV path
    #[arg(long)]
    pub input: PathBuf,
    /// Input layout
    #[arg(long, value_enum, default_value_t = FormatArg::Single)]
    pub format: FormatArg,
    /// Sign convention applied on load
    #[arg(long, value_enum, default_value_t = SignArg::AsIs)]
    pub sign: SignArg,
}

#[derive(Args)]
pub struct ThresholdArgs {
    /// Absolute threshold in loss units
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Threshold as an empirical quantile of the series, in (0,1)
    #[arg(long)]
    pub threshold_quantile: Option<f64>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Confidence level, repeatable (default: 0.95 0.99 0.995)
    #[arg(long = "alpha")]
    pub alphas: Vec<f64>,
    /// Half-width of the threshold sensitivity band
    #[arg(long)]
    pub band: Option<f64>,
    /// Diagnostics threshold grid as MIN:MAX:COUNT (default: value
    /// quantiles 0.5..0.98, 30 points)
    #[arg(long)]
    pub grid: Option<String>,
    /// Output directory
    #[arg(long, default_value = "evt-out")]
    pub out: PathBuf,
    /// Also render plot-data CSVs to standalone SVG files
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Confidence level, repeatable (first one drives VaR/ES curves)
    #[arg(long = "alpha")]
    pub alphas: Vec<f64>,
    /// Half-width of the sensitivity band (requires a threshold flag)
    #[arg(long)]
    pub band: Option<f64>,
    /// Threshold grid as MIN:MAX:COUNT
    #[arg(long)]
    pub grid: Option<String>,
    /// Output directory
    #[arg(long, default_value = "evt-out")]
    pub out: PathBuf,
    /// Also render plot-data CSVs to standalone SVG files
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Stream seed
    #[arg(long)]
    pub seed: u64,
    /// Number of variates
    #[arg(long)]
    pub n: usize,
    /// Model spec: gpd:XI:BETA or lognormal:MU:SIGMA2
    #[arg(long)]
    pub model: String,
    /// Constant added to every variate
    #[arg(long, default_value_t = 0.0)]
    pub offset: f64,
    /// Output directory (the series lands in simulated.csv)
    #[arg(long, default_value = "evt-out")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub threshold: ThresholdArgs,
    /// Fraction of the series used for fitting, in (0,1)
    #[arg(long)]
    pub split: f64,
    /// Confidence level, repeatable (default: 0.95 0.99 0.995)
    #[arg(long = "alpha")]
    pub alphas: Vec<f64>,
    /// Output directory
    #[arg(long, default_value = "evt-out")]
    pub out: PathBuf,
}
