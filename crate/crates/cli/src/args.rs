//! Argument surface of the partreg binary.

use clap::{Args, Parser, Subcommand, ValueEnum};
use partreg_core::KernelKind;
use partreg_sim::Design;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "partreg", version)]
#[command(about = "Nonparametric regression and conditional quantiles for partially observed responses")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Fit the design's estimators over a grid and emit CSV results plus a
    /// JSON run manifest
    Estimate(EstimateArgs),
    /// Draw a synthetic dataset from the design's canonical scenario
    Simulate(SimulateArgs),
    /// Monte Carlo validation against oracle truths, with a pass/fail
    /// summary per check
    Validate(ValidateArgs),
    /// Print a dataset summary and design checks
    Inspect(InspectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DesignArg {
    #[value(name = "plain")]
    Plain,
    #[value(name = "case_control")]
    CaseControl,
    #[value(name = "x_truncated")]
    XTruncated,
    #[value(name = "left_truncated")]
    LeftTruncated,
    #[value(name = "ltrc")]
    Ltrc,
    #[value(name = "right_truncated")]
    RightTruncated,
    #[value(name = "double_truncated")]
    DoubleTruncated,
    #[value(name = "current_status")]
    CurrentStatus,
}

impl From<DesignArg> for Design {
    fn from(d: DesignArg) -> Design {
        match d {
            DesignArg::Plain => Design::Plain,
            DesignArg::CaseControl => Design::CaseControl,
            DesignArg::XTruncated => Design::XTruncated,
            DesignArg::LeftTruncated => Design::LeftTruncated,
            DesignArg::Ltrc => Design::Ltrc,
            DesignArg::RightTruncated => Design::RightTruncated,
            DesignArg::DoubleTruncated => Design::DoubleTruncated,
            DesignArg::CurrentStatus => Design::CurrentStatus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Epanechnikov,
    Triangular,
    Gaussian,
    Uniform,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> KernelKind {
        match k {
            KernelArg::Epanechnikov => KernelKind::Epanechnikov,
            KernelArg::Triangular => KernelKind::Triangular,
            KernelArg::Gaussian => KernelKind::Gaussian,
            KernelArg::Uniform => KernelKind::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Increasing,
    Decreasing,
}

#[derive(Args, Debug)]
pub struct SmoothingArgs {
    /// Kernel used by every smoothed estimator
    #[arg(long, value_enum, default_value_t = KernelArg::Epanechnikov)]
    pub kernel: KernelArg,
    /// Fixed bandwidth h > 0; overrides the scaled-power rule
    #[arg(long, conflicts_with = "bandwidth_exponent")]
    pub bandwidth: Option<f64>,
    /// Exponent a of h = 1.06·sd(x)·n^(-a); must lie in (1/5, 1/3)
    #[arg(long, default_value_t = 0.25)]
    pub bandwidth_exponent: f64,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Input dataset (CSV with a header row; see SCHEMAS.md)
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub design: DesignArg,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    /// Covariate grid as lo:hi:count (default: 101 points over the window)
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 101)]
    pub grid_count: usize,
    /// Response grid for the CDF slices as lo:hi:count (default: 51 points
    /// over the observed response range)
    #[arg(long)]
    pub y_grid: Option<String>,
    #[arg(long, default_value_t = 51)]
    pub y_grid_count: usize,
    /// Sampling ratio θ = λ0/λ1; required by the biased designs
    #[arg(long)]
    pub theta: Option<f64>,
    /// Quantile levels in (0, 1), comma separated
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub quantiles: String,
    /// Fixed response levels for covariate-quantile inversion q1(u; y)
    #[arg(long)]
    pub y_levels: Option<String>,
    /// Monotone direction of the Bernoulli fit for level inversion
    #[arg(long, value_enum, default_value_t = DirectionArg::Increasing)]
    pub monotone_direction: DirectionArg,
    /// Use the printed numerator of the doubly-truncated F_T product
    /// instead of the consistent truncation-event form
    #[arg(long, default_value_t = false)]
    pub dt_printed_numerator: bool,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub design: DesignArg,
    /// Number of accepted records to draw
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output CSV path
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, value_enum)]
    pub design: DesignArg,
    /// Large sample size of the consistency comparison
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    /// Small sample size of the consistency comparison
    #[arg(long, default_value_t = 200)]
    pub n_small: usize,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct InspectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub design: DesignArg,
}

