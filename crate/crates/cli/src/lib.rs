//! Command-line front end for `umbilic-core`.
//!
//! Every subcommand writes one document (JSON, CSV or SVG) to stdout or to
//! `--out`, and exits with 0 on success, 2 on invalid input, 3 on a
//! statistical or consistency failure and 4 on an I/O failure.

pub mod commands;
pub mod error;
pub mod report;
pub mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{exit, CliError};

#[derive(Debug, Parser)]
#[command(name = "umbilic", version, about = "Umbilic cubic forms, invariant metrics and index cone volumes")]
pub struct Cli {
    /// Seed for Monte Carlo sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the output document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; each command supports only the formats that fit it.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant metric Q(alpha, beta) and its derived constants.
    Metric(MetricArgs),
    /// Orbit average of a symmetric 4x4 matrix (upper triangle, row major).
    Average(AverageArgs),
    /// Monte Carlo estimate of the cone volume ratio, ball volume, or census ratio.
    Mc(McArgs),
    /// Gaussian census of index signs for one or more metrics.
    Census(CensusArgs),
    /// Index of the umbilic of a cubic form, by sign and by winding.
    Index(IndexArgs),
    /// SVG drawing of both principal line families around the umbilic.
    Foliation(FoliationArgs),
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, allow_negative_numbers = true, required_unless_present = "from_json")]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true, required_unless_present = "from_json")]
    pub beta: Option<f64>,
    /// Read alpha and beta from a previous `metric` report.
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    pub from_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AverageArgs {
    /// m11 m12 m13 m14 m22 m23 m24 m33 m34 m44
    #[arg(num_args = 10, allow_negative_numbers = true, required = true)]
    pub entries: Vec<f64>,
    /// Trapezoid nodes for the numerical cross-check.
    #[arg(long, default_value_t = 64)]
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McMode {
    Ratio,
    Volume,
    Census,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Sampling {
    Sphere,
    Ball,
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, value_enum, default_value_t = McMode::Ratio)]
    pub mode: McMode,
    /// Sampling domain for `--mode ratio`.
    #[arg(long, value_enum, default_value_t = Sampling::Sphere)]
    pub sampling: Sampling,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    /// Repeat to census several metrics; pairs with --beta by position.
    #[arg(long, allow_negative_numbers = true, required = true)]
    pub alpha: Vec<f64>,
    #[arg(long, allow_negative_numbers = true, required = true)]
    pub beta: Vec<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
}

#[derive(Debug, Args)]
pub struct CubicArgs {
    #[arg(allow_negative_numbers = true)]
    pub a: f64,
    #[arg(allow_negative_numbers = true)]
    pub b: f64,
    #[arg(allow_negative_numbers = true)]
    pub b_prime: f64,
    #[arg(allow_negative_numbers = true)]
    pub a_prime: f64,
    /// Common principal curvature at the umbilic.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub k: f64,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[command(flatten)]
    pub cubic: CubicArgs,
    #[arg(long, default_value_t = 1e-2)]
    pub radius: f64,
    #[arg(long, default_value_t = 256)]
    pub steps: usize,
}

#[derive(Debug, Args)]
pub struct FoliationArgs {
    #[command(flatten)]
    pub cubic: CubicArgs,
    /// Half-width of the drawn square around the umbilic.
    #[arg(long, default_value_t = 1.0)]
    pub window: f64,
    /// Seed points on the ring; each yields one curve per family.
    #[arg(long, default_value_t = 12)]
    pub density: usize,
}

/// A finished command: the document to emit and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

impl Outcome {
    pub fn ok(body: String) -> Self {
        Self { body, code: exit::OK }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Metric(args) => commands::cmd_metric(cli, args),
        Command::Average(args) => commands::cmd_average(cli, args),
        Command::Mc(args) => commands::cmd_mc(cli, args),
        Command::Census(args) => commands::cmd_census(cli, args),
        Command::Index(args) => commands::cmd_index(cli, args),
        Command::Foliation(args) => commands::cmd_foliation(cli, args),
    }
}
