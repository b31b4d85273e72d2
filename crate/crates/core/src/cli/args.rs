use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{ENGINE_VERSION, REPORT_SCHEMA_VERSION};
use crate::io::TickSchema;

fn long_version() -> &'static str {
    // leaked once at startup; clap wants a 'static str
    Box::leak(format!("{ENGINE_VERSION} (report schema {REPORT_SCHEMA_VERSION})").into_boxed_str())
}

/// Market-based moments, volatilities and coefficients of variation of
/// windowed trade ticks.
#[derive(Debug, Parser)]
#[command(name = "market-moments", version = long_version(), propagate_version = true)]
pub struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = "MARKET_MOMENTS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price statistics per window, with returns when --lag is given.
    Analyze(AnalyzeArgs),
    /// Like analyze, with --lag required.
    Returns(AnalyzeArgs),
    /// Aggregate statistics of deal pools per window.
    Aggregate(AggregateArgs),
    /// Statistics of a linear combination described by a TOML spec.
    Composite(CompositeArgs),
    /// Write a synthetic tick (or deal) file from a TOML generator spec.
    Simulate(SimulateArgs),
    /// Validate an input file without computing anything.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemaArg {
    Value,
    Price,
}

impl From<SchemaArg> for TickSchema {
    fn from(s: SchemaArg) -> Self {
        match s {
            SchemaArg::Value => TickSchema::Value,
            SchemaArg::Price => TickSchema::Price,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// JSONL file receiving one report per line; stdout when absent.
    #[arg(long, short, conflicts_with = "output_dir")]
    pub output: Option<PathBuf>,
    /// Directory receiving one `window-<index>.json` per window.
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    /// Fail with exit code 4 on numeric degeneracy instead of warning.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Tick file (CSV or .jsonl), `-` for stdin.
    pub input: PathBuf,
    /// Window width, e.g. `1s`, `250ms`, `5m`; bare numbers are seconds.
    #[arg(long, short, value_parser = super::duration::parse_duration)]
    pub window: f64,
    /// Return lag, same units as --window.
    #[arg(long, value_parser = super::duration::parse_duration)]
    pub lag: Option<f64>,
    /// Window grid origin, seconds.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub origin: f64,
    /// Expected input schema; detected from the header when absent.
    #[arg(long, value_enum)]
    pub schema: Option<SchemaArg>,
    /// Retain window samples and report their departure from the Gaussian.
    #[arg(long)]
    pub gap: bool,
    /// Seed of the generator that produced the input, recorded in reports.
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AggregateArgs {
    /// Deal file with columns time,value[,agent].
    pub input: PathBuf,
    #[arg(long, short, value_parser = super::duration::parse_duration)]
    pub window: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub origin: f64,
    #[arg(long)]
    pub gap: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompositeArgs {
    /// Composite spec (TOML).
    #[arg(long)]
    pub spec: PathBuf,
    /// Also estimate the variance from this many Monte-Carlo draws (>= 10000).
    #[arg(long)]
    pub draws: Option<u64>,
    /// Seed for the Monte-Carlo draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Generator spec (TOML).
    #[arg(long)]
    pub genspec: PathBuf,
    /// Overrides the seed in the spec.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write a deal file split across this many agents instead of ticks.
    #[arg(long)]
    pub agents: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Ticks,
    Deals,
    Composite,
    Genspec,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    /// What the file holds; `.toml` files default to composite, others to ticks.
    #[arg(long, value_enum)]
    pub kind: Option<CheckKind>,
    #[arg(long, value_enum)]
    pub schema: Option<SchemaArg>,
}
