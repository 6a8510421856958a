//! `muxov`: runs the multiplexing-overhead pipeline from the command line.
//!
//! Every subcommand writes its outputs plus a `manifest.json` into `--out`.
//! Seeds are derived as `seed + i` for `i in 0..seeds`.

pub mod commands;
pub mod error;
pub mod manifest;
pub mod plot;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "muxov", version, about = "Serialization overhead of time-multiplexed qubit control")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Random circuits through the full pipeline, swept over gate counts and k.
    BenchRandom(BenchRandomArgs),
    /// Algorithm circuits (by name) or QASM files through the full pipeline.
    BenchAlgo(BenchAlgoArgs),
    /// Layered toy model over k.
    Toy(ToyArgs),
    /// Monte Carlo maximum of exponential waiting times against H_k / eta.
    Queue(QueueArgs),
    /// Fits the logarithmic model to a results CSV.
    Fit(FitArgs),
    /// Renders a results CSV as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    /// grid5, grid11, eagle or a path to a hardware JSON file.
    #[arg(long, default_value = "grid5")]
    pub spec: String,
    /// Single value for qubits per switch (overrides --ks).
    #[arg(long)]
    pub k: Option<usize>,
    /// Comma-separated qubits-per-switch values.
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long, default_value = "trivial", value_parser = ["trivial", "random", "clustered", "dispersed"])]
    pub strategy: String,
    /// Number of seeds per configuration.
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Switching time override in ns.
    #[arg(long)]
    pub tsw_ns: Option<u64>,
    #[arg(long, default_value = "dist2q", value_parser = ["index", "dist2q"])]
    pub order: String,
    #[arg(long, default_value = "on", value_parser = ["on", "off"])]
    pub hide_delays: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchRandomArgs {
    /// Comma-separated gate counts.
    #[arg(long, value_delimiter = ',', default_value = "1000,2000,4000,8000")]
    pub gates: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchAlgoArgs {
    /// Algorithm names (ghz, qft, graphstate, bv, wstate) or .qasm paths.
    #[arg(required = true)]
    pub inputs: Vec<String>,
    /// Qubits for generated algorithms; defaults to the device size.
    #[arg(long)]
    pub qubits: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ToyArgs {
    /// Side length of the square grid.
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
    /// Comma-separated k values; defaults to 2..=grid*grid.
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub p1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub p2: f64,
    #[arg(long, default_value_t = 10.0)]
    pub t2: f64,
    #[arg(long, default_value_t = 100)]
    pub depth: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timing of layers without two-qubit gates.
    #[arg(long, default_value = "per-switch", value_parser = ["per-switch", "total"])]
    pub no2q_rule: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QueueArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Comma-separated k values; defaults to 1,2,4,...,128.
    #[arg(long, value_delimiter = ',')]
    pub ks: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Results CSV from bench-random or bench-algo.
    pub input: PathBuf,
    /// Hardware the results came from (for t_1q).
    #[arg(long, default_value = "grid5")]
    pub spec: String,
    /// Restrict to rows with this circuit label.
    #[arg(long)]
    pub circuit: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlotArgs {
    pub input: PathBuf,
    #[arg(long, default_value = "lines", value_parser = ["lines", "hist", "breakdown"])]
    pub kind: String,
    /// Histogram bins.
    #[arg(long, default_value_t = 20)]
    pub bins: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputArgs,
}

/// Runs a parsed command and returns the manifest path.
pub fn run(cli: Cli) -> CliResult<PathBuf> {
    match cli.command {
        Command::BenchRandom(a) => commands::bench_random(&a),
        Command::BenchAlgo(a) => commands::bench_algo(&a),
        Command::Toy(a) => commands::toy(&a),
        Command::Queue(a) => commands::queue(&a),
        Command::Fit(a) => commands::fit(&a),
        Command::Plot(a) => commands::plot(&a),
    }
}
