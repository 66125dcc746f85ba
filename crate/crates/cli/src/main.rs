//! `scdec`: thresholds, EXIT curves, constellations and Monte-Carlo runs
//! for regular and spatially coupled LDPC codes on the dicode erasure
//! channel.
//!
//! Every run writes one CSV and one JSON manifest into the output
//! directory. Both are named after a hash of the command, its parameters
//! and the tool version, so `scdec replay <manifest>` rewrites the same
//! files.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 on invalid
//! arguments.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "scdec", version, about, long_about = None)]
struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "SCDEC_THREADS", default_value_t = 0)]
    threads: usize,

    /// Directory for CSV and manifest files.
    #[arg(long, global = true, env = "SCDEC_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Joint iterative decoding threshold of an uncoupled or coupled ensemble.
    Threshold(ThresholdArgs),
    /// EXIT-like curve: fixed points against the channel parameter.
    Exit(ExitArgs),
    /// Forward density evolution at one channel value.
    ForwardDe(ForwardArgs),
    /// Fixed point of the coupled chain at a prescribed entropy.
    #[command(alias = "reverse-de")]
    Constellation(ConstellationArgs),
    /// Monte-Carlo decoding of sampled graphs.
    Simulate(SimulateArgs),
    /// Design rate, Shannon threshold and the threshold bounds.
    Bounds(BoundsArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay {
        /// Manifest written by an earlier run.
        manifest: PathBuf,
    },
}

/// `(dl, dr)` or, with `--L` and `--w`, the coupled `(dl, dr, L, w)`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct EnsembleArgs {
    /// Variable-node degree.
    #[arg(long)]
    pub dl: u32,
    /// Check-node degree.
    #[arg(long)]
    pub dr: u32,
    /// Chain half-length: sections run from -L to L. Requires --w.
    #[arg(long = "L", id = "half_width", requires = "w")]
    pub half_width: Option<u32>,
    /// Coupling width. Requires --L.
    #[arg(long, requires = "half_width")]
    pub w: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelChoice {
    /// Dicode erasure channel.
    Dec,
    /// Binary erasure channel.
    Bec,
    /// Tabulated transfer function from --table files.
    Custom,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ChannelArgs {
    /// Channel transfer function.
    #[arg(long, value_enum, default_value = "dec")]
    pub channel: ChannelChoice,
    /// Transfer-function slice as EPSILON=PATH to a two-column `x,f` CSV.
    /// Repeat for each tabulated channel value; used with --channel custom.
    #[arg(long = "table", value_name = "EPSILON=PATH")]
    pub tables: Vec<String>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Width of the final bisection bracket.
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ExitArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Grid points x = k/n, k = 1..n (uncoupled ensembles).
    #[arg(long, default_value_t = scdec::uncoupled::EXIT_POINTS)]
    pub points: usize,
    /// Entropy grid step, giving step, 2*step, ... below 1 (coupled ensembles).
    #[arg(long, default_value_t = 0.02)]
    pub chi_step: f64,
    /// Reverse-DE tolerance (coupled ensembles).
    #[arg(long, default_value_t = scdec::coupled::REVERSE_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleChoice {
    Parallel,
    RoundRobin,
    Random,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Channel erasure probability.
    #[arg(long)]
    pub epsilon: f64,
    /// Update schedule (coupled ensembles).
    #[arg(long, value_enum, default_value = "parallel")]
    pub schedule: ScheduleChoice,
    /// Seed for the random schedule.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Convergence tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = scdec::coupled::COUPLED_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ConstellationArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Target entropy, the mean of the constellation.
    #[arg(long)]
    pub chi: f64,
    /// Tolerance on the constellation change and the entropy.
    #[arg(long, default_value_t = scdec::coupled::REVERSE_TOL)]
    pub tol: f64,
    /// Outer iteration cap.
    #[arg(long, default_value_t = scdec::coupled::REVERSE_MAX_ITER)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    /// Variable nodes per section.
    #[arg(long = "M", id = "vars_per_section")]
    pub vars_per_section: usize,
    /// Comma-separated channel erasure probabilities.
    #[arg(long, value_delimiter = ',', required = true)]
    pub epsilons: Vec<f64>,
    /// Comma-separated seeds; each seed samples one graph.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seeds: Vec<u64>,
    /// Decoder iteration cap.
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    /// Also write the graph of the first seed as an edge list.
    #[arg(long)]
    pub dump_graph: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    std::fs::create_dir_all(&cli.out_dir)
        .with_context(|| format!("creating output directory {}", cli.out_dir.display()))?;
    let command = match cli.command {
        Command::Replay { manifest } => manifest::load_command(&manifest)?,
        other => other,
    };
    let threads = cli.threads;
    let artifact = scdec::par::with_threads(threads, || commands::execute(&command))?;
    let paths = manifest::write(&cli.out_dir, &command, &artifact, threads)?;
    println!("{}", artifact.headline);
    println!("csv: {}", paths.csv.display());
    println!("manifest: {}", paths.manifest.display());
    Ok(())
}
