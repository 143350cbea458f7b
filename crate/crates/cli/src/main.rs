//! `hodgelets` command-line driver.
//!
//! Exit codes: 0 on success, 1 for usage and input errors, 2 for numerical
//! failures (eigensolver non-convergence, degenerate frames, pursuit that
//! cannot reach its tolerance).

mod commands;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hodgelets", version, about = "Hodgelet dictionaries for edge flows on simplicial complexes")]
pub struct Cli {
    /// JSON config file with optional "field", "trajectories", "synthetic"
    /// and "frame" sections; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a simplicial complex and write complex.json / geometry.csv.
    #[command(subcommand)]
    Build(BuildCommand),
    /// Run one of the experiments.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
    /// Analytic and empirical frame bounds for joint and separate dictionaries.
    FrameReport(FrameArgs),
    /// Write the manifest of a synthetic trajectory set.
    Synth(SynthArgs),
}

#[derive(Debug, Subcommand)]
pub enum BuildCommand {
    /// From a complex JSON file with 1-based simplices.
    Simplices {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Delaunay triangulation of random or given points.
    Delaunay {
        /// Number of uniform points in the unit square.
        #[arg(long, default_value_t = 40)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV `node,x,y` of points to triangulate instead of random ones.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Remove the triangles whose circumcenters lie in this disc.
        #[arg(long, num_args = 3, value_names = ["X", "Y", "R"], allow_negative_numbers = true)]
        hole: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Hexagonal grid, one node per hexagon.
    Hex {
        #[arg(long, num_args = 4, value_names = ["XMIN", "XMAX", "YMIN", "YMAX"], allow_negative_numbers = true,
              default_values_t = [-2.0, 2.0, -2.0, 2.0])]
        bounds: Vec<f64>,
        #[arg(long, conflicts_with = "circumradius")]
        target_nodes: Option<usize>,
        #[arg(long)]
        circumradius: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum ExperimentCommand {
    /// Sparse representation of the two-ball vector field.
    Field(FieldArgs),
    /// Sparse k-means clustering of trajectories.
    Trajectories(TrajectoryArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BankArgs {
    /// Kernels per bank (M).
    #[arg(long)]
    pub kernels: Option<usize>,
    /// Hann overlap (R).
    #[arg(long)]
    pub overlap: Option<usize>,
    /// Normalize banks on the spectrum.
    #[arg(long)]
    pub normalize: Option<bool>,
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[command(flatten)]
    pub bank: BankArgs,
    /// Approximate number of hexagons.
    #[arg(long)]
    pub target_nodes: Option<usize>,
    /// Smallest relative tolerance of the log-spaced grid.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of tolerances in the grid.
    #[arg(long)]
    pub tol_count: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub bank: BankArgs,
    /// Trajectory CSV `id,time,lat,lon`.
    #[arg(long, conflicts_with = "manifest")]
    pub input: Option<PathBuf>,
    /// Synthetic set manifest (defaults to the built-in fixture).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Hexagons used to mesh real trajectory data.
    #[arg(long, default_value_t = 133)]
    pub target_nodes: usize,
    /// Number of clusters.
    #[arg(long = "k")]
    pub k: Option<usize>,
    /// l1 budget; defaults to sqrt(D)/4 per representation.
    #[arg(long)]
    pub s: Option<f64>,
    /// Seed for the split and k-means.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training fraction.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BankKind {
    LogHann,
    Linear,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    /// Complex JSON; defaults to a hex grid on [-2,2]^2.
    #[arg(long)]
    pub complex: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub target_nodes: usize,
    #[arg(long)]
    pub kernels: Option<usize>,
    #[arg(long)]
    pub overlap: Option<usize>,
    #[arg(long, value_enum)]
    pub bank: Option<BankKind>,
    /// Tightness tolerance on B/A - 1.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
