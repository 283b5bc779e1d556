//! Command-line driver: argument parsing, config resolution and dispatch.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use psomotif::featurize::{Normalization, WindowMode};
use serde::de::DeserializeOwned;

pub use commands::{cmd_bicluster, cmd_cluster, cmd_compare, cmd_motifs, cmd_prepare, GroupRecord};
pub use config::{Engine, RunConfig};
pub use error::{CliError, EXIT_CONTRACT, EXIT_IO, EXIT_USAGE, EXIT_VALIDATION};

fn kebab<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unrecognised value '{s}'"))
}

#[derive(Debug, Parser)]
#[command(
    name = "psomotif",
    version,
    about = "Protein sequence motifs from PSO clustering and biclustering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write frequency windows, the normalised matrix and a manifest.
    Prepare(PrepareArgs),
    /// Cluster frequency windows.
    Cluster(ClusterArgs),
    /// Bicluster the normalised sequence × amino-acid matrix.
    Bicluster(BiclusterArgs),
    /// Significant amino acids, motif relations and logos per group.
    Motifs(MotifsArgs),
    /// Run both pipelines and tally structure homology.
    Compare(CompareArgs),
}

/// Flags shared by every subcommand. Each overrides the config file.
#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Sequence file ('>' records).
    #[arg(long)]
    pub sequences: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    /// reshape | sliding
    #[arg(long, value_parser = kebab::<WindowMode>)]
    pub window_mode: Option<WindowMode>,
    /// mean | range | mode
    #[arg(long, value_parser = kebab::<Normalization>)]
    pub normalization: Option<Normalization>,
    /// Map B/Z/X/U to D/E/A/C instead of rejecting them.
    #[arg(long)]
    pub relax_alphabet: bool,
}

/// Swarm settings shared by the clustering subcommands.
#[derive(Debug, Clone, Args)]
pub struct SwarmArgs {
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Write the gbest fitness per iteration to trace.csv.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PrepareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub structures: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub swarm: SwarmArgs,
    /// Structure file; adds homology scores to the report.
    #[arg(long)]
    pub structures: Option<PathBuf>,
    /// pso-kmeans | kmeans
    #[arg(long, value_parser = kebab::<Engine>)]
    pub engine: Option<Engine>,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct BiclusterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub swarm: SwarmArgs,
    #[arg(long)]
    pub structures: Option<PathBuf>,
    #[arg(long)]
    pub k_rows: Option<usize>,
    #[arg(long)]
    pub k_cols: Option<usize>,
    /// Volume reward weight.
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct MotifsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// clusters.json or biclusters.json from an earlier run.
    #[arg(long)]
    pub groups: PathBuf,
    #[arg(long)]
    pub saa_threshold: Option<f64>,
    /// Disable the small-sample logo correction.
    #[arg(long)]
    pub no_logo_correction: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub structures: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub k_rows: Option<usize>,
    #[arg(long)]
    pub k_cols: Option<usize>,
    #[arg(long)]
    pub particles: Option<usize>,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.window_size, self.window);
        set(&mut cfg.window_mode, self.window_mode);
        set(&mut cfg.normalization, self.normalization);
        cfg.relax_alphabet |= self.relax_alphabet;
        Ok(cfg)
    }
}

/// Runs a parsed command, returning the files it wrote.
pub fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    match cli.command {
        Command::Prepare(a) => {
            let cfg = a.common.resolve()?;
            cmd_prepare(
                &cfg,
                &a.common.sequences,
                a.structures.as_deref(),
                &a.common.out,
            )
        }
        Command::Cluster(a) => {
            let mut cfg = a.common.resolve()?;
            set(&mut cfg.engine, a.engine);
            set(&mut cfg.k, a.k);
            set(&mut cfg.particles, a.swarm.particles);
            set(&mut cfg.iterations, a.swarm.iterations);
            cmd_cluster(
                &cfg,
                &a.common.sequences,
                a.structures.as_deref(),
                &a.common.out,
                a.swarm.trace,
            )
        }
        Command::Bicluster(a) => {
            let mut cfg = a.common.resolve()?;
            set(&mut cfg.k_rows, a.k_rows);
            set(&mut cfg.k_cols, a.k_cols);
            if a.lambda.is_some() {
                cfg.lambda = a.lambda;
            }
            if a.swarm.particles.is_some() {
                cfg.bicluster_particles = a.swarm.particles;
            }
            set(&mut cfg.iterations, a.swarm.iterations);
            cmd_bicluster(
                &cfg,
                &a.common.sequences,
                a.structures.as_deref(),
                &a.common.out,
                a.swarm.trace,
            )
        }
        Command::Motifs(a) => {
            let mut cfg = a.common.resolve()?;
            set(&mut cfg.saa_threshold, a.saa_threshold);
            cfg.logo_correction &= !a.no_logo_correction;
            cmd_motifs(&cfg, &a.common.sequences, &a.groups, &a.common.out)
        }
        Command::Compare(a) => {
            let mut cfg = a.common.resolve()?;
            set(&mut cfg.k, a.k);
            set(&mut cfg.k_rows, a.k_rows);
            set(&mut cfg.k_cols, a.k_cols);
            set(&mut cfg.particles, a.particles);
            set(&mut cfg.iterations, a.iterations);
            if a.lambda.is_some() {
                cfg.lambda = a.lambda;
            }
            cmd_compare(&cfg, &a.common.sequences, &a.structures, &a.common.out)
        }
    }
}

/// Parses `args` (program name first), runs, reports, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
