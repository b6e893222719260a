//! Command-line front end: network generation, simulation,
//! reconstruction, parameter sweeps, master-stability analysis, and
//! penalty cross-validation, all driven by one TOML configuration.

mod commands;
mod config;
mod util;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::{MsfArgs, ReconstructArgs};
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "netdyn",
    about = "Reconstruction of coupled chaotic map networks from time series",
    version
)]
struct Cli {
    /// Run configuration (TOML).
    #[arg(short, long, global = true, default_value = "netdyn.toml")]
    config: PathBuf,

    /// Master seed; overrides the config value and expands into per-stage
    /// seeds through a documented splitting rule.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(short, long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: number of processors).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a directed scale-free network and its degree histogram.
    GenNet,
    /// Integrate the coupled network dynamics and write the panel.
    Simulate {
        /// Write the compact binary panel instead of CSV.
        #[arg(long)]
        binary: bool,
    },
    /// Run the full reconstruction on a recorded panel.
    Reconstruct {
        /// Panel file (.csv or .bin) with a `.meta.json` sidecar.
        #[arg(long)]
        panel: PathBuf,
        /// Explicit metadata path when not `<panel>.meta.json`.
        #[arg(long)]
        meta: Option<PathBuf>,
        /// Ground-truth edge list; prints FNR/FPR when given.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Skip hub identification and use this node.
        #[arg(long)]
        known_hub: Option<usize>,
        /// Skip learning the local dynamics; JSON coefficient file.
        #[arg(long)]
        known_f: Option<PathBuf>,
        /// Override the connectivity LASSO penalty.
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Sweep reconstruction quality over data length, penalties, noise,
    /// size, and generator family; long-format CSV output.
    Sweep {
        /// Also write per-cell mean/std aggregates.
        #[arg(long)]
        aggregate: bool,
    },
    /// Master stability curve, critical coupling, and optional direct
    /// validation of the transition.
    Msf {
        /// Reconstruction report supplying the Laplacian spectrum and the
        /// simulatable model.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Edge list supplying the spectrum (no validation sweep).
        #[arg(long)]
        net: Option<PathBuf>,
    },
    /// Cross-validated penalty selection on a recorded panel.
    Cv {
        #[arg(long)]
        panel: PathBuf,
        #[arg(long)]
        meta: Option<PathBuf>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("building the worker pool")?;
    }
    let cfg = RunConfig::load(&cli.config)?;
    let master = cli.seed.unwrap_or(cfg.master_seed);

    match &cli.command {
        Command::GenNet => commands::cmd_gen_net(&cfg, master, &cli.out),
        Command::Simulate { binary } => commands::cmd_simulate(&cfg, master, &cli.out, *binary),
        Command::Reconstruct { panel, meta, truth, known_hub, known_f, lambda } => {
            let args = ReconstructArgs {
                panel: panel.clone(),
                meta: meta.clone(),
                truth: truth.clone(),
                known_hub: *known_hub,
                known_f: known_f.clone(),
                lambda: *lambda,
            };
            commands::cmd_reconstruct(&cfg, &args, &cli.out)
        }
        Command::Sweep { aggregate } => commands::cmd_sweep(&cfg, master, &cli.out, *aggregate),
        Command::Msf { report, net } => {
            let args = MsfArgs { report: report.clone(), net: net.clone() };
            commands::cmd_msf(&cfg, &args, master, &cli.out)
        }
        Command::Cv { panel, meta } => {
            commands::cmd_cv(&cfg, panel, meta.as_deref(), &cli.out)
        }
    }
}
