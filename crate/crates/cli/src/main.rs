// Copyright 2026 The segwave Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use segwave_cli::commands::{self, Globals};
use segwave_cli::sweep::SweepKind;
use segwave_cli::{exit_code, RunManifest};

/// Design and evaluate composite segmented directional-coupler gates.
#[derive(Debug, Parser)]
#[command(name = "segwave", version)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Use 5000 epochs and batches of 1024.
    #[arg(long, global = true)]
    paper_scale: bool,
    /// Scale applied to every interface reflection in reported losses.
    #[arg(long, global = true, default_value_t = 1.0)]
    calibration_factor: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize a design.
    Optimize,
    /// Fidelity statistics and power loss of a design.
    Evaluate {
        #[arg(long)]
        design: PathBuf,
    },
    /// Fidelity versus number of segments.
    SweepN,
    /// Fidelity versus noise correlation strength.
    SweepMu,
    /// Fidelity versus relative noise width.
    SweepSigma,
    /// Summary table of optimized designs.
    Table {
        #[arg(long)]
        designs: PathBuf,
    },
    /// Bloch-sphere trajectory through a design.
    Trajectory {
        #[arg(long)]
        design: PathBuf,
        /// 0, 1, +, -, +y, -y or re0,im0,re1,im1.
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        state: String,
        #[arg(long, default_value_t = 32)]
        substeps: usize,
    },
    /// Tabulate a surrogate coupling map.
    GenSurrogateTable {
        #[arg(long)]
        step_nm: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Optimize => "optimize",
            Command::Evaluate { .. } => "evaluate",
            Command::SweepN => "sweep-n",
            Command::SweepMu => "sweep-mu",
            Command::SweepSigma => "sweep-sigma",
            Command::Table { .. } => "table",
            Command::Trajectory { .. } => "trajectory",
            Command::GenSurrogateTable { .. } => "gen-surrogate-table",
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SEGWAVE_LOG", "warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the worker pool: {e}");
        }
    }
    let globals = Globals {
        config: cli.config.clone(),
        out: cli.out.clone(),
        seed: cli.seed,
        paper_scale: cli.paper_scale,
        calibration_factor: cli.calibration_factor,
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Optimize => commands::cmd_optimize(&globals),
        Command::Evaluate { design } => commands::cmd_evaluate(&globals, design),
        Command::SweepN => commands::cmd_sweep(&globals, SweepKind::N),
        Command::SweepMu => commands::cmd_sweep(&globals, SweepKind::Mu),
        Command::SweepSigma => commands::cmd_sweep(&globals, SweepKind::Sigma),
        Command::Table { designs } => commands::cmd_table(&globals, designs),
        Command::Trajectory { design, state, substeps } => {
            commands::cmd_trajectory(&globals, design, state, *substeps)
        }
        Command::GenSurrogateTable { step_nm } => commands::cmd_gen_surrogate_table(&globals, *step_nm),
    }
    .map_err(anyhow::Error::from);

    let (seed, code) = match &result {
        Ok(seed) => (*seed, 0),
        Err(e) => (cli.seed.unwrap_or(0), exit_code(e)),
    };
    let manifest = RunManifest::new(cli.command.name(), cli.config.as_deref(), seed, &cli.out, start.elapsed(), code);
    if let Err(e) = manifest.append() {
        log::warn!("could not write manifest: {e}");
    }
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code as u8)
        }
    }
}
