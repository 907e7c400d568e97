//! Experiment driver for discriminative multiplex community detection.
//!
//! Subcommands: `generate` (synthetic benchmark instances), `detect` (run a
//! solver on edge-list inputs), `evaluate` (score detect output against
//! ground truth) and `sweep` (parameter grids with aggregate tables).
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 completed with a
//! degenerate-result warning.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::load_json;

#[derive(Parser)]
#[command(name = "mxdisc", version, about = "Discriminative community detection for multiplex network pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark instance (edge lists + ground truth).
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the benchmark seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run a detection method on multiplex edge-list input.
    Detect {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run only this seed instead of the config's seed list.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write embedding matrices.
        #[arg(long)]
        emit_embeddings: bool,
    },
    /// Score a detect output directory against a truth file.
    Evaluate {
        /// Directory holding seed_* subdirectories from `detect`.
        #[arg(long)]
        detect_dir: PathBuf,
        /// truth.json written by `generate`.
        #[arg(long)]
        truth: PathBuf,
        /// Output path (default: <detect-dir>/metrics.json).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter grid over generated instances.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Parallel seed-level workers.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let _ = err.print();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };

    let outcome = match cli.command {
        Command::Generate { config, out, seed } => {
            load_json(&config).and_then(|cfg| commands::run_generate(cfg, &out, seed))
        }
        Command::Detect { config, out, seed, emit_embeddings } => {
            load_json(&config).and_then(|cfg| commands::run_detect(cfg, &out, seed, emit_embeddings))
        }
        Command::Evaluate { detect_dir, truth, out } => {
            commands::run_evaluate(&detect_dir, &truth, out.as_deref())
        }
        Command::Sweep { config, out, jobs } => {
            load_json(&config).and_then(|cfg| commands::run_sweep(cfg, &out, jobs))
        }
    };

    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
