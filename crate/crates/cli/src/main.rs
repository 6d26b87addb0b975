//! gtpsim: config-driven betting-protocol experiments.
//!
//! Exit codes: 0 success; 2 configuration or usage error; 3 runtime
//! violation (collateral breach, malformed play, failed probability
//! bound); 4 suite expectation failure.

mod catalog;
mod config;
mod runner;
mod suite;

use clap::{Parser, Subcommand};
use runner::Outcome;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gtpsim",
    version,
    about = "Simulates betting protocols over priced hedges and checks their capital guarantees"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment config and write its artifacts.
    Run {
        config: PathBuf,
        /// Output root (default: $GTPSIM_OUT, then the working directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override [game].seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override [game].horizon.
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Run a suite of experiments and aggregate pass/fail.
    Suite {
        suite: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for parallel experiments (default: all cores).
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Check a config without running it.
    Validate { config: PathBuf },
}

fn out_root(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("GTPSIM_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn experiment_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "experiment".to_string())
}

fn run_one(config: &Path, out: Option<PathBuf>, seed: Option<u64>, horizon: Option<u64>) -> u8 {
    let mut cfg = match config::load_experiment(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    if let Some(s) = seed {
        cfg.game.seed = s;
    }
    if let Some(h) = horizon {
        if h == 0 {
            eprintln!("error: --horizon must be at least 1");
            return 2;
        }
        cfg.game.horizon = h;
    }
    let name = experiment_name(config);
    let base_dir = config.parent().unwrap_or(Path::new(".")).to_path_buf();
    let root = match &cfg.output.dir {
        Some(d) if out.is_none() => base_dir.join(d),
        _ => out_root(out),
    };
    match runner::run_experiment(&cfg, &name, &base_dir, &root) {
        Ok(report) => {
            println!(
                "{}: {} (artifacts in {})",
                report.name,
                report.outcome.label(),
                report.out_dir.display()
            );
            match report.outcome {
                Outcome::Pass => 0,
                Outcome::Violation { round, detail } => {
                    eprintln!("runtime violation at round {round}: {detail}");
                    3
                }
                Outcome::BoundFailed { detail } => {
                    eprintln!("probability bound failed: {detail}");
                    3
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn validate(config: &Path) -> u8 {
    let cfg = match config::load_experiment(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 2;
        }
    };
    let base_dir = config.parent().unwrap_or(Path::new("."));
    let checks = || -> anyhow::Result<Vec<String>> {
        let (_, mut warnings) = catalog::build_skeptic(&cfg)?;
        catalog::build_reality(&cfg, base_dir, 1)?;
        let (_, notes) = catalog::build_detector_bank(&cfg)?;
        catalog::build_export_ladder(&cfg)?;
        warnings.extend(notes);
        Ok(warnings)
    };
    match checks() {
        Ok(warnings) => {
            println!("ok: {}", config.display());
            for w in warnings {
                println!("warning: {w}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run {
            config,
            out,
            seed,
            horizon,
        } => run_one(&config, out, seed, horizon),
        Cmd::Suite {
            suite,
            out,
            workers,
        } => match suite::run_suite(&suite, &out_root(out), workers) {
            Ok(code) => code as u8,
            Err(e) => {
                eprintln!("error: {e:#}");
                2
            }
        },
        Cmd::Validate { config } => validate(&config),
    };
    ExitCode::from(code)
}
