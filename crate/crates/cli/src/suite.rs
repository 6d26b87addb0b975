//! Suite execution: experiments fan out across a worker pool, each into
//! its own output directory, and the aggregate verdict lands in a
//! declaration-ordered report file.

use crate::config::{self, ExperimentConfig, SuiteEntry};
use crate::runner::{self, Outcome};
use anyhow::{Context, Result};
use rayon::prelude::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

struct PlannedEntry {
    name: String,
    cfg: ExperimentConfig,
    base_dir: PathBuf,
    expect: String,
}

fn entry_name(entry: &SuiteEntry) -> String {
    if let Some(n) = &entry.name {
        return n.clone();
    }
    Path::new(&entry.config)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| entry.config.clone())
}

/// Run every experiment in the suite. Returns the process exit code:
/// 0 when each outcome matches its expectation, 4 otherwise.
pub fn run_suite(suite_path: &Path, out_root: &Path, workers: Option<usize>) -> Result<i32> {
    let suite = config::load_suite(suite_path)?;
    let base = suite_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    std::fs::create_dir_all(out_root)
        .with_context(|| format!("cannot create output directory {}", out_root.display()))?;
    let report_path = out_root.join("suite-report.txt");

    if suite.experiment.is_empty() {
        let text = "suite: empty\nwarning: no experiments declared; passing trivially\n";
        std::fs::write(&report_path, text)?;
        eprintln!(
            "warning: suite {} declares no experiments",
            suite_path.display()
        );
        println!("suite: empty, passing trivially");
        return Ok(0);
    }

    // Parse and resolve everything up front so a bad entry is a config
    // error, not a late partial failure.
    let mut planned = Vec::new();
    for entry in &suite.experiment {
        let cfg_path = base.join(&entry.config);
        let cfg = config::load_experiment(&cfg_path)?;
        planned.push(PlannedEntry {
            name: entry_name(entry),
            cfg,
            base_dir: cfg_path.parent().unwrap_or(Path::new(".")).to_path_buf(),
            expect: entry.expect.clone().unwrap_or_else(|| "pass".to_string()),
        });
    }

    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(w) = workers {
            b = b.num_threads(w.max(1));
        }
        b.build().context("cannot build the worker pool")?
    };

    let results: Vec<(String, String, Result<runner::ExperimentReport>)> = pool.install(|| {
        planned
            .par_iter()
            .map(|p| {
                let run = runner::run_experiment(&p.cfg, &p.name, &p.base_dir, out_root);
                (p.name.clone(), p.expect.clone(), run)
            })
            .collect()
    });

    let mut text = String::new();
    let mut all_ok = true;
    let _ = writeln!(text, "suite: {} experiments", results.len());
    for (name, expect, run) in &results {
        let (got, detail) = match run {
            Ok(report) => (
                report.outcome.label().to_string(),
                match &report.outcome {
                    Outcome::Violation { round, detail } => format!(" (round {round}: {detail})"),
                    Outcome::BoundFailed { detail } => format!(" ({detail})"),
                    Outcome::Pass => String::new(),
                },
            ),
            Err(e) => ("error".to_string(), format!(" ({e:#})")),
        };
        let ok = got == *expect;
        all_ok &= ok;
        let verdict = if ok { "ok" } else { "FAIL" };
        let _ = writeln!(
            text,
            "{verdict}: {name}: expected {expect}, got {got}{detail}"
        );
    }
    let _ = writeln!(text, "result: {}", if all_ok { "pass" } else { "fail" });
    std::fs::write(&report_path, &text)
        .with_context(|| format!("cannot write {}", report_path.display()))?;
    print!("{text}");

    Ok(if all_ok { 0 } else { 4 })
}
