//! Execution of a single experiment: run the game (or the Monte Carlo
//! maximal-inequality check), stream CSV artifacts, and write a summary.
//! Every file is byte-reproducible for a fixed config and seed: reals go
//! through the core's 17-digit formatter and nothing time- or
//! thread-dependent is written.

use crate::catalog;
use crate::config::ExperimentConfig;
use anyhow::{anyhow, Context, Result};
use gtpsim_core::*;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// How a finished experiment ended. Build failures are not outcomes; they
/// surface as errors before anything runs.
#[derive(Clone, Debug)]
pub enum Outcome {
    Pass,
    /// The engine aborted: collateral breach or malformed play, at a round.
    Violation {
        round: u64,
        detail: String,
    },
    /// The maximal-inequality check ran but its bound failed.
    BoundFailed {
        detail: String,
    },
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Violation { .. } => "collateral-violation",
            Outcome::BoundFailed { .. } => "bound-failed",
        }
    }
}

pub struct ExperimentReport {
    pub name: String,
    pub outcome: Outcome,
    pub out_dir: PathBuf,
}

/// Rounds worth a CSV row: everything at short horizons, powers of two
/// plus the final round at long ones.
fn emit_row(n: u64, horizon: u64) -> bool {
    horizon <= 4096 || n.is_power_of_two() || n == horizon
}

/// Keeping every round in memory is fine well past desk scale, but a
/// deliberately huge horizon should degrade to streaming, not thrash.
const TRACE_CAP: u64 = 1 << 22;

pub fn run_experiment(
    cfg: &ExperimentConfig,
    name: &str,
    base_dir: &Path,
    out_root: &Path,
) -> Result<ExperimentReport> {
    let out_dir = out_root.join(name);
    std::fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    if cfg.doob.is_some() {
        return run_doob(cfg, name, base_dir, &out_dir);
    }

    let (mut skeptic, warnings) = catalog::build_skeptic(cfg)?;
    let mut reality = catalog::build_reality(cfg, base_dir, 1)?;
    let (mut bank, mut notes) = catalog::build_detector_bank(cfg)?;
    let export_ladder = catalog::build_export_ladder(cfg)?;

    let horizon = cfg.game.horizon;
    let mut run_cfg = RunConfig::new(horizon, skeptic.variant());
    run_cfg.record_trace = false; // rows are collected in the observer

    let want_trajectory = cfg.output.trajectory.unwrap_or(true);
    let want_detectors = cfg.output.detectors.unwrap_or(true) && !bank.is_empty();
    let want_ladder = cfg.output.ladder.unwrap_or(true) && export_ladder.is_some();
    if !cfg.output.detectors.unwrap_or(true) {
        notes.clear(); // the skip notes only matter when detectors were wanted
    }

    let mut detector_csv = if want_detectors {
        Some(DetectorCsvWriter::create(&out_dir.join("detectors.csv"))?)
    } else {
        None
    };

    let keep_all_rows = horizon <= TRACE_CAP;
    let mut rows: Vec<RoundRecord> = Vec::new();
    let mut stashed: Option<Error> = None;

    let game = run_game_observed(
        skeptic.as_mut(),
        reality.as_mut(),
        &run_cfg,
        |n, x, bet, k| {
            if stashed.is_some() {
                return;
            }
            if keep_all_rows || emit_row(n, horizon) {
                rows.push(RoundRecord {
                    n,
                    x,
                    stake: bet.stake,
                    bet_cost: bet.total_cost(),
                    capital: k,
                });
            }
            if let Err(e) = bank.update_all(n, x) {
                stashed = Some(e);
                return;
            }
            if let Some(w) = detector_csv.as_mut() {
                if emit_row(n, horizon) {
                    for d in bank.detectors() {
                        if let Err(e) = w.row(n, d.id(), d.value()) {
                            stashed = Some(e);
                            return;
                        }
                    }
                }
            }
        },
    );

    if let Some(e) = stashed {
        return Err(anyhow!("{name}: detector or artifact failure: {e}"));
    }
    if let Some(w) = detector_csv {
        w.finish()?;
    }

    let (outcome, summary_run) = match game {
        Ok(history) => (Outcome::Pass, Some(history)),
        Err(Error::CollateralViolation {
            round,
            capital,
            tolerance,
        }) => (
            Outcome::Violation {
                round,
                detail: format!(
                    "capital {} fell below -{}",
                    format_real(capital),
                    format_real(tolerance)
                ),
            },
            None,
        ),
        Err(Error::ProtocolViolation { round, detail }) => {
            (Outcome::Violation { round, detail }, None)
        }
        Err(e) => return Err(anyhow!("{name}: run failed: {e}")),
    };

    if want_trajectory {
        let path = out_dir.join("trajectory.csv");
        if keep_all_rows && horizon > 4096 {
            let filtered: Vec<RoundRecord> = rows
                .iter()
                .copied()
                .filter(|r| emit_row(r.n, horizon))
                .collect();
            write_trajectory_csv(&path, &filtered)?;
        } else {
            write_trajectory_csv(&path, &rows)?;
        }
    }
    if want_ladder {
        write_ladder_csv(&out_dir.join("ladder.csv"), export_ladder.as_ref().unwrap())?;
    }

    let mut text = String::new();
    let _ = writeln!(text, "experiment: {name}");
    let _ = writeln!(text, "strategy: {}", skeptic.id());
    let _ = writeln!(text, "reality: {}", reality.id());
    let _ = writeln!(text, "variant: {}", cfg.game.variant);
    let _ = writeln!(text, "horizon: {horizon}");
    let _ = writeln!(text, "seed: {}", cfg.game.seed);
    let _ = writeln!(text, "status: {}", outcome.label());
    if let Outcome::Violation { round, detail } = &outcome {
        let _ = writeln!(text, "violation: round {round}: {detail}");
    }
    if let Some(h) = &summary_run {
        let _ = writeln!(text, "rounds_played: {}", h.rounds_played);
        let _ = writeln!(text, "initial_capital: {}", format_real(h.initial_capital));
        let _ = writeln!(text, "final_capital: {}", format_real(h.final_capital));
        let _ = writeln!(text, "min_capital: {}", format_real(h.min_capital));
        let _ = writeln!(text, "max_capital: {}", format_real(h.max_capital));
        if h.final_capital > 0.0 {
            let _ = writeln!(
                text,
                "log_final_capital: {}",
                format_real(h.final_capital.ln())
            );
        }
        if keep_all_rows {
            if let Some(trend) = growth_trend(&rows) {
                let _ = writeln!(
                    text,
                    "decade_log_gain: {}",
                    format_real(trend.decade_log_gain)
                );
                let _ = writeln!(
                    text,
                    "max_over_final: {}",
                    format_real(trend.max_over_final)
                );
            }
        }
        if h.warning_count > 0 {
            let _ = writeln!(text, "tolerance_band_warnings: {}", h.warning_count);
        }
    }
    for w in &warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    for n in &notes {
        let _ = writeln!(text, "note: {n}");
    }
    if !bank.is_empty() {
        let _ = writeln!(text, "detector finals:");
        for d in bank.detectors() {
            let _ = writeln!(text, "  {} = {}", d.id(), format_real(d.value()));
        }
    }
    std::fs::write(out_dir.join("summary.txt"), text)
        .with_context(|| format!("cannot write summary in {}", out_dir.display()))?;

    Ok(ExperimentReport {
        name: name.to_string(),
        outcome,
        out_dir,
    })
}

/// Monte Carlo maximal-inequality mode: many short games, a Wilson
/// interval on the exceedance probability, spike counting, and a report
/// file instead of per-round artifacts.
fn run_doob(
    cfg: &ExperimentConfig,
    name: &str,
    base_dir: &Path,
    out_dir: &Path,
) -> Result<ExperimentReport> {
    let d = cfg.doob.as_ref().unwrap();
    let level = catalog::spike_level(cfg);
    // dry builds so a config error fails before the parallel loop
    let (_, warnings) = catalog::build_skeptic(cfg)?;
    catalog::build_reality(cfg, base_dir, 0)?;

    let report = doob_check(
        |_| {
            catalog::build_skeptic(cfg)
                .map(|(s, _)| s)
                .map_err(|e| Error::Config(e.to_string()))
        },
        |run| catalog::build_reality(cfg, base_dir, run).map_err(|e| Error::Config(e.to_string())),
        level,
        d.c,
        d.runs,
        cfg.game.horizon,
    )
    .map_err(|e| anyhow!("{name}: maximal-inequality check failed to run: {e}"))?;

    let mut text = String::new();
    let _ = writeln!(text, "experiment: {name}");
    let _ = writeln!(text, "mode: maximal-inequality");
    let _ = writeln!(text, "runs: {}", report.runs);
    let _ = writeln!(text, "horizon: {}", report.horizon);
    let _ = writeln!(text, "c: {}", format_real(report.c));
    let _ = writeln!(
        text,
        "exceed_fraction: {}",
        format_real(report.exceed_fraction)
    );
    let _ = writeln!(
        text,
        "wilson_lower_99: {}",
        format_real(report.wilson_lower)
    );
    let _ = writeln!(
        text,
        "wilson_upper_99: {}",
        format_real(report.wilson_upper)
    );
    let _ = writeln!(text, "bound_1_over_c: {}", format_real(report.bound));
    let _ = writeln!(text, "pass: {}", report.pass);
    let _ = writeln!(
        text,
        "mean_spike_count: {}",
        format_real(report.mean_spike_count)
    );
    let _ = writeln!(
        text,
        "mean_max_capital: {}",
        format_real(report.mean_max_capital)
    );
    let _ = writeln!(
        text,
        "median_final_capital: {}",
        format_real(report.median_final_capital)
    );
    for w in &warnings {
        let _ = writeln!(text, "warning: {w}");
    }
    std::fs::write(out_dir.join("doob.txt"), &text)
        .with_context(|| format!("cannot write report in {}", out_dir.display()))?;
    std::fs::write(out_dir.join("summary.txt"), &text)
        .with_context(|| format!("cannot write summary in {}", out_dir.display()))?;

    let outcome = if report.pass {
        Outcome::Pass
    } else {
        Outcome::BoundFailed {
            detail: format!(
                "99% Wilson lower bound {} exceeds 1/c = {}",
                format_real(report.wilson_lower),
                format_real(report.bound)
            ),
        }
    };
    Ok(ExperimentReport {
        name: name.to_string(),
        outcome,
        out_dir: out_dir.to_path_buf(),
    })
}
