//! Builders from config sections to engine objects. Every function is
//! pure over the config so doob-style Monte Carlo can rebuild fresh
//! players per run.

use crate::config::ExperimentConfig;
use anyhow::{anyhow, bail, Context, Result};
use gtpsim_core::*;
use std::path::Path;

const SINGLE_IDS: &[&str] = &[
    "null",
    "bc-single",
    "weighted-bc-single",
    "eps-single",
    "slln-single",
    "slln-single-weak",
];
const HEDGE_SET_IDS: &[&str] = &[
    "null",
    "spread-count",
    "trapezoid-variance",
    "eps-hedged",
    "slln-hedge-set",
];
const MZ_IDS: &[&str] = &[
    "null",
    "spread-count-r",
    "trapezoid-variance-r",
    "eps-hedged-r",
    "mz-forcer",
];

pub fn build_measure(cfg: &ExperimentConfig) -> Result<PricingMeasure> {
    let m = cfg
        .measure
        .as_ref()
        .ok_or_else(|| anyhow!("config: a [measure] section is required here"))?;
    let built = match m.kind.as_str() {
        "uniform" => {
            let points = m.points.as_ref().ok_or_else(|| {
                anyhow!("config: [measure].points is required for kind 'uniform'")
            })?;
            PricingMeasure::uniform_on(points)
        }
        "discrete" => {
            let atoms = m.atoms.as_ref().ok_or_else(|| {
                anyhow!("config: [measure].atoms is required for kind 'discrete'")
            })?;
            PricingMeasure::discrete(atoms.iter().map(|a| (a[0], a[1])).collect())
        }
        "exponential" => {
            let rate = m.rate.ok_or_else(|| {
                anyhow!("config: [measure].rate is required for kind 'exponential'")
            })?;
            PricingMeasure::two_sided_exponential(rate)
        }
        "pareto" => {
            let tail = m.tail_index.ok_or_else(|| {
                anyhow!("config: [measure].tail_index is required for kind 'pareto'")
            })?;
            PricingMeasure::two_sided_pareto(tail, m.scale.unwrap_or(1.0))
        }
        other => bail!(
            "config: [measure].kind '{other}' is unknown (uniform, discrete, exponential, pareto)"
        ),
    };
    built.map_err(|e| anyhow!("config: [measure] rejected: {e}"))
}

pub fn build_hedge_kind(cfg: &ExperimentConfig) -> Result<HedgeKind> {
    let h = cfg
        .hedge
        .as_ref()
        .ok_or_else(|| anyhow!("config: a [hedge] section is required here"))?;
    let kind = match h.kind.as_str() {
        "power" => HedgeKind::power(
            h.exponent
                .ok_or_else(|| anyhow!("config: [hedge].exponent is required for kind 'power'"))?,
        ),
        "call" => HedgeKind::call(
            h.strike
                .ok_or_else(|| anyhow!("config: [hedge].strike is required for kind 'call'"))?,
        ),
        "powered-call" => HedgeKind::powered_call(
            h.r.ok_or_else(|| anyhow!("config: [hedge].r is required for kind 'powered-call'"))?,
            h.level.ok_or_else(|| {
                anyhow!("config: [hedge].level is required for kind 'powered-call'")
            })?,
        ),
        "abs" => HedgeKind::Symmetric(SymmetricFn::Abs),
        "abs-log-sq" => HedgeKind::Symmetric(SymmetricFn::AbsLogSq),
        "abs-log1p" => HedgeKind::Symmetric(SymmetricFn::AbsLog1p),
        "constant" => {
            HedgeKind::Symmetric(SymmetricFn::Constant(h.value.ok_or_else(|| {
                anyhow!("config: [hedge].value is required for kind 'constant'")
            })?))
        }
        "table" => {
            let knots = h
                .knots
                .as_ref()
                .ok_or_else(|| anyhow!("config: [hedge].knots is required for kind 'table'"))?;
            HedgeKind::Symmetric(SymmetricFn::Table(
                knots.iter().map(|k| (k[0], k[1])).collect(),
            ))
        }
        other => bail!("config: [hedge].kind '{other}' is unknown"),
    };
    kind.validate()
        .map_err(|e| anyhow!("config: [hedge] rejected: {e}"))?;
    Ok(kind)
}

/// The hedge together with its price: explicit [hedge].nu wins, otherwise
/// the hedge is priced under [measure].
pub fn build_priced_hedge(cfg: &ExperimentConfig) -> Result<(HedgeKind, f64)> {
    let kind = build_hedge_kind(cfg)?;
    let nu = match cfg.hedge.as_ref().and_then(|h| h.nu) {
        Some(nu) => nu,
        None => {
            let m = build_measure(cfg).context(
                "config: [hedge].nu is absent, so the hedge must be priced under [measure]",
            )?;
            price_hedge(&m, &kind).map_err(|e| anyhow!("config: pricing [hedge] failed: {e}"))?
        }
    };
    Ok((kind, nu))
}

fn ladder_depth(cfg: &ExperimentConfig) -> usize {
    cfg.ladder.as_ref().and_then(|l| l.depth).unwrap_or(64)
}

/// The plain integer-strike ladder the hedge-set strategies price off.
pub fn build_call_ladder(cfg: &ExperimentConfig) -> Result<PriceLadder> {
    if let Some(l) = &cfg.ladder {
        if l.family != "call" {
            bail!(
                "config: [strategy].id '{}' prices off the integer-strike family, but [ladder].family is '{}'",
                cfg.strategy.id,
                l.family
            );
        }
    }
    let m = build_measure(cfg).context("config: the hedge-set ladder needs a [measure]")?;
    PriceLadder::from_measure(&m, LadderFamily::Call, ladder_depth(cfg))
        .map_err(|e| anyhow!("config: building the [ladder] failed: {e}"))
}

fn mz_exponent(cfg: &ExperimentConfig) -> Result<f64> {
    cfg.strategy
        .r
        .or_else(|| cfg.ladder.as_ref().and_then(|l| l.r))
        .ok_or_else(|| anyhow!("config: an mz strategy needs [strategy].r (or [ladder].r)"))
}

fn wrap_modifiers(
    cfg: &ExperimentConfig,
    mut skeptic: Box<dyn SkepticStrategy>,
) -> Result<Box<dyn SkepticStrategy>> {
    let s = &cfg.strategy;
    match (s.upcross_a, s.upcross_b) {
        (Some(a), Some(b)) => {
            skeptic = Box::new(
                upcrossing_overlay(skeptic, a, b)
                    .map_err(|e| anyhow!("config: [strategy].upcross_a/b rejected: {e}"))?,
            );
        }
        (None, None) => {}
        _ => bail!("config: [strategy].upcross_a and upcross_b must be given together"),
    }
    if let Some(f) = s.scale {
        skeptic = Box::new(
            scale_strategy(skeptic, f)
                .map_err(|e| anyhow!("config: [strategy].scale rejected: {e}"))?,
        );
    }
    Ok(skeptic)
}

/// Build the configured skeptic plus any construction warnings (for
/// example an epsilon above its collateral-safety ceiling).
pub fn build_skeptic(cfg: &ExperimentConfig) -> Result<(Box<dyn SkepticStrategy>, Vec<String>)> {
    let variant = cfg.game.variant.as_str();
    let id = cfg.strategy.id.as_str();
    let allowed: &[&str] = match variant {
        "single-hedge" => SINGLE_IDS,
        "hedge-set" => HEDGE_SET_IDS,
        "mz" => MZ_IDS,
        other => bail!("config: [game].variant '{other}' is unknown (single-hedge, hedge-set, mz)"),
    };
    if !allowed.contains(&id) {
        bail!(
            "config: [strategy].id '{id}' does not play the {variant} game (choose from: {})",
            allowed.join(", ")
        );
    }

    let mirror = cfg.strategy.mirror.unwrap_or(false);
    let mut warnings = Vec::new();
    let build_err = |e: Error| anyhow!("config: [strategy] '{id}' cannot be built: {e}");

    let skeptic: Box<dyn SkepticStrategy> = match id {
        "null" => Box::new(NullSkeptic::new()),
        "bc-single" | "weighted-bc-single" | "eps-single" | "slln-single" | "slln-single-weak" => {
            let (hedge, nu) = build_priced_hedge(cfg)?;
            let cutoff = cfg.strategy.cutoff.unwrap_or(1.0);
            let ctx = SingleHedgeContext::new(hedge, nu, cutoff, cfg.strategy.epsilon)
                .map_err(build_err)?;
            warnings.extend(ctx.warnings().iter().cloned());
            match id {
                "bc-single" => Box::new(inverse_payoff_buyer(ctx).map_err(build_err)?),
                "weighted-bc-single" => Box::new(
                    weighted_inverse_buyer(ctx, cfg.strategy.weight_exp.unwrap_or(2.0))
                        .map_err(build_err)?,
                ),
                "eps-single" => Box::new(epsilon_single(ctx, mirror).map_err(build_err)?),
                "slln-single" => Box::new(slln_single_mixture(ctx).map_err(build_err)?),
                _ => Box::new(slln_single_weak_mixture(ctx).map_err(build_err)?),
            }
        }
        "spread-count" | "trapezoid-variance" | "eps-hedged" | "slln-hedge-set" => {
            let ladder = build_call_ladder(cfg)?;
            match id {
                "spread-count" => Box::new(spread_count_forcer(ladder).map_err(build_err)?),
                "trapezoid-variance" => Box::new(variance_forcer(ladder).map_err(build_err)?),
                _ => {
                    let ctx = CountableHedgeContext::new(ladder, cfg.strategy.epsilon)
                        .map_err(build_err)?;
                    warnings.extend(ctx.warnings().iter().cloned());
                    if id == "eps-hedged" {
                        Box::new(epsilon_hedged(&ctx, mirror).map_err(build_err)?)
                    } else {
                        Box::new(slln_hedge_set_mixture(&ctx).map_err(build_err)?)
                    }
                }
            }
        }
        _ => {
            let r = mz_exponent(cfg)?;
            let m = build_measure(cfg).context("config: mz strategies price under [measure]")?;
            let ctx = MzContext::new(&m, r, cfg.strategy.epsilon).map_err(build_err)?;
            warnings.extend(ctx.warnings().iter().cloned());
            match id {
                "spread-count-r" => Box::new(spread_count_forcer_powered(&ctx).map_err(build_err)?),
                "trapezoid-variance-r" => Box::new(variance_forcer_mz(&ctx).map_err(build_err)?),
                "eps-hedged-r" => {
                    Box::new(epsilon_hedged_powered(&ctx, mirror).map_err(build_err)?)
                }
                _ => Box::new(mz_mixture(&ctx).map_err(build_err)?),
            }
        }
    };

    wrap_modifiers(cfg, skeptic).map(|s| (s, warnings))
}

/// Build the configured reality. `stream` separates RNG streams between
/// runs of one experiment; the per-run seed stays [game].seed.
pub fn build_reality(
    cfg: &ExperimentConfig,
    base_dir: &Path,
    stream: u64,
) -> Result<Box<dyn RealityStrategy>> {
    let r = &cfg.reality;
    let built: Box<dyn RealityStrategy> = match r.id.as_str() {
        "zeros" => Box::new(DeterministicReality::new(PathKind::Zeros)),
        "constant" => Box::new(DeterministicReality::new(PathKind::Constant(
            r.value.unwrap_or(1.0),
        ))),
        "alternating" => Box::new(DeterministicReality::new(PathKind::Alternating(
            r.value.unwrap_or(1.0),
        ))),
        "spike" => Box::new(DeterministicReality::new(PathKind::Spike)),
        "harmonic-drift" => Box::new(DeterministicReality::new(PathKind::HarmonicDrift)),
        "iid" => {
            let m = build_measure(cfg).context("config: [reality] 'iid' samples [measure]")?;
            Box::new(IidReality::new(m, cfg.game.seed, stream))
        }
        "adversary-power" => {
            let rr = r
                .r
                .ok_or_else(|| anyhow!("config: [reality].r is required for 'adversary-power'"))?;
            let nu = r
                .nu
                .ok_or_else(|| anyhow!("config: [reality].nu is required for 'adversary-power'"))?;
            Box::new(
                PowerSpikeAdversary::new(rr, nu, cfg.game.seed, stream)
                    .map_err(|e| anyhow!("config: [reality] rejected: {e}"))?,
            )
        }
        "adversary-hedge" => {
            let nu = r
                .nu
                .ok_or_else(|| anyhow!("config: [reality].nu is required for 'adversary-hedge'"))?;
            let hedge = build_hedge_kind(cfg)
                .context("config: [reality] 'adversary-hedge' calibrates to the [hedge] section")?;
            Box::new(
                HedgeSpikeAdversary::new(hedge, nu, cfg.game.seed, stream)
                    .map_err(|e| anyhow!("config: [reality] rejected: {e}"))?,
            )
        }
        "replay" => {
            let rel = r
                .path
                .as_ref()
                .ok_or_else(|| anyhow!("config: [reality].path is required for 'replay'"))?;
            let path = base_dir.join(rel);
            let moves = read_path_csv(&path)
                .map_err(|e| anyhow!("config: [reality].path {}: {e}", path.display()))?;
            if (moves.len() as u64) < cfg.game.horizon {
                bail!(
                    "config: [reality].path holds {} moves but [game].horizon is {}",
                    moves.len(),
                    cfg.game.horizon
                );
            }
            Box::new(ReplayReality::new(moves))
        }
        other => bail!(
            "config: [reality].id '{other}' is unknown (zeros, constant, alternating, spike, \
             harmonic-drift, iid, adversary-power, adversary-hedge, replay)"
        ),
    };
    Ok(built)
}

/// Spike magnitude at round n for the configured reality, used by the
/// maximal-inequality runner to count threshold hits. Zero disables
/// counting.
pub fn spike_level(cfg: &ExperimentConfig) -> impl Fn(u64) -> f64 + Sync {
    enum Level {
        PowerRoot(f64),
        Round,
        None,
    }
    let level = match cfg.reality.id.as_str() {
        "adversary-power" => match cfg.reality.r {
            Some(r) if r != 1.0 => Level::PowerRoot(1.0 / r),
            Some(_) => Level::Round,
            None => Level::None,
        },
        "adversary-hedge" => Level::Round,
        _ => Level::None,
    };
    move |n: u64| match level {
        Level::PowerRoot(inv_r) => (n as f64).powf(inv_r),
        Level::Round => n as f64,
        Level::None => 0.0,
    }
}

/// Detectors appropriate for the configured game: the powered set for mz
/// runs, the plain set when a hedge and a measure are both given. Missing
/// pieces skip detectors with a note instead of failing the run.
pub fn build_detector_bank(cfg: &ExperimentConfig) -> Result<(DetectorBank, Vec<String>)> {
    let mut notes = Vec::new();
    if cfg.game.variant == "mz" {
        let r = mz_exponent(cfg)?;
        let m = build_measure(cfg)?;
        let ladder = PriceLadder::from_measure(&m, LadderFamily::CallAtPoweredStrikes { r }, 8)
            .map_err(|e| anyhow!("config: building the detector ladder failed: {e}"))?;
        let set = powered_detector_set(ladder)
            .map_err(|e| anyhow!("config: building detectors failed: {e}"))?;
        return Ok((DetectorBank::new(set), notes));
    }
    if cfg.hedge.is_none() {
        notes.push("detectors skipped: no [hedge] section".to_string());
        return Ok((DetectorBank::new(Vec::new()), notes));
    }
    if cfg.measure.is_none() {
        notes.push("detectors skipped: no [measure] section to price the call ladder".to_string());
        return Ok((DetectorBank::new(Vec::new()), notes));
    }
    let (hedge, _) = build_priced_hedge(cfg)?;
    let m = build_measure(cfg)?;
    let ladder = PriceLadder::from_measure(&m, LadderFamily::Call, 8)
        .map_err(|e| anyhow!("config: building the detector ladder failed: {e}"))?;
    let set = plain_detector_set(hedge, ladder)
        .map_err(|e| anyhow!("config: building detectors failed: {e}"))?;
    Ok((DetectorBank::new(set), notes))
}

/// The ladder exported to ladder.csv, when one is part of the experiment.
pub fn build_export_ladder(cfg: &ExperimentConfig) -> Result<Option<PriceLadder>> {
    match cfg.game.variant.as_str() {
        "hedge-set" => Ok(Some(build_call_ladder(cfg)?)),
        "mz" => {
            let r = mz_exponent(cfg)?;
            let m = build_measure(cfg)?;
            let depth = ladder_depth(cfg);
            let fam = match cfg.ladder.as_ref().map(|l| l.family.as_str()) {
                None | Some("powered-call") => LadderFamily::PoweredCall { r },
                Some("call-at-powered-strikes") => LadderFamily::CallAtPoweredStrikes { r },
                Some(other) => bail!(
                    "config: [ladder].family '{other}' does not belong to an mz game \
                     (powered-call, call-at-powered-strikes)"
                ),
            };
            Ok(Some(PriceLadder::from_measure(&m, fam, depth).map_err(
                |e| anyhow!("config: building the [ladder] failed: {e}"),
            )?))
        }
        _ => match &cfg.ladder {
            None => Ok(None),
            Some(_) => Ok(Some(build_call_ladder(cfg)?)),
        },
    }
}
