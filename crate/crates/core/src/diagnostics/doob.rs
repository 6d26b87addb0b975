//! Monte Carlo check of the maximal inequality: a collateral-safe strategy
//! whose bets are fairly priced by the move generator cannot see its
//! running maximum reach c times the starting capital with probability
//! above 1/c. The harness estimates that probability across seeded runs,
//! wraps it in a Wilson interval, and counts how often the generator's
//! spike threshold actually fired, which is the other half of the
//! impossibility demonstrations.

use crate::engine::{run_game_observed, RealityStrategy, RunConfig, SkepticStrategy};
use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, wilson_interval, Z_99};
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct DoobReport {
    pub runs: u64,
    pub horizon: u64,
    pub c: f64,
    /// Fraction of runs whose running maximum reached c times the start.
    pub exceed_fraction: f64,
    /// 99% Wilson interval around that fraction.
    pub wilson_lower: f64,
    pub wilson_upper: f64,
    /// The maximal-inequality ceiling 1/c.
    pub bound: f64,
    /// Lower interval edge at or below the ceiling.
    pub pass: bool,
    /// Mean count, per run, of rounds whose move reached the spike level.
    pub mean_spike_count: f64,
    pub mean_max_capital: f64,
    pub median_final_capital: f64,
}

/// Run `runs` independent seeded games and report the maximal-inequality
/// estimate. The factories receive the run index and must return fresh,
/// independently seeded players; `spike_level` gives the move magnitude
/// that counts as a threshold hit at each round (levels <= 0 disable the
/// count for that round).
pub fn doob_check(
    make_skeptic: impl Fn(u64) -> Result<Box<dyn SkepticStrategy>> + Sync,
    make_reality: impl Fn(u64) -> Result<Box<dyn RealityStrategy>> + Sync,
    spike_level: impl Fn(u64) -> f64 + Sync,
    c: f64,
    runs: u64,
    horizon: u64,
) -> Result<DoobReport> {
    if !(c.is_finite() && c > 1.0) {
        return Err(Error::Config(format!(
            "the maximal inequality needs c > 1, got {c}"
        )));
    }
    if runs == 0 || horizon == 0 {
        return Err(Error::Config(format!(
            "need at least one run and one round, got {runs} runs x {horizon} rounds"
        )));
    }

    struct RunSummary {
        exceeded: bool,
        max_capital: f64,
        final_capital: f64,
        spikes: u64,
    }

    let summaries: Vec<RunSummary> = (0..runs)
        .into_par_iter()
        .map(|i| -> Result<RunSummary> {
            let mut skeptic = make_skeptic(i)?;
            let mut reality = make_reality(i)?;
            let mut cfg = RunConfig::new(horizon, skeptic.variant());
            cfg.record_trace = false;
            let mut spikes = 0u64;
            let history = run_game_observed(
                skeptic.as_mut(),
                reality.as_mut(),
                &cfg,
                |n, x, _, _| {
                    let level = spike_level(n);
                    if level > 0.0 && x.abs() >= level * (1.0 - 1e-9) {
                        spikes += 1;
                    }
                },
            )?;
            Ok(RunSummary {
                exceeded: history.max_capital >= c * history.initial_capital,
                max_capital: history.max_capital,
                final_capital: history.final_capital,
                spikes,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let hits = summaries.iter().filter(|s| s.exceeded).count() as u64;
    let (wilson_lower, wilson_upper) = wilson_interval(hits, runs, Z_99);
    let maxes: Vec<f64> = summaries.iter().map(|s| s.max_capital).collect();
    let spike_counts: Vec<f64> = summaries.iter().map(|s| s.spikes as f64).collect();
    let mut finals: Vec<f64> = summaries.iter().map(|s| s.final_capital).collect();
    finals.sort_by(|a, b| a.partial_cmp(b).expect("capitals are never NaN"));
    let median = if finals.len() % 2 == 1 {
        finals[finals.len() / 2]
    } else {
        0.5 * (finals[finals.len() / 2 - 1] + finals[finals.len() / 2])
    };
    let bound = 1.0 / c;
    Ok(DoobReport {
        runs,
        horizon,
        c,
        exceed_fraction: hits as f64 / runs as f64,
        wilson_lower,
        wilson_upper,
        bound,
        pass: wilson_lower <= bound + 1e-12,
        mean_spike_count: pairwise_sum(&spike_counts) / runs as f64,
        mean_max_capital: pairwise_sum(&maxes) / runs as f64,
        median_final_capital: median,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::NullSkeptic;
    use crate::hedge::HedgeKind;
    use crate::numeric::harmonic;
    use crate::reality::{IidReality, PowerSpikeAdversary};
    use crate::strategies::single::slln_single_weak_mixture;
    use crate::strategies::SingleHedgeContext;
    use crate::PricingMeasure;

    #[test]
    fn idle_capital_never_exceeds_anything() {
        let rep = doob_check(
            |_| Ok(Box::new(NullSkeptic::new()) as Box<dyn SkepticStrategy>),
            |i| {
                let m = PricingMeasure::two_sided_exponential(1.0).unwrap();
                Ok(Box::new(IidReality::new(m, 7, i)))
            },
            |_| 0.0,
            10.0,
            50,
            50,
        )
        .unwrap();
        assert_eq!(rep.exceed_fraction, 0.0);
        assert!(rep.pass);
        assert_eq!(rep.mean_spike_count, 0.0);
        assert_eq!(rep.median_final_capital, 1.0);
    }

    #[test]
    fn fairly_priced_bets_respect_the_maximal_bound() {
        // the adversary spends exactly the quoted |x| price in expectation,
        // so the strategy's capital is a martingale: bounded in probability,
        // not forced to infinity
        let horizon = 300u64;
        let rep = doob_check(
            |_| {
                let ctx =
                    SingleHedgeContext::new(HedgeKind::Symmetric(crate::SymmetricFn::Abs), 1.0, 0.0, None)?;
                Ok(Box::new(slln_single_weak_mixture(ctx)?) as Box<dyn SkepticStrategy>)
            },
            |i| Ok(Box::new(PowerSpikeAdversary::new(1.0, 1.0, 11, i)?)),
            |n| n as f64,
            8.0,
            48,
            horizon,
        )
        .unwrap();
        assert!(rep.pass, "wilson lower {} > {}", rep.wilson_lower, rep.bound);
        assert!(rep.median_final_capital <= 4.0);
        // spikes fire at rate 1/n once n > 1: about H_300 - 1 of them
        let expect = harmonic(horizon) - 1.0;
        assert!(
            rep.mean_spike_count > expect / 2.0 && rep.mean_spike_count < expect * 2.0,
            "mean spikes {} vs {expect}",
            rep.mean_spike_count
        );
    }

    #[test]
    fn doob_check_validates_inputs() {
        let mk = || -> Box<dyn SkepticStrategy> { Box::new(NullSkeptic::new()) };
        let mr = |i: u64| {
            let m = PricingMeasure::two_sided_exponential(1.0).unwrap();
            Box::new(IidReality::new(m, 7, i))
        };
        assert!(doob_check(|_| Ok(mk()), |i| Ok(mr(i)), |_| 0.0, 1.0, 10, 10).is_err());
        assert!(doob_check(|_| Ok(mk()), |i| Ok(mr(i)), |_| 0.0, 2.0, 0, 10).is_err());
    }
}
