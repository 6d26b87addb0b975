//! The powered-exponent analogues of the hedge-set strategies, for forcing
//! the averaged law at rate n^(1/r) with r in (1, 2): spread counting and
//! trapezoid buying move to the |x|^r level grid, the clipped-move bettor
//! keeps plain calls but moves its strikes and stake denominators to
//! n^(1/r).

use super::countable::{
    epsilon_hedged_on, spread_count_forcer, variance_forcer_powered, EpsilonHedged,
    ScheduledTicketBuyer, StakeDenominator, TrapezoidVarianceForcer,
};
use super::{combine_strategies, CombinedSkeptic};
use crate::engine::SkepticStrategy;
use crate::error::{Error, Result};
use crate::hedge::ladder::{LadderFamily, PriceLadder};
use crate::hedge::measure::PricingMeasure;

/// Inputs of the powered strategy family: the two ladders every component
/// prices off (powered-call payoffs at integer levels, plain calls at the
/// n^(1/r) strike grid), both built from one measure, plus the betting
/// fraction for the multiplicative pair.
#[derive(Clone, Debug)]
pub struct MzContext {
    pub r: f64,
    /// (|x|^r - k)+ at integer levels k; prices nu_kr.
    pub ladder_powered: PriceLadder,
    /// (|x| - k^(1/r))+ : what the round-n call at strike n^(1/r) costs.
    pub ladder_root_strikes: PriceLadder,
    pub epsilon: f64,
    warnings: Vec<String>,
}

impl MzContext {
    /// Build both ladders from the measure. The measure must price |x|^r
    /// (a finite r-th absolute moment). `epsilon = None` picks 0.9 times
    /// the ceiling 1/(2(1 + nu_0)) with nu_0 the strike-zero call price.
    pub fn new(measure: &PricingMeasure, r: f64, epsilon: Option<f64>) -> Result<Self> {
        let ladder_powered =
            PriceLadder::from_measure(measure, LadderFamily::PoweredCall { r }, 8)?;
        let ladder_root_strikes =
            PriceLadder::from_measure(measure, LadderFamily::CallAtPoweredStrikes { r }, 8)?;
        let ceiling = 1.0 / (2.0 * (1.0 + ladder_root_strikes.nu0()));
        let mut warnings = Vec::new();
        let epsilon = match epsilon {
            Some(e) => {
                if !(e.is_finite() && e > 0.0 && e < 1.0) {
                    return Err(Error::Config(format!(
                        "epsilon must lie in (0, 1), got {e}"
                    )));
                }
                if e > ceiling * (1.0 + 1e-12) {
                    warnings.push(format!(
                        "epsilon {e} exceeds the collateral-safety ceiling {ceiling}"
                    ));
                }
                e
            }
            None => 0.9 * ceiling,
        };
        Ok(MzContext {
            r,
            ladder_powered,
            ladder_root_strikes,
            epsilon,
            warnings,
        })
    }

    pub fn epsilon_ceiling(&self) -> f64 {
        1.0 / (2.0 * (1.0 + self.ladder_root_strikes.nu0()))
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Counts rounds with |x_n| >= n^(1/r) through powered-level spreads.
pub fn spread_count_forcer_powered(ctx: &MzContext) -> Result<ScheduledTicketBuyer> {
    spread_count_forcer(ctx.ladder_powered.clone())
}

/// Clipped-move bettor on the n^(1/r) strike grid, stake divided by the
/// strike itself so the per-round factor keeps its floor.
pub fn epsilon_hedged_powered(ctx: &MzContext, mirror: bool) -> Result<EpsilonHedged> {
    let r = ctx.r;
    let id = if mirror {
        format!("eps-hedged-r{r}-mirror")
    } else {
        format!("eps-hedged-r{r}")
    };
    epsilon_hedged_on(
        ctx.ladder_root_strikes.clone(),
        ctx.epsilon,
        mirror,
        StakeDenominator::Strike,
        id,
    )
}

/// Powered trapezoid buyer over this context's level ladder.
pub fn variance_forcer_mz(ctx: &MzContext) -> Result<TrapezoidVarianceForcer> {
    variance_forcer_powered(ctx.ladder_powered.clone())
}

/// Equal-weight mixture of the four powered components. On any path where
/// its capital stays bounded, the running means S_n / n^(1/r) converge to
/// zero.
pub fn mz_mixture(ctx: &MzContext) -> Result<CombinedSkeptic> {
    let parts: Vec<(Box<dyn SkepticStrategy>, f64)> = vec![
        (Box::new(spread_count_forcer_powered(ctx)?), 0.25),
        (Box::new(variance_forcer_mz(ctx)?), 0.25),
        (Box::new(epsilon_hedged_powered(ctx, false)?), 0.25),
        (Box::new(epsilon_hedged_powered(ctx, true)?), 0.25),
    ];
    combine_strategies(format!("mz-forcer-r{}", ctx.r), parts)
}
