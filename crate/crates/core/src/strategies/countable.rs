//! Strategies for the game that admits a list of priced tickets per round,
//! all built over a call-price ladder: a budgeted ticket schedule, the
//! bull-spread counter, the weighted trapezoid buyer, and the
//! multiplicative bettor on clipped moves.

use super::{combine_strategies, CapitalTracker, CombinedSkeptic};
use crate::engine::{trapezoid_weight, BetPart, ProtocolVariant, RoundBet, SkepticStrategy};
use crate::error::{Error, Result};
use crate::hedge::ladder::{strike_at, LadderFamily, PriceLadder};
use crate::hedge::{HedgeKind, PricedHedge};
use crate::numeric::{zeta_tail, KahanSum};

/// Inputs shared by the hedge-set strategies: a plain-call ladder and the
/// betting fraction for the multiplicative components.
#[derive(Clone, Debug)]
pub struct CountableHedgeContext {
    pub ladder: PriceLadder,
    pub epsilon: f64,
    warnings: Vec<String>,
}

impl CountableHedgeContext {
    /// `epsilon = None` picks 0.9 times the ceiling 1/(2(1 + nu_0)).
    /// Larger values are accepted with a warning for demonstration runs.
    pub fn new(ladder: PriceLadder, epsilon: Option<f64>) -> Result<Self> {
        if ladder.family() != LadderFamily::Call {
            return Err(Error::Config(
                "the hedge-set strategies price off a plain integer-strike call ladder".into(),
            ));
        }
        let ceiling = 1.0 / (2.0 * (1.0 + ladder.nu0()));
        let mut warnings = Vec::new();
        let epsilon = match epsilon {
            Some(e) => {
                if !(e.is_finite() && e > 0.0 && e < 1.0) {
                    return Err(Error::Config(format!(
                        "epsilon must lie in (0, 1), got {e}"
                    )));
                }
                if e >= ceiling * (1.0 + 1e-12) {
                    warnings.push(format!(
                        "epsilon {e} is at or above the collateral-safety ceiling {ceiling}"
                    ));
                }
                e
            }
            None => 0.9 * ceiling,
        };
        Ok(CountableHedgeContext {
            ladder,
            epsilon,
            warnings,
        })
    }

    pub fn epsilon_ceiling(&self) -> f64 {
        1.0 / (2.0 * (1.0 + self.ladder.nu0()))
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Buys a prescribed ticket list each round, everything scaled by one over
/// the schedule's total price, so the whole game spends at most the
/// starting capital and K_n is at least the scaled sum of collected
/// payoffs.
pub struct ScheduledTicketBuyer {
    tickets: Box<dyn FnMut(u64) -> Result<Vec<BetPart>> + Send>,
    scale: f64,
    id: String,
}

/// `total_price` must bound the unscaled schedule's overall cost.
pub fn scheduled_ticket_buyer(
    id: impl Into<String>,
    total_price: f64,
    tickets: impl FnMut(u64) -> Result<Vec<BetPart>> + Send + 'static,
) -> Result<ScheduledTicketBuyer> {
    let id = id.into();
    if !(total_price.is_finite() && total_price > 0.0) {
        return Err(Error::StrategyConstruction {
            strategy: id,
            detail: format!(
                "ticket schedule needs a positive finite total price, got {total_price}"
            ),
        });
    }
    Ok(ScheduledTicketBuyer {
        tickets: Box::new(tickets),
        scale: 1.0 / total_price,
        id,
    })
}

impl SkepticStrategy for ScheduledTicketBuyer {
    fn id(&self) -> &str {
        &self.id
    }

    fn variant(&self) -> ProtocolVariant {
        ProtocolVariant::HedgeSet
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        let parts = (self.tickets)(n)?;
        Ok(RoundBet { stake: 0.0, parts }.scaled(self.scale))
    }

    fn observe(&mut self, _n: u64, _x: f64) {}
}

/// Buys one unit of the (n-1)-th bull spread at round n, scaled by 1/nu_0.
/// The spread prices telescope, so the whole game costs at most the
/// starting capital, while each round whose move reaches the n-th strike
/// pays at least 1/nu_0. Works on the integer-strike and powered-level
/// families.
pub fn spread_count_forcer(mut ladder: PriceLadder) -> Result<ScheduledTicketBuyer> {
    let family = ladder.family();
    let id = match family {
        LadderFamily::Call => "spread-count".to_string(),
        LadderFamily::PoweredCall { r } => format!("spread-count-r{r}"),
        LadderFamily::CallAtPoweredStrikes { .. } => {
            return Err(Error::Config(
                "spread counting needs unit-height spreads; use the integer-strike or \
                 powered-level family"
                    .into(),
            ))
        }
    };
    let nu0 = ladder.nu0();
    if nu0 <= 0.0 {
        return Err(Error::StrategyConstruction {
            strategy: id,
            detail: "needs nu_0 > 0; the measure puts no mass beyond 0".into(),
        });
    }
    scheduled_ticket_buyer(id, nu0, move |n| {
        let idx = n as usize;
        ladder.ensure_depth(idx)?;
        let unit_price = ladder.price(idx - 1)? - ladder.price(idx)?;
        Ok(vec![BetPart::Spread {
            family,
            index: n - 1,
            units: 1.0,
            unit_price,
        }])
    })
}

/// Buys the first n trapezoids at round n, the k-th weighted by (k+1)^e
/// and everything scaled by 1/(budget * n^e). The infinite-horizon spend
/// is sum_k (k+1)^e mu_k zeta_tail(e, k+1), certified at construction to
/// fit the budget, so capital keeps the floor
/// K_n >= 1 - spend + (1/budget) sum_i x_i^2 I(level_i <= i)/i^e.
pub struct TrapezoidVarianceForcer {
    ladder: PriceLadder,
    weight_exp: f64,
    budget: f64,
    certified_total: f64,
    acc: KahanSum,
    id: String,
}

/// Scale constant for the powered-level budget: 3*2^(q-1)/(q-1) with
/// q = 2/r.
pub fn powered_budget_constant(r: f64) -> f64 {
    let q = 2.0 / r;
    3.0 * 2f64.powf(q - 1.0) / (q - 1.0)
}

pub(crate) fn certify_spend(
    ladder: &mut PriceLadder,
    weight_exp: f64,
    budget: f64,
    id: &str,
) -> Result<f64> {
    const CAP: usize = 400_000;
    let mut total = KahanSum::new(0.0);
    let mut quiet = 0u32;
    let mut k = 0usize;
    loop {
        if ladder.ensure_depth(k + 2).is_err() {
            return Err(Error::StrategyConstruction {
                strategy: id.to_string(),
                detail: format!(
                    "ladder ends at depth {} with spend terms still material; \
                     cannot certify the budget",
                    ladder.depth()
                ),
            });
        }
        let mu = ladder.mu(k)?.max(0.0);
        let term =
            trapezoid_weight(k as u64, weight_exp) * mu * zeta_tail(weight_exp, (k + 1) as u64);
        total.add(term);
        if term <= 1e-9 * total.value().max(1e-300) {
            quiet += 1;
            if quiet >= 8 {
                break;
            }
        } else {
            quiet = 0;
        }
        k += 1;
        if k > CAP {
            return Err(Error::StrategyConstruction {
                strategy: id.to_string(),
                detail: format!(
                    "spend certification did not converge within {CAP} ladder levels"
                ),
            });
        }
    }
    let total = total.value();
    if total > budget * (1.0 + 1e-12) {
        return Err(Error::BudgetExceeded {
            strategy: id.to_string(),
            total,
            budget,
        });
    }
    Ok(total)
}

fn build_variance_forcer(
    mut ladder: PriceLadder,
    weight_exp: f64,
    budget: f64,
    id: String,
) -> Result<TrapezoidVarianceForcer> {
    let certified_total = certify_spend(&mut ladder, weight_exp, budget, &id)?;
    Ok(TrapezoidVarianceForcer {
        ladder,
        weight_exp,
        budget,
        certified_total,
        acc: KahanSum::new(0.0),
        id,
    })
}

/// Integer-strike trapezoids, squared weights, budget 6*nu_0.
pub fn variance_forcer(ladder: PriceLadder) -> Result<TrapezoidVarianceForcer> {
    if ladder.family() != LadderFamily::Call {
        return Err(Error::Config(
            "the squared-weight trapezoid buyer runs on the integer-strike family".into(),
        ));
    }
    let budget = 6.0 * ladder.nu0();
    build_variance_forcer(ladder, 2.0, budget, "trapezoid-variance".into())
}

/// Powered-level trapezoids with weights (k+1)^(2/r) and budget
/// B_r * nu_0r. The squared weights the plain family uses overshoot every
/// budget here; see the unit test pinning that arithmetic.
pub fn variance_forcer_powered(ladder: PriceLadder) -> Result<TrapezoidVarianceForcer> {
    let r = match ladder.family() {
        LadderFamily::PoweredCall { r } => r,
        _ => {
            return Err(Error::Config(
                "the powered trapezoid buyer runs on the powered-level family".into(),
            ))
        }
    };
    let budget = powered_budget_constant(r) * ladder.nu0();
    build_variance_forcer(
        ladder,
        2.0 / r,
        budget,
        format!("trapezoid-variance-r{r}"),
    )
}

impl TrapezoidVarianceForcer {
    /// (certified infinite-horizon spend, budget it must fit).
    pub fn certified_spend(&self) -> (f64, f64) {
        (self.certified_total, self.budget)
    }

    pub fn family(&self) -> LadderFamily {
        self.ladder.family()
    }

    pub fn weight_exp(&self) -> f64 {
        self.weight_exp
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }
}

impl SkepticStrategy for TrapezoidVarianceForcer {
    fn id(&self) -> &str {
        &self.id
    }

    fn variant(&self) -> ProtocolVariant {
        ProtocolVariant::HedgeSet
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        let idx = n as usize;
        self.ladder.ensure_depth(idx + 1)?;
        let w_top = trapezoid_weight(n - 1, self.weight_exp);
        self.acc.add(w_top * self.ladder.mu(idx - 1)?);
        Ok(RoundBet {
            stake: 0.0,
            parts: vec![BetPart::TrapezoidBundle {
                family: self.ladder.family(),
                weight_exp: self.weight_exp,
                count: n,
                unit_scale: 1.0 / (self.budget * w_top),
                weighted_price_sum: self.acc.value(),
            }],
        })
    }

    fn observe(&mut self, _n: u64, _x: f64) {}
}

/// How the multiplicative clipped-move bettor divides its stake by the
/// round index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StakeDenominator {
    /// Divide by n. The natural choice for the integer-strike grid.
    Round,
    /// Divide by the n-th strike (n^(1/r) on a powered-strike grid),
    /// matching the clip level so the per-round factor stays above 1/2.
    Strike,
}

/// Multiplicative strategy on clipped moves: stakes eps*K/d_n on the move
/// (against it when mirrored) plus eps*K/d_n call units at the n-th
/// strike, so capital evolves by 1 + (eps/d_n)(m - nu_n) where m is the
/// clipped move, m >= -strike_n.
pub struct EpsilonHedged {
    ladder: PriceLadder,
    eps: f64,
    sign: f64,
    denominator: StakeDenominator,
    tracker: CapitalTracker,
    id: String,
}

/// Integer-strike version; divides by the round index.
pub fn epsilon_hedged(ctx: &CountableHedgeContext, mirror: bool) -> Result<EpsilonHedged> {
    Ok(EpsilonHedged {
        ladder: ctx.ladder.clone(),
        eps: ctx.epsilon,
        sign: if mirror { -1.0 } else { 1.0 },
        denominator: StakeDenominator::Round,
        tracker: CapitalTracker::new(1.0),
        id: if mirror {
            "eps-hedged-mirror".into()
        } else {
            "eps-hedged".into()
        },
    })
}

/// General constructor used by the powered-strike analogue.
pub fn epsilon_hedged_on(
    ladder: PriceLadder,
    epsilon: f64,
    mirror: bool,
    denominator: StakeDenominator,
    id: impl Into<String>,
) -> Result<EpsilonHedged> {
    match ladder.family() {
        LadderFamily::Call | LadderFamily::CallAtPoweredStrikes { .. } => {}
        LadderFamily::PoweredCall { .. } => {
            return Err(Error::Config(
                "the clipped-move bettor needs a plain-call strike grid".into(),
            ))
        }
    }
    if !(epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(EpsilonHedged {
        ladder,
        eps: epsilon,
        sign: if mirror { -1.0 } else { 1.0 },
        denominator,
        tracker: CapitalTracker::new(1.0),
        id: id.into(),
    })
}

impl SkepticStrategy for EpsilonHedged {
    fn id(&self) -> &str {
        &self.id
    }

    fn variant(&self) -> ProtocolVariant {
        ProtocolVariant::HedgeSet
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        let idx = n as usize;
        self.ladder.ensure_depth(idx)?;
        let strike = strike_at(self.ladder.family(), idx);
        let denom = match self.denominator {
            StakeDenominator::Round => n as f64,
            StakeDenominator::Strike => strike,
        };
        let u = self.eps * self.tracker.capital() / denom;
        let bet = RoundBet {
            stake: self.sign * u,
            parts: vec![BetPart::Hedge {
                hedge: PricedHedge::new(HedgeKind::call(strike), self.ladder.price(idx)?)?,
                units: u,
            }],
        };
        self.tracker.post(&bet);
        Ok(bet)
    }

    fn observe(&mut self, _n: u64, x: f64) {
        self.tracker.settle(x);
    }
}

/// Equal-weight mixture of the four hedge-set components: spread counter,
/// trapezoid buyer, and the clipped-move pair.
pub fn slln_hedge_set_mixture(ctx: &CountableHedgeContext) -> Result<CombinedSkeptic> {
    let parts: Vec<(Box<dyn SkepticStrategy>, f64)> = vec![
        (Box::new(spread_count_forcer(ctx.ladder.clone())?), 0.25),
        (Box::new(variance_forcer(ctx.ladder.clone())?), 0.25),
        (Box::new(epsilon_hedged(ctx, false)?), 0.25),
        (Box::new(epsilon_hedged(ctx, true)?), 0.25),
    ];
    combine_strategies("slln-hedge-set", parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_game, RunConfig};
    use crate::hedge::measure::PricingMeasure;
    use crate::reality::{DeterministicReality, PathKind, ReplayReality};

    fn exp_call_ladder(depth: usize) -> PriceLadder {
        let m = PricingMeasure::two_sided_exponential(1.0).unwrap();
        PriceLadder::from_measure(&m, LadderFamily::Call, depth).unwrap()
    }

    fn three_point_ladder(depth: usize) -> PriceLadder {
        let m = PricingMeasure::uniform_on(&[-2.0, 0.0, 2.0]).unwrap();
        PriceLadder::from_measure(&m, LadderFamily::Call, depth).unwrap()
    }

    #[test]
    fn spread_counter_grows_linearly_when_every_move_hits() {
        let ladder = exp_call_ladder(8);
        let nu0 = ladder.nu0();
        let mut s = spread_count_forcer(ladder).unwrap();
        let moves: Vec<f64> = (1..=200).map(|n| n as f64).collect();
        let mut r = ReplayReality::new(moves);
        let cfg = RunConfig::new(200, ProtocolVariant::HedgeSet);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        for rec in &h.rounds {
            assert!(rec.capital >= rec.n as f64 / nu0 - 1e-10);
        }
    }

    #[test]
    fn spread_counter_on_zeros_keeps_the_telescoped_remainder() {
        let ladder = exp_call_ladder(8);
        let nu0 = ladder.nu0();
        let mut s = spread_count_forcer(ladder).unwrap();
        let mut r = DeterministicReality::new(PathKind::Zeros);
        let cfg = RunConfig::new(400, ProtocolVariant::HedgeSet);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        // spent (nu_0 - nu_400)/nu_0; remainder nu_400/nu_0 underflows to 0
        assert!(h.min_capital >= -1e-12);
        assert!(h.final_capital.abs() < 1e-10);
        let quiet = (-30.0f64).exp() / nu0;
        assert!((h.rounds[29].capital - quiet).abs() < 1e-12);
    }

    #[test]
    fn spread_counter_rejects_fractional_height_grids() {
        let m = PricingMeasure::two_sided_exponential(1.0).unwrap();
        let ladder = PriceLadder::from_measure(
            &m,
            LadderFamily::CallAtPoweredStrikes { r: 1.5 },
            8,
        )
        .unwrap();
        assert!(spread_count_forcer(ladder).is_err());
    }

    #[test]
    fn variance_forcer_certifies_the_frozen_totals() {
        let s = variance_forcer(exp_call_ladder(8)).unwrap();
        let (total, budget) = s.certified_spend();
        assert!((total - 3.986163111586458).abs() < 1e-9);
        assert_eq!(budget, 6.0);

        let s = variance_forcer(three_point_ladder(8)).unwrap();
        let (total, budget) = s.certified_spend();
        assert!((total - 4.637739934967373).abs() < 1e-9);
        assert!((budget - 8.0).abs() < 1e-12);
    }

    #[test]
    fn variance_forcer_rejects_measures_that_break_the_budget() {
        // mass tight around zero: mu_0 stays ~1 while nu_0 shrinks
        let m = PricingMeasure::uniform_on(&[-0.5, 0.0, 0.5]).unwrap();
        let ladder = PriceLadder::from_measure(&m, LadderFamily::Call, 8).unwrap();
        match variance_forcer(ladder) {
            Err(Error::BudgetExceeded { total, budget, .. }) => {
                assert!(total > budget);
                assert!((budget - 2.0).abs() < 1e-12);
            }
            Err(other) => panic!("expected a budget failure, got {other:?}"),
            Ok(_) => panic!("expected a budget failure, got a strategy"),
        }
    }

    #[test]
    fn variance_forcer_needs_enough_ladder_to_certify() {
        let prices = vec![1.0, 0.9, 0.8, 0.7, 0.6];
        let ladder = PriceLadder::from_prices(LadderFamily::Call, prices).unwrap();
        assert!(variance_forcer(ladder).is_err());
    }

    #[test]
    fn variance_forcer_grows_on_full_sized_moves() {
        let ladder = exp_call_ladder(8);
        let nu0 = ladder.nu0();
        let mut s = variance_forcer(ladder).unwrap();
        let moves: Vec<f64> = (1..=300).map(|n| n as f64).collect();
        let mut r = ReplayReality::new(moves);
        let cfg = RunConfig::new(300, ProtocolVariant::HedgeSet);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        for rec in &h.rounds {
            // every move lands inside the truncation window with x^2/n^2 = 1
            assert!(rec.capital >= rec.n as f64 / (6.0 * nu0) - 1e-10);
        }
    }

    #[test]
    fn variance_forcer_stays_solvent_on_zeros() {
        let mut s = variance_forcer(exp_call_ladder(8)).unwrap();
        let mut r = DeterministicReality::new(PathKind::Zeros);
        let cfg = RunConfig::new(2000, ProtocolVariant::HedgeSet);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        assert!(h.min_capital >= -1e-12);
    }

    #[test]
    fn clipped_move_bettor_on_zeros_is_the_direct_product() {
        let ladder = exp_call_ladder(8);
        let ctx = CountableHedgeContext::new(ladder, None).unwrap();
        let eps = ctx.epsilon;
        let mut s = epsilon_hedged(&ctx, false).unwrap();
        let mut r = DeterministicReality::new(PathKind::Zeros);
        let cfg = RunConfig::new(200, ProtocolVariant::HedgeSet);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        let mut product = 1.0;
        for (i, rec) in h.rounds.iter().enumerate() {
            let n = (i + 1) as f64;
            product *= 1.0 - eps * (-n).exp() / n;
            assert!((rec.capital - product).abs() < 1e-12);
        }
        // the product converges near 0.8986: cheap insurance on dead paths
        assert!(h.final_capital > 0.89);
    }

    #[test]
    fn clipped_move_factor_bound_holds_on_wild_moves() {
        let ladder = exp_call_ladder(8);
        let ctx = CountableHedgeContext::new(ladder, None).unwrap();
        for mirror in [false, true] {
            let mut s = epsilon_hedged(&ctx, mirror).unwrap();
            let moves: Vec<f64> = (1..=500)
                .map(|n| {
                    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                    sign * (n as f64) * if n % 3 == 0 { 2.5 } else { 0.7 }
                })
                .collect();
            let mut r = ReplayReality::new(moves);
            let cfg = RunConfig::new(500, ProtocolVariant::HedgeSet);
            let h = run_game(&mut s, &mut r, &cfg).unwrap();
            assert!(h.min_capital >= 0.0, "mirror={mirror}");
        }
    }

    #[test]
    fn hedge_set_mixture_is_collateral_safe_on_a_rough_path() {
        let ctx = CountableHedgeContext::new(exp_call_ladder(8), None).unwrap();
        let mut s = slln_hedge_set_mixture(&ctx).unwrap();
        let moves: Vec<f64> = (1..=800)
            .map(|n| ((n * 83 % 29) as f64 - 14.0) * 0.9)
            .collect();
        let mut r = ReplayReality::new(moves);
        let cfg = RunConfig::new(800, ProtocolVariant::HedgeSet);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        assert!(h.min_capital >= -1e-12);
        assert_eq!(h.warning_count, 0);
    }

    #[test]
    fn context_flags_oversized_epsilon() {
        let ctx = CountableHedgeContext::new(exp_call_ladder(8), Some(0.49)).unwrap();
        assert_eq!(ctx.warnings().len(), 1);
        let safe = CountableHedgeContext::new(exp_call_ladder(8), Some(0.2)).unwrap();
        assert!(safe.warnings().is_empty());
    }
}
