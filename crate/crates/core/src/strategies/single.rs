//! Strategies for the game that admits one priced ticket per round.
//!
//! Two ticket buyers spend a bounded total (inverse-payoff and
//! inverse-square sized), and a multiplicative pair commits a fixed
//! fraction of capital per round, once with the move and once against it.
//! The shipped mixtures put these together.

use super::{combine_strategies, CapitalTracker, CombinedSkeptic, SingleHedgeContext};
use crate::engine::{BetPart, ProtocolVariant, RoundBet, SkepticStrategy};
use crate::error::{Error, Result};
use crate::hedge::PricedHedge;
use crate::numeric::zeta_tail;

/// Buys 1/(C nu h(n)) units of the payoff each active round, where C
/// bounds sum 1/h(n) from above. Total spend stays below 1, and capital
/// collects h(x_n)/(C nu h(n)) on top of that floor every round.
pub struct InversePayoffBuyer {
    ctx: SingleHedgeContext,
    inv_sum: f64,
    first: u64,
    priced: PricedHedge,
    id: String,
}

/// Requires the context's inverse-payoff series to converge.
pub fn inverse_payoff_buyer(ctx: SingleHedgeContext) -> Result<InversePayoffBuyer> {
    let inv_sum = ctx.inv_sum_upper.ok_or_else(|| Error::StrategyConstruction {
        strategy: "bc-single".into(),
        detail: format!(
            "sum of 1/{} over rounds past {} does not converge; \
             the inverse-payoff buyer cannot size its tickets",
            ctx.hedge, ctx.cutoff
        ),
    })?;
    let priced = PricedHedge::new(ctx.hedge.clone(), ctx.nu)?;
    let first = ctx.first_active_round();
    Ok(InversePayoffBuyer {
        ctx,
        inv_sum,
        first,
        priced,
        id: "bc-single".into(),
    })
}

impl SkepticStrategy for InversePayoffBuyer {
    fn id(&self) -> &str {
        &self.id
    }

    fn variant(&self) -> ProtocolVariant {
        ProtocolVariant::SingleHedge
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        if n < self.first {
            return Ok(RoundBet::null());
        }
        let hn = self.ctx.hedge.eval(n as f64);
        if hn <= 0.0 {
            return Ok(RoundBet::null());
        }
        Ok(RoundBet {
            stake: 0.0,
            parts: vec![BetPart::Hedge {
                hedge: self.priced.clone(),
                units: 1.0 / (self.inv_sum * self.ctx.nu * hn),
            }],
        })
    }

    fn observe(&mut self, _n: u64, _x: f64) {}
}

/// Buys 1/(C' nu n^p) units of the payoff each active round, with
/// C' = sum_{n >= first} n^-p. Works even when 1/h(n) is not summable;
/// capital collects h(x_n)/(C' nu n^p) per round.
pub struct WeightedInverseBuyer {
    ctx: SingleHedgeContext,
    weight_exp: f64,
    norm: f64,
    first: u64,
    priced: PricedHedge,
    id: String,
}

/// `weight_exp` is the p in ticket weights 1/n^p; p must exceed 1 or the
/// spend diverges.
pub fn weighted_inverse_buyer(
    ctx: SingleHedgeContext,
    weight_exp: f64,
) -> Result<WeightedInverseBuyer> {
    if !(weight_exp.is_finite() && weight_exp > 1.0) {
        return Err(Error::StrategyConstruction {
            strategy: "weighted-bc-single".into(),
            detail: format!(
                "ticket weights 1/n^p need p > 1 to have a finite total, got p = {weight_exp}"
            ),
        });
    }
    let first = ctx.first_active_round();
    // slight headroom keeps the float total under the bound
    let norm = zeta_tail(weight_exp, first) * (1.0 + 1e-12);
    let priced = PricedHedge::new(ctx.hedge.clone(), ctx.nu)?;
    let id = if weight_exp == 2.0 {
        "weighted-bc-single".to_string()
    } else {
        format!("weighted-bc-single(p={weight_exp})")
    };
    Ok(WeightedInverseBuyer {
        ctx,
        weight_exp,
        norm,
        first,
        priced,
        id,
    })
}

impl SkepticStrategy for WeightedInverseBuyer {
    fn id(&self) -> &str {
        &self.id
    }

    fn variant(&self) -> ProtocolVariant {
        ProtocolVariant::SingleHedge
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        if n < self.first {
            return Ok(RoundBet::null());
        }
        let w = (n as f64).powf(self.weight_exp);
        Ok(RoundBet {
            stake: 0.0,
            parts: vec![BetPart::Hedge {
                hedge: self.priced.clone(),
                units: 1.0 / (self.norm * self.ctx.nu * w),
            }],
        })
    }

    fn observe(&mut self, _n: u64, _x: f64) {}
}

/// Multiplicative strategy: stakes eps*K/n on the move (against it when
/// mirrored) and buys eps*K/h(n) units of the payoff, so capital evolves
/// by the factor 1 + eps*(sign*x/n + (h(x) - nu)/h(n)). Within the safety
/// ceiling every factor stays at or above 1/2 for moves |x| <= n.
pub struct EpsilonSingle {
    ctx: SingleHedgeContext,
    eps: f64,
    sign: f64,
    first: u64,
    priced: PricedHedge,
    tracker: CapitalTracker,
    id: String,
}

pub fn epsilon_single(ctx: SingleHedgeContext, mirror: bool) -> Result<EpsilonSingle> {
    let eps = ctx.epsilon.ok_or_else(|| Error::StrategyConstruction {
        strategy: "eps-single".into(),
        detail: format!(
            "no betting fraction available: {} vanishes at 1 and none was supplied",
            ctx.hedge
        ),
    })?;
    let priced = PricedHedge::new(ctx.hedge.clone(), ctx.nu)?;
    let first = ctx.first_active_round();
    Ok(EpsilonSingle {
        ctx,
        eps,
        sign: if mirror { -1.0 } else { 1.0 },
        first,
        priced,
        tracker: CapitalTracker::new(1.0),
        id: if mirror {
            "eps-single-mirror".into()
        } else {
            "eps-single".into()
        },
    })
}

impl SkepticStrategy for EpsilonSingle {
    fn id(&self) -> &str {
        &self.id
    }

    fn variant(&self) -> ProtocolVariant {
        ProtocolVariant::SingleHedge
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        let bet = if n < self.first {
            RoundBet::null()
        } else {
            let hn = self.ctx.hedge.eval(n as f64);
            if hn <= 0.0 {
                RoundBet::null()
            } else {
                let k = self.tracker.capital();
                RoundBet {
                    stake: self.sign * self.eps * k / n as f64,
                    parts: vec![BetPart::Hedge {
                        hedge: self.priced.clone(),
                        units: self.eps * k / hn,
                    }],
                }
            }
        };
        self.tracker.post(&bet);
        Ok(bet)
    }

    fn observe(&mut self, _n: u64, x: f64) {
        self.tracker.settle(x);
    }
}

/// Equal-weight mixture of the four single-hedge components: both ticket
/// buyers and the multiplicative pair. Forces the sample mean to zero on
/// any path where capital stays bounded.
pub fn slln_single_mixture(ctx: SingleHedgeContext) -> Result<CombinedSkeptic> {
    let parts: Vec<(Box<dyn SkepticStrategy>, f64)> = vec![
        (Box::new(inverse_payoff_buyer(ctx.clone())?), 0.25),
        (Box::new(weighted_inverse_buyer(ctx.clone(), 2.0)?), 0.25),
        (Box::new(epsilon_single(ctx.clone(), false)?), 0.25),
        (Box::new(epsilon_single(ctx, true)?), 0.25),
    ];
    combine_strategies("slln-single", parts)
}

/// Mixture for payoffs whose inverse series diverges (h growing like |x|):
/// the inverse-payoff buyer is dropped and its weight goes to the
/// inverse-square buyer.
pub fn slln_single_weak_mixture(ctx: SingleHedgeContext) -> Result<CombinedSkeptic> {
    let parts: Vec<(Box<dyn SkepticStrategy>, f64)> = vec![
        (Box::new(weighted_inverse_buyer(ctx.clone(), 2.0)?), 0.5),
        (Box::new(epsilon_single(ctx.clone(), false)?), 0.25),
        (Box::new(epsilon_single(ctx, true)?), 0.25),
    ];
    combine_strategies("slln-single-weak", parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_game, RunConfig};
    use crate::hedge::HedgeKind;
    use crate::reality::{DeterministicReality, PathKind, ReplayReality};

    fn square_ctx(nu: f64) -> SingleHedgeContext {
        SingleHedgeContext::new(HedgeKind::power(2.0), nu, 0.0, None).unwrap()
    }

    #[test]
    fn inverse_buyer_on_zeros_pays_the_inverse_square_series() {
        let ctx = square_ctx(1.0);
        let c = ctx.inv_sum_upper.unwrap();
        let mut s = inverse_payoff_buyer(ctx).unwrap();
        let mut r = DeterministicReality::new(PathKind::Zeros);
        let cfg = RunConfig::new(3, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        let mut spent = 0.0;
        for (i, rec) in h.rounds.iter().enumerate() {
            spent += 1.0 / (c * ((i + 1) * (i + 1)) as f64);
            assert!((rec.capital - (1.0 - spent)).abs() < 1e-14);
        }
        assert!(h.min_capital > 0.0);
    }

    #[test]
    fn inverse_buyer_grows_linearly_on_threshold_moves() {
        let ctx = square_ctx(1.0);
        let c = ctx.inv_sum_upper.unwrap();
        let nu = ctx.nu;
        let mut s = inverse_payoff_buyer(ctx).unwrap();
        let moves: Vec<f64> = (1..=100).map(|n| n as f64).collect();
        let mut r = ReplayReality::new(moves);
        let cfg = RunConfig::new(100, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        for rec in &h.rounds {
            assert!(rec.capital >= rec.n as f64 / (c * nu) - 1e-12);
        }
    }

    #[test]
    fn inverse_buyer_needs_a_summable_series() {
        let ctx = SingleHedgeContext::new(HedgeKind::Symmetric(
            crate::hedge::SymmetricFn::Abs,
        ), 1.0, 0.0, None)
        .unwrap();
        assert!(inverse_payoff_buyer(ctx).is_err());
    }

    #[test]
    fn weighted_buyer_rejects_harmonic_weights() {
        let ctx = square_ctx(1.0);
        assert!(weighted_inverse_buyer(ctx.clone(), 1.0).is_err());
        assert!(weighted_inverse_buyer(ctx, 0.5).is_err());
    }

    #[test]
    fn weighted_buyer_on_zeros_matches_formula() {
        let ctx = square_ctx(2.0);
        let mut s = weighted_inverse_buyer(ctx, 2.0).unwrap();
        let norm = s.norm;
        let mut r = DeterministicReality::new(PathKind::Zeros);
        let cfg = RunConfig::new(50, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        let mut spent = 0.0;
        for (i, rec) in h.rounds.iter().enumerate() {
            let n = (i + 1) as f64;
            spent += 1.0 / (norm * n * n);
            assert!((rec.capital - (1.0 - spent)).abs() < 1e-13);
        }
        assert!(h.min_capital > 0.0);
    }

    #[test]
    fn epsilon_single_on_zeros_is_the_direct_product() {
        let ctx = square_ctx(1.0);
        let eps = ctx.epsilon.unwrap();
        let mut s = epsilon_single(ctx, false).unwrap();
        let mut r = DeterministicReality::new(PathKind::Zeros);
        let cfg = RunConfig::new(300, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        let mut product = 1.0;
        for (i, rec) in h.rounds.iter().enumerate() {
            let n = (i + 1) as f64;
            product *= 1.0 - eps / (n * n);
            assert!((rec.capital - product).abs() < 1e-12 * product.max(1e-30));
        }
        assert!(h.final_capital > 0.0);
    }

    #[test]
    fn epsilon_factors_clear_one_half_on_the_within_bound_grid() {
        let ctx = square_ctx(1.0);
        let eps = ctx.epsilon_ceiling().unwrap(); // worst admissible
        for n in 1..=40u64 {
            for xi in -(n as i64)..=(n as i64) {
                let x = xi as f64;
                let nf = n as f64;
                for sign in [1.0, -1.0] {
                    let t = sign * x / nf + (x * x - 1.0) / (nf * nf);
                    let factor = 1.0 + eps * t;
                    assert!(
                        factor >= 0.5 - 1e-12,
                        "factor {factor} below 1/2 at n={n}, x={x}, sign={sign}"
                    );
                }
            }
        }
    }

    #[test]
    fn epsilon_single_survives_adversarial_within_bound_moves() {
        let ctx = square_ctx(1.0);
        let mut s = epsilon_single(ctx, false).unwrap();
        // maximally adverse within |x_n| <= n for the plus strategy
        let moves: Vec<f64> = (1..=2000).map(|n| -(n as f64)).collect();
        let mut r = ReplayReality::new(moves);
        let cfg = RunConfig::new(2000, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        assert!(h.min_capital >= 0.0);
    }

    #[test]
    fn mixture_capital_is_the_weighted_component_sum() {
        let ctx = square_ctx(1.0);
        let path: Vec<f64> = (1..=400)
            .map(|n| ((n * 31 % 17) as f64 - 8.0) / 3.0)
            .collect();

        let mut mixture = slln_single_mixture(ctx.clone()).unwrap();
        let cfg = RunConfig::new(400, ProtocolVariant::HedgeSet);
        let mut r = ReplayReality::new(path.clone());
        let hm = run_game(&mut mixture, &mut r, &cfg).unwrap();

        let mut component_caps = vec![vec![]; 4];
        let comps: Vec<Box<dyn SkepticStrategy>> = vec![
            Box::new(inverse_payoff_buyer(ctx.clone()).unwrap()),
            Box::new(weighted_inverse_buyer(ctx.clone(), 2.0).unwrap()),
            Box::new(epsilon_single(ctx.clone(), false).unwrap()),
            Box::new(epsilon_single(ctx.clone(), true).unwrap()),
        ];
        for (j, mut comp) in comps.into_iter().enumerate() {
            let ccfg = RunConfig::new(400, comp.variant());
            let mut cr = ReplayReality::new(path.clone());
            let ch = run_game(&mut *comp, &mut cr, &ccfg).unwrap();
            component_caps[j] = ch.rounds.iter().map(|rec| rec.capital).collect();
        }
        for (i, rec) in hm.rounds.iter().enumerate() {
            let expect: f64 = component_caps.iter().map(|c| 0.25 * c[i]).sum();
            assert!(
                (rec.capital - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                "round {}: mixture {} vs weighted sum {}",
                i + 1,
                rec.capital,
                expect
            );
        }
    }

    #[test]
    fn weak_mixture_works_without_a_summable_inverse_series() {
        let ctx = SingleHedgeContext::new(
            HedgeKind::Symmetric(crate::hedge::SymmetricFn::Abs),
            1.0,
            0.0,
            None,
        )
        .unwrap();
        let mut s = slln_single_weak_mixture(ctx).unwrap();
        let mut r = DeterministicReality::new(PathKind::Alternating(1.0));
        let cfg = RunConfig::new(500, ProtocolVariant::HedgeSet);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        assert!(h.min_capital >= 0.0);
    }
}
