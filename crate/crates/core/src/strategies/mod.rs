//! Betting strategies: inverse-payoff ticket buyers, multiplicative
//! fraction bettors, their mixtures, and the buy-low/sell-high overlay.
//!
//! Every strategy starts from capital 1 unless rescaled, and each one keeps
//! whatever private state it needs (its own capital view, a ladder cursor)
//! so that instances can run concurrently without sharing.

pub mod bounds;
pub mod countable;
pub mod mz;
pub mod single;
pub mod upcrossing;

use crate::engine::{ProtocolVariant, RoundBet, SkepticStrategy};
use crate::error::{Error, Result};
use crate::hedge::ladder::{strike_at, LadderFamily, PriceLadder};
use crate::hedge::validate::{first_index_beyond, validate_single_hedge, ConditionReport, InverseSum};
use crate::hedge::HedgeKind;
use crate::numeric::KahanSum;

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Shared inputs of the single-hedge strategies: a symmetric payoff h
/// quoted at price nu, a cutoff below which rounds are skipped (h may
/// vanish or misbehave there), the condition report from validation, and
/// the betting fraction for the multiplicative strategies.
#[derive(Clone, Debug)]
pub struct SingleHedgeContext {
    pub hedge: HedgeKind,
    pub nu: f64,
    pub cutoff: f64,
    pub report: ConditionReport,
    /// Upper bound for sum_{n > cutoff} 1/h(n) when that series converges.
    pub inv_sum_upper: Option<f64>,
    /// Fraction of current capital the multiplicative strategies commit
    /// per round. None when no safe default exists (h(1) <= 0).
    pub epsilon: Option<f64>,
    warnings: Vec<String>,
}

impl SingleHedgeContext {
    /// Validate the payoff and assemble the context. `epsilon = None`
    /// picks 0.9 times the safety ceiling. An epsilon above the ceiling is
    /// accepted but recorded as a warning, so deliberately unsafe runs can
    /// demonstrate what the ceiling protects against.
    pub fn new(hedge: HedgeKind, nu: f64, cutoff: f64, epsilon: Option<f64>) -> Result<Self> {
        hedge.validate()?;
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::Config(format!(
                "hedge price must be positive and finite, got {nu}"
            )));
        }
        if !(cutoff.is_finite() && cutoff >= 0.0) {
            return Err(Error::Config(format!(
                "cutoff must be finite and >= 0, got {cutoff}"
            )));
        }
        let report = validate_single_hedge(&hedge, cutoff)?;
        let inv_sum_upper = match report.inverse_sum {
            InverseSum::Converges { upper } => Some(upper),
            _ => None,
        };
        let h1 = hedge.eval(1.0);
        let ceiling = if h1 > 0.0 {
            Some(1.0 / (2.0 * (1.0 + nu / h1)))
        } else {
            None
        };
        let mut warnings = Vec::new();
        let epsilon = match epsilon {
            Some(e) => {
                if !(e.is_finite() && e > 0.0 && e < 1.0) {
                    return Err(Error::Config(format!(
                        "epsilon must lie in (0, 1), got {e}"
                    )));
                }
                match ceiling {
                    Some(c) if e > c * (1.0 + 1e-12) => warnings.push(format!(
                        "epsilon {e} exceeds the collateral-safety ceiling {c}; \
                         the capital floor no longer holds"
                    )),
                    None => warnings.push(format!(
                        "no safety ceiling computable (h(1) = {h1}); epsilon {e} unchecked"
                    )),
                    _ => {}
                }
                Some(e)
            }
            None => ceiling.map(|c| 0.9 * c),
        };
        Ok(SingleHedgeContext {
            hedge,
            nu,
            cutoff,
            report,
            inv_sum_upper,
            epsilon,
            warnings,
        })
    }

    /// Largest capital fraction that keeps every per-round factor at or
    /// above 1/2 for moves within the round bound.
    pub fn epsilon_ceiling(&self) -> Option<f64> {
        let h1 = self.hedge.eval(1.0);
        if h1 > 0.0 {
            Some(1.0 / (2.0 * (1.0 + self.nu / h1)))
        } else {
            None
        }
    }

    /// First round index the strategies actually bet on.
    pub fn first_active_round(&self) -> u64 {
        first_index_beyond(self.cutoff)
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Mirrors the engine's capital accounting for a strategy's own bets, so
/// fraction-of-capital sizing agrees with the account the engine keeps.
#[derive(Clone, Debug)]
pub(crate) struct CapitalTracker {
    cap: KahanSum,
    pending: Option<RoundBet>,
}

impl CapitalTracker {
    pub(crate) fn new(k0: f64) -> Self {
        CapitalTracker {
            cap: KahanSum::new(k0),
            pending: None,
        }
    }

    pub(crate) fn capital(&self) -> f64 {
        self.cap.value()
    }

    pub(crate) fn post(&mut self, bet: &RoundBet) {
        self.pending = Some(bet.clone());
    }

    pub(crate) fn settle(&mut self, x: f64) {
        if let Some(bet) = self.pending.take() {
            self.cap.add(bet.increment(x));
        }
    }
}

/// The move plus a call on its magnitude, clipped from below at the strike:
/// x + (|x| - s)_+, or -x + (|x| - s)_+ in mirrored form. Both stay >= -s.
#[inline]
pub fn hedged_move_value(x: f64, strike: f64, mirror: bool) -> f64 {
    let base = if mirror { -x } else { x };
    base + (x.abs() - strike).max(0.0)
}

/// Hedged move at round n priced off a plain-call ladder: returns
/// (x + (|x| - s_n)_+, price at index n) where s_n is the ladder's n-th
/// strike. `mirror` flips the sign of the raw move but not the call.
pub fn hedged_move(
    x: f64,
    n: u64,
    ladder: &mut PriceLadder,
    mirror: bool,
) -> Result<(f64, f64)> {
    match ladder.family() {
        LadderFamily::Call | LadderFamily::CallAtPoweredStrikes { .. } => {}
        LadderFamily::PoweredCall { .. } => {
            return Err(Error::Config(
                "hedged moves need a plain-call strike grid, not powered payoffs".into(),
            ))
        }
    }
    let idx = n as usize;
    ladder.ensure_depth(idx)?;
    let strike = strike_at(ladder.family(), idx);
    Ok((hedged_move_value(x, strike, mirror), ladder.price(idx)?))
}

fn variant_rank(v: ProtocolVariant) -> u8 {
    match v {
        ProtocolVariant::SingleHedge => 0,
        ProtocolVariant::HedgeSet => 1,
        ProtocolVariant::Unrestricted => 2,
    }
}

/// Fixed convex combination of strategies. Posts the weighted sum of the
/// component bets, so its capital is the weighted sum of the component
/// capitals on every path, each component started from its weight.
pub struct CombinedSkeptic {
    id: String,
    parts: Vec<(Box<dyn SkepticStrategy>, f64)>,
    variant: ProtocolVariant,
    initial: f64,
}

/// Combine strategies with positive weights summing to 1.
pub fn combine_strategies(
    id: impl Into<String>,
    parts: Vec<(Box<dyn SkepticStrategy>, f64)>,
) -> Result<CombinedSkeptic> {
    if parts.is_empty() {
        return Err(Error::Config("a mixture needs at least one component".into()));
    }
    let mut total = 0.0;
    for (s, w) in &parts {
        if !(w.is_finite() && *w > 0.0) {
            return Err(Error::Config(format!(
                "mixture weight for {} must be positive, got {w}",
                s.id()
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Config(format!(
            "mixture weights must sum to 1, got {total}"
        )));
    }
    let max_rank = parts
        .iter()
        .map(|(s, _)| variant_rank(s.variant()))
        .max()
        .unwrap();
    let variant = if parts.len() == 1 {
        parts[0].0.variant()
    } else {
        // merged bets can carry several tickets even when each component
        // posts at most one
        match max_rank {
            2 => ProtocolVariant::Unrestricted,
            _ => ProtocolVariant::HedgeSet,
        }
    };
    let initial = parts
        .iter()
        .map(|(s, w)| w * s.initial_capital())
        .sum::<f64>();
    Ok(CombinedSkeptic {
        id: id.into(),
        parts,
        variant,
        initial,
    })
}

/// Equal-weight convenience wrapper over [`combine_strategies`].
pub fn equal_mixture(
    id: impl Into<String>,
    components: Vec<Box<dyn SkepticStrategy>>,
) -> Result<CombinedSkeptic> {
    let n = components.len();
    if n == 0 {
        return Err(Error::Config("a mixture needs at least one component".into()));
    }
    let w = 1.0 / n as f64;
    combine_strategies(id, components.into_iter().map(|s| (s, w)).collect())
}

/// Weights 2^-j, j = 1..=J, renormalized to sum to 1. This is the
/// truncation used for countable strategy families.
pub fn geometric_mixture(
    id: impl Into<String>,
    components: Vec<Box<dyn SkepticStrategy>>,
) -> Result<CombinedSkeptic> {
    let j_max = components.len();
    if j_max == 0 {
        return Err(Error::Config("a mixture needs at least one component".into()));
    }
    // sum_{j=1}^{J} 2^-j = 1 - 2^-J
    let norm = 1.0 - 0.5f64.powi(j_max as i32);
    let parts = components
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, 0.5f64.powi(i as i32 + 1) / norm))
        .collect();
    combine_strategies(id, parts)
}

impl SkepticStrategy for CombinedSkeptic {
    fn id(&self) -> &str {
        &self.id
    }

    fn initial_capital(&self) -> f64 {
        self.initial
    }

    fn variant(&self) -> ProtocolVariant {
        self.variant
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        let mut merged = RoundBet::null();
        for (s, w) in &mut self.parts {
            let b = s.bet(n)?;
            merged.add_scaled(&b, *w);
        }
        Ok(merged)
    }

    fn observe(&mut self, n: u64, x: f64) {
        for (s, _) in &mut self.parts {
            s.observe(n, x);
        }
    }
}

/// A strategy with every bet (and the starting capital) scaled by a fixed
/// positive factor; its capital is the inner capital times that factor on
/// every path.
pub struct ScaledSkeptic {
    inner: Box<dyn SkepticStrategy>,
    factor: f64,
    id: String,
}

/// Scale a strategy by `factor > 0`.
pub fn scale_strategy(inner: Box<dyn SkepticStrategy>, factor: f64) -> Result<ScaledSkeptic> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::Config(format!(
            "scale factor must be positive and finite, got {factor}"
        )));
    }
    let id = format!("scaled({factor}):{}", inner.id());
    Ok(ScaledSkeptic { inner, factor, id })
}

impl SkepticStrategy for ScaledSkeptic {
    fn id(&self) -> &str {
        &self.id
    }

    fn initial_capital(&self) -> f64 {
        self.factor * self.inner.initial_capital()
    }

    fn variant(&self) -> ProtocolVariant {
        self.inner.variant()
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        Ok(self.inner.bet(n)?.scaled(self.factor))
    }

    fn observe(&mut self, n: u64, x: f64) {
        self.inner.observe(n, x);
    }
}
