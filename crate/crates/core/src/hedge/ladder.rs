//! Call-family price ladders and the indicator-shaped combinations built
//! from them (bull spreads, trapezoids).
//!
//! A ladder holds the prices nu_0, nu_1, ... of a call family indexed by
//! level k. Three families appear: plain calls at integer strikes, powered
//! calls at integer levels in |x|^r, and plain calls at strikes k^(1/r)
//! (the prices the powered hedged-move strategies pay). Ladders built from
//! a measure extend lazily, so strategies whose round-n bets need strikes
//! near n can run to any horizon.

use super::measure::{price_hedge, PricingMeasure};
use super::{HedgeKind, HedgePortfolio, PricedHedge, SymmetricFn};
use crate::error::{Error, Result};

/// Which call family a ladder prices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LadderFamily {
    /// (|x| - k)+ at integer strikes k.
    Call,
    /// (|x|^r - k)+ at integer levels k.
    PoweredCall { r: f64 },
    /// (|x| - k^(1/r))+ : plain calls at the powered strike grid.
    CallAtPoweredStrikes { r: f64 },
}

impl LadderFamily {
    /// The hedge at ladder index k.
    pub fn hedge(&self, k: usize) -> HedgeKind {
        match self {
            LadderFamily::Call => HedgeKind::call(k as f64),
            LadderFamily::PoweredCall { r } => HedgeKind::powered_call(*r, k as u64),
            LadderFamily::CallAtPoweredStrikes { r } => {
                HedgeKind::call((k as f64).powf(1.0 / r))
            }
        }
    }

    /// Maps a move to the level coordinate the family's payoffs are piecewise
    /// linear in: |x| for plain strikes, |x|^r for powered levels.
    pub fn level_coord(&self, x: f64) -> f64 {
        match self {
            LadderFamily::Call | LadderFamily::CallAtPoweredStrikes { .. } => x.abs(),
            LadderFamily::PoweredCall { r } => x.abs().powf(*r),
        }
    }

    /// Unit payoff of the k-th bull spread in this family, as a function of
    /// the raw move. For the powered strike grid the spread runs between two
    /// consecutive non-integer strikes, so it is not unit height in |x|^r.
    pub fn spread_payoff(&self, x: f64, k: u64) -> f64 {
        match self {
            LadderFamily::Call | LadderFamily::PoweredCall { .. } => {
                spread_payoff_level(self.level_coord(x), k)
            }
            LadderFamily::CallAtPoweredStrikes { r } => {
                let y = x.abs();
                let a = (k as f64).powf(1.0 / r);
                let b = ((k + 1) as f64).powf(1.0 / r);
                call_payoff_level(y, a) - call_payoff_level(y, b)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            LadderFamily::Call => Ok(()),
            LadderFamily::PoweredCall { r } | LadderFamily::CallAtPoweredStrikes { r } => {
                if !(r.is_finite() && *r > 1.0 && *r < 2.0) {
                    Err(Error::Config(format!("ladder family needs r in (1, 2), got {r}")))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Prices nu_0..nu_depth of one call family, optionally backed by the
/// measure that generated them (enables lazy extension).
#[derive(Clone, Debug)]
pub struct PriceLadder {
    family: LadderFamily,
    prices: Vec<f64>,
    measure: Option<PricingMeasure>,
}

impl PriceLadder {
    /// Build from a measure. Checks the ladder invariants (monotone,
    /// convex, non-negative) on the built range.
    pub fn from_measure(m: &PricingMeasure, family: LadderFamily, depth: usize) -> Result<Self> {
        family.validate()?;
        if depth < 4 {
            return Err(Error::Config(format!(
                "ladder depth must be at least 4 (trapezoids reach k+2), got {depth}"
            )));
        }
        let mut prices = Vec::with_capacity(depth + 1);
        for k in 0..=depth {
            prices.push(price_hedge(m, &family.hedge(k))?);
        }
        let ladder = PriceLadder {
            family,
            prices,
            measure: Some(m.clone()),
        };
        ladder.assert_invariants()?;
        Ok(ladder)
    }

    /// Wrap explicit prices. Only basic sanity is enforced here; use
    /// [`check_coherence`] to test the full invariants, including on
    /// deliberately broken ladders.
    pub fn from_prices(family: LadderFamily, prices: Vec<f64>) -> Result<Self> {
        family.validate()?;
        if prices.is_empty() {
            return Err(Error::Config("ladder needs at least one price".into()));
        }
        if let Some(p) = prices.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::Config(format!("ladder price {p} must be finite and >= 0")));
        }
        Ok(PriceLadder {
            family,
            prices,
            measure: None,
        })
    }

    fn assert_invariants(&self) -> Result<()> {
        let tol = 1e-12 * self.prices[0].max(1.0);
        for k in 0..self.prices.len() - 1 {
            if self.prices[k] + tol < self.prices[k + 1] {
                return Err(Error::LadderInvariant {
                    index: k + 1,
                    detail: format!(
                        "prices must be non-increasing: nu_{k} = {} < nu_{} = {}",
                        self.prices[k],
                        k + 1,
                        self.prices[k + 1]
                    ),
                });
            }
        }
        for k in 1..self.prices.len().saturating_sub(2) {
            let mu = self.mu_unchecked(k);
            if mu < -tol {
                return Err(Error::LadderInvariant {
                    index: k,
                    detail: format!("convexity broken: mu_{k} = {mu}"),
                });
            }
        }
        Ok(())
    }

    pub fn family(&self) -> LadderFamily {
        self.family
    }

    /// Highest index currently priced.
    pub fn depth(&self) -> usize {
        self.prices.len() - 1
    }

    pub fn measure(&self) -> Option<&PricingMeasure> {
        self.measure.as_ref()
    }

    pub fn price(&self, k: usize) -> Result<f64> {
        self.prices.get(k).copied().ok_or(Error::LadderTooShort {
            depth: self.depth(),
            index: k,
        })
    }

    pub fn nu0(&self) -> f64 {
        self.prices[0]
    }

    /// Extend so that index `k` is priced; needs a backing measure.
    pub fn ensure_depth(&mut self, k: usize) -> Result<()> {
        if k < self.prices.len() {
            return Ok(());
        }
        let m = self.measure.clone().ok_or(Error::LadderTooShort {
            depth: self.depth(),
            index: k,
        })?;
        // Grow geometrically so per-round extension is amortized O(1).
        let target = k.max(self.prices.len() * 2);
        for j in self.prices.len()..=target {
            let p = price_hedge(&m, &self.family.hedge(j))?;
            self.prices.push(p);
        }
        Ok(())
    }

    fn mu_unchecked(&self, k: usize) -> f64 {
        if k == 0 {
            1.0 - self.prices[1] + self.prices[2]
        } else {
            self.prices[k - 1] - self.prices[k] - self.prices[k + 1] + self.prices[k + 2]
        }
    }

    /// Price of the k-th trapezoid. k = 0 includes the unit cash leg, so
    /// mu_0 = 1 - nu_1 + nu_2; for k >= 1,
    /// mu_k = nu_{k-1} - nu_k - nu_{k+1} + nu_{k+2}.
    pub fn mu(&self, k: usize) -> Result<f64> {
        let need = if k == 0 { 2 } else { k + 2 };
        if need >= self.prices.len() {
            return Err(Error::LadderTooShort {
                depth: self.depth(),
                index: need,
            });
        }
        Ok(self.mu_unchecked(k))
    }
}

/// (y - a)+ on the level coordinate.
#[inline]
pub fn call_payoff_level(y: f64, a: f64) -> f64 {
    (y - a).max(0.0)
}

/// Bull spread payoff at level coordinate y >= 0: climbs 0 to 1 over
/// [k, k+1], so it is sandwiched between the indicators of [k+1, inf) and
/// [k, inf).
#[inline]
pub fn spread_payoff_level(y: f64, k: u64) -> f64 {
    let k = k as f64;
    call_payoff_level(y, k) - call_payoff_level(y, k + 1.0)
}

/// Trapezoid payoff at level coordinate y >= 0: 0 outside (k-1, k+2),
/// 1 on [k, k+1], linear in between. The k = 0 case degenerates to
/// 1 - spread(y, 1), which the same four-call expression yields for y >= 0
/// because (y+1) - y = 1 there.
#[inline]
pub fn trapezoid_payoff_level(y: f64, k: u64) -> f64 {
    let k = k as f64;
    call_payoff_level(y, k - 1.0) - call_payoff_level(y, k) - call_payoff_level(y, k + 1.0)
        + call_payoff_level(y, k + 2.0)
}

/// The k-th bull spread as a priced two-call portfolio:
/// +1 call at level k, -1 call at level k+1.
pub fn bull_spread(ladder: &PriceLadder, k: usize) -> Result<HedgePortfolio> {
    let p0 = ladder.price(k)?;
    let p1 = ladder.price(k + 1)?;
    let mut pf = HedgePortfolio::new();
    pf.push(PricedHedge::new(ladder.family().hedge(k), p0)?, 1.0);
    pf.push(PricedHedge::new(ladder.family().hedge(k + 1), p1)?, -1.0);
    Ok(pf)
}

fn trapezoid_portfolio(ladder: &PriceLadder, k: usize) -> Result<HedgePortfolio> {
    let fam = ladder.family();
    let mut pf = HedgePortfolio::new();
    if k == 0 {
        ladder.price(2)?; // depth check up front
        pf.push(
            PricedHedge::new(HedgeKind::Symmetric(SymmetricFn::Constant(1.0)), 1.0)?,
            1.0,
        );
        pf.push(PricedHedge::new(fam.hedge(1), ladder.price(1)?)?, -1.0);
        pf.push(PricedHedge::new(fam.hedge(2), ladder.price(2)?)?, 1.0);
    } else {
        ladder.price(k + 2)?;
        pf.push(PricedHedge::new(fam.hedge(k - 1), ladder.price(k - 1)?)?, 1.0);
        pf.push(PricedHedge::new(fam.hedge(k), ladder.price(k)?)?, -1.0);
        pf.push(PricedHedge::new(fam.hedge(k + 1), ladder.price(k + 1)?)?, -1.0);
        pf.push(PricedHedge::new(fam.hedge(k + 2), ladder.price(k + 2)?)?, 1.0);
    }
    Ok(pf)
}

/// The k-th trapezoid over a plain-call ladder.
pub fn trapezoid(ladder: &PriceLadder, k: usize) -> Result<HedgePortfolio> {
    match ladder.family() {
        LadderFamily::Call => trapezoid_portfolio(ladder, k),
        other => Err(Error::Config(format!(
            "trapezoid needs a plain call ladder, got {other:?}"
        ))),
    }
}

/// The k-th trapezoid in the |x|^r coordinate, over a powered-call ladder.
pub fn trapezoid_r(ladder: &PriceLadder, k: usize) -> Result<HedgePortfolio> {
    match ladder.family() {
        LadderFamily::PoweredCall { .. } => trapezoid_portfolio(ladder, k),
        other => Err(Error::Config(format!(
            "powered trapezoid needs a powered-call ladder, got {other:?}"
        ))),
    }
}

/// Outcome of the ladder coherence checks.
#[derive(Clone, Debug)]
pub struct CoherenceReport {
    pub depth: usize,
    /// First index where prices increase beyond tolerance.
    pub monotone_violation: Option<(usize, f64)>,
    /// First index k with mu_k < -tol.
    pub convexity_violation: Option<(usize, f64)>,
    pub tail_price: f64,
    pub tail_ok: bool,
    /// Worst |sum of spreads - level| over the sampled points.
    pub telescoping_max_err: f64,
    pub telescoping_ok: bool,
}

impl CoherenceReport {
    pub fn pass(&self) -> bool {
        self.monotone_violation.is_none()
            && self.convexity_violation.is_none()
            && self.tail_ok
            && self.telescoping_ok
    }
}

/// Verify monotonicity, convexity, tail decay, and the telescoping identity
/// (the sum of all spread payoffs through the ladder depth rebuilds the
/// level coordinate exactly once the depth exceeds it).
pub fn check_coherence(ladder: &PriceLadder, tol: f64) -> CoherenceReport {
    let depth = ladder.depth();
    let prices = &ladder.prices;

    let mut monotone_violation = None;
    for k in 0..depth {
        if prices[k + 1] > prices[k] + tol {
            monotone_violation = Some((k + 1, prices[k + 1] - prices[k]));
            break;
        }
    }

    // Adjacent differences d_k = nu_k - nu_{k+1} must be non-increasing;
    // the trapezoid weights mu_k = d_{k-1} - d_{k+1} inherit >= 0 from that
    // but are strictly weaker (they skip one index), so check both.
    let mut convexity_violation = None;
    for k in 0..depth.saturating_sub(1) {
        let d0 = prices[k] - prices[k + 1];
        let d1 = prices[k + 1] - prices[k + 2];
        if d1 > d0 + tol {
            convexity_violation = Some((k + 1, d0 - d1));
            break;
        }
    }
    if convexity_violation.is_none() {
        for k in 0..depth.saturating_sub(1) {
            let mu = ladder.mu_unchecked(k);
            if mu < -tol {
                convexity_violation = Some((k, mu));
                break;
            }
        }
    }

    let tail_price = prices[depth];
    let tail_ok = tail_price <= tol;

    // Telescoping: spreads at non-integer strikes round each subtraction, so
    // allow ulp-scale slack there; integer strike grids telescope exactly.
    let exact_grid = matches!(
        ladder.family(),
        LadderFamily::Call | LadderFamily::PoweredCall { .. }
    );
    let mut max_err: f64 = 0.0;
    if depth >= 4 {
        // the spread sum rebuilds y only below the ladder's top strike
        let top = strike_at(ladder.family(), depth);
        let samples = [0.0, 0.5, 1.0, 2.5, top * 0.37, top * 0.81, top];
        for &y in &samples {
            let mut sum = 0.0;
            for k in 0..depth {
                let a = strike_at(ladder.family(), k);
                let b = strike_at(ladder.family(), k + 1);
                sum += call_payoff_level(y, a) - call_payoff_level(y, b);
            }
            max_err = max_err.max((sum - y).abs());
        }
    }
    let telescoping_ok = if exact_grid {
        max_err == 0.0
    } else {
        max_err <= 1e-12 * (depth as f64).max(1.0)
    };

    CoherenceReport {
        depth,
        monotone_violation,
        convexity_violation,
        tail_price,
        tail_ok,
        telescoping_max_err: max_err,
        telescoping_ok,
    }
}

/// Strike of the k-th call in a family, in the raw move coordinate for
/// plain-call families and in the level coordinate for powered ones.
pub fn strike_at(family: LadderFamily, k: usize) -> f64 {
    match family {
        LadderFamily::Call | LadderFamily::PoweredCall { .. } => k as f64,
        LadderFamily::CallAtPoweredStrikes { r } => (k as f64).powf(1.0 / r),
    }
}
