//! Hedge payoffs and portfolios.
//!
//! A hedge is a non-negative even function of Reality's move, purchasable
//! each round at a fixed price. Strategies bet through finite portfolios of
//! priced hedges; the call-family combinators (spreads, trapezoids) and the
//! price ladders they draw on live in [`ladder`], pricing under a measure in
//! [`measure`], and the betting-condition checks in [`validate`].

pub mod ladder;
pub mod measure;
pub mod validate;

use crate::error::{Error, Result};
use crate::numeric::KahanSum;
use std::fmt;

/// Closed-form or tabulated symmetric payoff shapes beyond the call family.
#[derive(Clone, Debug, PartialEq)]
pub enum SymmetricFn {
    /// Constant payoff v >= 0. The constant 1 is the cash leg of trapezoids.
    Constant(f64),
    /// |x|
    Abs,
    /// |x| * ln(|x|)^2, continuously extended by 0 at the origin.
    AbsLogSq,
    /// |x| * ln(1 + |x|)
    AbsLog1p,
    /// Piecewise-linear in |x|: knots (t, value) with t >= 0 strictly
    /// increasing. Extended by the last segment's slope, clamped at 0.
    Table(Vec<(f64, f64)>),
}

impl SymmetricFn {
    fn eval_abs(&self, a: f64) -> f64 {
        match self {
            SymmetricFn::Constant(v) => *v,
            SymmetricFn::Abs => a,
            SymmetricFn::AbsLogSq => {
                if a == 0.0 {
                    0.0
                } else {
                    let l = a.ln();
                    a * l * l
                }
            }
            SymmetricFn::AbsLog1p => a * a.ln_1p(),
            SymmetricFn::Table(knots) => {
                debug_assert!(!knots.is_empty());
                if a <= knots[0].0 {
                    return knots[0].1;
                }
                for w in knots.windows(2) {
                    let (t0, v0) = w[0];
                    let (t1, v1) = w[1];
                    if a <= t1 {
                        return v0 + (v1 - v0) * (a - t0) / (t1 - t0);
                    }
                }
                let (t0, v0) = knots[knots.len() - 2];
                let (t1, v1) = knots[knots.len() - 1];
                let slope = (v1 - v0) / (t1 - t0);
                (v1 + slope * (a - t1)).max(0.0)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SymmetricFn::Constant(v) if !(v.is_finite() && *v >= 0.0) => Err(Error::Config(
                format!("constant payoff must be finite and >= 0, got {v}"),
            )),
            SymmetricFn::Table(knots) => {
                if knots.len() < 2 {
                    return Err(Error::Config("payoff table needs at least 2 knots".into()));
                }
                if knots.iter().any(|&(t, v)| t < 0.0 || v < 0.0 || !t.is_finite() || !v.is_finite()) {
                    return Err(Error::Config(
                        "payoff table entries must be finite and non-negative".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::Config(format!(
                            "payoff table knots must be strictly increasing, got {} then {}",
                            w[0].0, w[1].0
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// The hedge payoff families the protocols bet on.
#[derive(Clone, Debug, PartialEq)]
pub enum HedgeKind {
    /// |x|^exponent with exponent > 1.
    Power { exponent: f64 },
    /// (|x| - strike)_+ with real strike >= 0.
    Call { strike: f64 },
    /// (|x|^r - level)_+ with r in (1, 2) and integer level >= 0.
    PoweredCall { r: f64, level: u64 },
    /// Anything else symmetric and non-negative.
    Symmetric(SymmetricFn),
}

impl HedgeKind {
    pub fn power(exponent: f64) -> Self {
        HedgeKind::Power { exponent }
    }

    pub fn call(strike: f64) -> Self {
        HedgeKind::Call { strike }
    }

    pub fn powered_call(r: f64, level: u64) -> Self {
        HedgeKind::PoweredCall { r, level }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            HedgeKind::Power { exponent } => {
                if !(exponent.is_finite() && *exponent > 1.0) {
                    return Err(Error::Config(format!(
                        "power hedge needs exponent > 1, got {exponent}"
                    )));
                }
                Ok(())
            }
            HedgeKind::Call { strike } => {
                if !(strike.is_finite() && *strike >= 0.0) {
                    return Err(Error::Config(format!(
                        "call strike must be finite and >= 0, got {strike}"
                    )));
                }
                Ok(())
            }
            HedgeKind::PoweredCall { r, .. } => {
                if !(r.is_finite() && *r > 1.0 && *r < 2.0) {
                    return Err(Error::Config(format!(
                        "powered call needs r in (1, 2), got {r}"
                    )));
                }
                Ok(())
            }
            HedgeKind::Symmetric(f) => f.validate(),
        }
    }

    /// Payoff at move x. Total on finite inputs, non-negative, even.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let a = x.abs();
        match self {
            HedgeKind::Power { exponent } => {
                if *exponent == 2.0 {
                    a * a
                } else {
                    a.powf(*exponent)
                }
            }
            HedgeKind::Call { strike } => (a - strike).max(0.0),
            HedgeKind::PoweredCall { r, level } => (a.powf(*r) - *level as f64).max(0.0),
            HedgeKind::Symmetric(f) => f.eval_abs(a),
        }
    }

    /// The absolute-moment order a measure must have for this payoff to be
    /// integrable (used as a gate, the log factors in the symmetric kinds
    /// do not change the order).
    pub fn required_moment(&self) -> f64 {
        match self {
            HedgeKind::Power { exponent } => *exponent,
            HedgeKind::Call { .. } => 1.0,
            HedgeKind::PoweredCall { r, .. } => *r,
            HedgeKind::Symmetric(f) => match f {
                SymmetricFn::Constant(_) => 0.0,
                SymmetricFn::Abs | SymmetricFn::AbsLogSq | SymmetricFn::AbsLog1p => 1.0,
                SymmetricFn::Table(_) => 1.0,
            },
        }
    }
}

impl fmt::Display for HedgeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HedgeKind::Power { exponent } => write!(f, "|x|^{exponent}"),
            HedgeKind::Call { strike } => write!(f, "(|x|-{strike})+"),
            HedgeKind::PoweredCall { r, level } => write!(f, "(|x|^{r}-{level})+"),
            HedgeKind::Symmetric(SymmetricFn::Constant(v)) => write!(f, "const({v})"),
            HedgeKind::Symmetric(SymmetricFn::Abs) => write!(f, "|x|"),
            HedgeKind::Symmetric(SymmetricFn::AbsLogSq) => write!(f, "|x|ln^2|x|"),
            HedgeKind::Symmetric(SymmetricFn::AbsLog1p) => write!(f, "|x|ln(1+|x|)"),
            HedgeKind::Symmetric(SymmetricFn::Table(_)) => write!(f, "table"),
        }
    }
}

/// A hedge with its posted per-unit price.
///
/// Prices are non-negative; a zero price is legitimate for payoffs that
/// vanish on the support of the pricing measure (deep calls under bounded
/// support). Game variants that need a strictly positive price check it at
/// strategy construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PricedHedge {
    pub kind: HedgeKind,
    pub price: f64,
}

impl PricedHedge {
    pub fn new(kind: HedgeKind, price: f64) -> Result<Self> {
        kind.validate()?;
        if !(price.is_finite() && price >= 0.0) {
            return Err(Error::Config(format!(
                "hedge price must be finite and >= 0, got {price}"
            )));
        }
        Ok(PricedHedge { kind, price })
    }
}

/// Finite signed combination of priced hedges.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HedgePortfolio {
    entries: Vec<(PricedHedge, f64)>,
    total_price: f64,
}

impl HedgePortfolio {
    pub fn new() -> Self {
        HedgePortfolio::default()
    }

    pub fn with_entries(entries: Vec<(PricedHedge, f64)>) -> Self {
        let mut p = HedgePortfolio::new();
        for (h, u) in entries {
            p.push(h, u);
        }
        p
    }

    pub fn push(&mut self, hedge: PricedHedge, units: f64) {
        self.total_price += units * hedge.price;
        self.entries.push((hedge, units));
    }

    pub fn entries(&self) -> &[(PricedHedge, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Aggregate price, maintained incrementally on push.
    pub fn total_price(&self) -> f64 {
        self.total_price
    }

    /// Recomputed dot product of units and prices, for consistency checks.
    pub fn recompute_price(&self) -> f64 {
        let mut acc = KahanSum::default();
        for (h, u) in &self.entries {
            acc.add(u * h.price);
        }
        acc.value()
    }

    /// Portfolio payoff at move x.
    pub fn payoff(&self, x: f64) -> f64 {
        let mut acc = KahanSum::default();
        for (h, u) in &self.entries {
            acc.add(u * h.kind.eval(x));
        }
        acc.value()
    }

    /// Payoff minus cost: the portfolio's contribution to a capital update.
    pub fn increment(&self, x: f64) -> f64 {
        let mut acc = KahanSum::default();
        for (h, u) in &self.entries {
            acc.add(u * (h.kind.eval(x) - h.price));
        }
        acc.value()
    }

    pub fn scale(&mut self, factor: f64) {
        for (_, u) in &mut self.entries {
            *u *= factor;
        }
        self.total_price *= factor;
    }
}
