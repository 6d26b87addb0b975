//! Exact running lower bounds on the capital of the shipped strategies.
//!
//! Each ticket buyer spends at most its starting capital over the whole
//! game, so its capital always sits at or above the sum of payoffs it has
//! collected, computed here term by term with the same constants the
//! strategy itself uses. The multiplicative strategies instead admit a
//! two-sided sandwich on log capital. These run alongside a game and let
//! callers assert the displayed growth guarantees pathwise.

use super::countable::TrapezoidVarianceForcer;
use super::{hedged_move_value, SingleHedgeContext};
use crate::engine::trapezoid_weight;
use crate::error::{Error, Result};
use crate::hedge::ladder::{strike_at, LadderFamily, PriceLadder};
use crate::hedge::HedgeKind;
use crate::numeric::{zeta_tail, KahanSum};

/// Floor for the inverse-payoff buyer:
/// K_n >= sum over active rounds of h(x_i) / (C nu h(i)).
pub struct InverseHedgeBound {
    hedge: HedgeKind,
    nu: f64,
    inv_sum: f64,
    first: u64,
    acc: KahanSum,
}

pub fn inverse_hedge_bound(ctx: &SingleHedgeContext) -> Result<InverseHedgeBound> {
    let inv_sum = ctx.inv_sum_upper.ok_or_else(|| Error::StrategyConstruction {
        strategy: "bc-single".into(),
        detail: "no convergent inverse-payoff series; the bound is void".into(),
    })?;
    Ok(InverseHedgeBound {
        hedge: ctx.hedge.clone(),
        nu: ctx.nu,
        inv_sum,
        first: ctx.first_active_round(),
        acc: KahanSum::default(),
    })
}

impl InverseHedgeBound {
    pub fn update(&mut self, n: u64, x: f64) {
        if n < self.first {
            return;
        }
        let hn = self.hedge.eval(n as f64);
        if hn > 0.0 {
            self.acc.add(self.hedge.eval(x) / (self.inv_sum * self.nu * hn));
        }
    }

    pub fn value(&self) -> f64 {
        self.acc.value()
    }
}

/// Floor for the weighted buyer:
/// K_n >= sum over active rounds of h(x_i) / (C' nu i^p).
pub struct WeightedHedgeBound {
    hedge: HedgeKind,
    nu: f64,
    norm: f64,
    weight_exp: f64,
    first: u64,
    acc: KahanSum,
}

pub fn weighted_hedge_bound(ctx: &SingleHedgeContext, weight_exp: f64) -> Result<WeightedHedgeBound> {
    if !(weight_exp.is_finite() && weight_exp > 1.0) {
        return Err(Error::StrategyConstruction {
            strategy: "weighted-bc-single".into(),
            detail: format!("weights 1/n^p need p > 1, got {weight_exp}"),
        });
    }
    let first = ctx.first_active_round();
    // must match the strategy's own normalization bit for bit
    let norm = zeta_tail(weight_exp, first) * (1.0 + 1e-12);
    Ok(WeightedHedgeBound {
        hedge: ctx.hedge.clone(),
        nu: ctx.nu,
        norm,
        weight_exp,
        first,
        acc: KahanSum::default(),
    })
}

impl WeightedHedgeBound {
    pub fn update(&mut self, n: u64, x: f64) {
        if n < self.first {
            return;
        }
        let w = (n as f64).powf(self.weight_exp);
        self.acc.add(self.hedge.eval(x) / (self.norm * self.nu * w));
    }

    pub fn value(&self) -> f64 {
        self.acc.value()
    }
}

/// Floor for the spread counter: K_n >= #{i <= n : moves reaching level i}
/// divided by nu_0.
pub struct ThresholdCountBound {
    family: LadderFamily,
    nu0: f64,
    count: u64,
}

pub fn threshold_count_bound(ladder: &PriceLadder) -> ThresholdCountBound {
    ThresholdCountBound {
        family: ladder.family(),
        nu0: ladder.nu0(),
        count: 0,
    }
}

impl ThresholdCountBound {
    pub fn update(&mut self, n: u64, x: f64) {
        // the round-n spread sits between levels n-1 and n, so it pays the
        // full unit exactly when the level coordinate reaches n
        if self.family.level_coord(x) >= n as f64 {
            self.count += 1;
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn value(&self) -> f64 {
        self.count as f64 / self.nu0
    }
}

/// Floor for the trapezoid buyer:
/// K_n >= (1/budget) sum of y_i^e 1{y_i <= i} / i^e, with y the level
/// coordinate and e the weight exponent. The round-i bundle dominates that
/// term because the trapezoid holding the flat top at y already carries
/// weight (floor(y)+1)^e >= y^e.
pub struct TruncatedVarianceBound {
    family: LadderFamily,
    weight_exp: f64,
    budget: f64,
    acc: KahanSum,
}

pub fn truncated_variance_bound(forcer: &TrapezoidVarianceForcer) -> TruncatedVarianceBound {
    TruncatedVarianceBound {
        family: forcer.family(),
        weight_exp: forcer.weight_exp(),
        budget: forcer.budget(),
        acc: KahanSum::default(),
    }
}

impl TruncatedVarianceBound {
    pub fn update(&mut self, n: u64, x: f64) {
        let y = self.family.level_coord(x);
        if y <= n as f64 {
            let e = self.weight_exp;
            let num = if e == 2.0 { y * y } else { y.powf(e) };
            self.acc.add(num / (self.budget * trapezoid_weight(n - 1, e)));
        }
    }

    pub fn value(&self) -> f64 {
        self.acc.value()
    }
}

/// The per-round term of the plain multiplicative strategy:
/// t_n = sign * x/n + (h(x) - nu)/h(n). Capital evolves by 1 + eps * t_n.
pub fn epsilon_single_term(
    hedge: &HedgeKind,
    nu: f64,
    mirror: bool,
    n: u64,
    x: f64,
) -> Option<f64> {
    let hn = hedge.eval(n as f64);
    if hn <= 0.0 {
        return None;
    }
    let sign = if mirror { -1.0 } else { 1.0 };
    Some(sign * x / n as f64 + (hedge.eval(x) - nu) / hn)
}

/// The per-round term of the clipped-move bettor:
/// t_n = (m_n - nu_n)/d_n with m the clipped move and d the stake
/// denominator. Capital evolves by 1 + eps * t_n.
pub fn epsilon_hedged_term(
    ladder: &mut PriceLadder,
    divide_by_strike: bool,
    mirror: bool,
    n: u64,
    x: f64,
) -> Result<f64> {
    let idx = n as usize;
    ladder.ensure_depth(idx)?;
    let strike = strike_at(ladder.family(), idx);
    let m = hedged_move_value(x, strike, mirror);
    let d = if divide_by_strike { strike } else { n as f64 };
    Ok((m - ladder.price(idx)?) / d)
}

/// Two-sided bracket on the log capital of a multiplicative strategy from
/// its per-round terms:
///
///   eps S_n - eps^2 Q_n <= log(K_n / K_0) <= eps S_n
///
/// with S_n the term sum and Q_n the sum of squares. The upper side always
/// holds; the lower side needs every eps * t_n >= -1/2, which the safety
/// ceiling guarantees for the moves each strategy clips or bounds.
pub struct LogCapitalSandwich {
    eps: f64,
    s: KahanSum,
    q: KahanSum,
    log_k0: f64,
}

impl LogCapitalSandwich {
    pub fn new(eps: f64, k0: f64) -> Self {
        LogCapitalSandwich {
            eps,
            s: KahanSum::default(),
            q: KahanSum::default(),
            log_k0: k0.ln(),
        }
    }

    pub fn add_term(&mut self, t: f64) {
        self.s.add(t);
        self.q.add(t * t);
    }

    /// (lower, upper) bracket for log K_n.
    pub fn bounds(&self) -> (f64, f64) {
        let drift = self.eps * self.s.value();
        (
            self.log_k0 + drift - self.eps * self.eps * self.q.value(),
            self.log_k0 + drift,
        )
    }

    pub fn term_sum(&self) -> f64 {
        self.s.value()
    }

    pub fn term_square_sum(&self) -> f64 {
        self.q.value()
    }
}
