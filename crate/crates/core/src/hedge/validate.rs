//! Checks of the three conditions a single-hedge forcing strategy needs
//! from its payoff: growth at least linear beyond a cutoff, power-ratio
//! monotonicity, and a summable inverse along the integers. Closed-form
//! payoffs get analytic answers; tabulated ones get a partial-sum
//! heuristic with the cutoff documented in the report.

use super::{HedgeKind, SymmetricFn};
use crate::error::Result;
use crate::numeric::{zeta_tail, KahanSum};

/// Terms summed before switching to a tail bound or declaring a heuristic.
pub const A3_PARTIAL_TERMS: u64 = 1_000_000;

/// Outcome of the linear-growth check h(x) >= x on a grid beyond the cutoff.
#[derive(Clone, Debug)]
pub struct GrowthOutcome {
    /// No grid violation anywhere beyond the cutoff c.
    pub holds_beyond_c: bool,
    /// Smallest grid point from which the inequality held through the
    /// whole remaining grid (f64::INFINITY if it never stabilized).
    pub observed_threshold: f64,
    /// Most negative h(x) - x seen beyond c, with its location.
    pub worst_violation: Option<(f64, f64)>,
}

impl GrowthOutcome {
    /// Pass means the inequality holds from max(c, 1) on; payoffs like x^2
    /// dip below x inside (0, 1) without hurting any construction that
    /// evaluates them at integers.
    pub fn pass(&self, c: f64) -> bool {
        self.holds_beyond_c || self.observed_threshold <= c.max(1.0) + 0.02
    }
}

/// Monotonicity of h(x)/x^alpha over the sampled grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    Constant,
    Neither,
}

/// Convergence verdict for the inverse-payoff series over integers > c.
#[derive(Clone, Debug)]
pub enum InverseSum {
    /// Summable; `upper` bounds the full series from above (partial sum
    /// plus an integral tail bound), which is the safe direction for
    /// collateral budgets.
    Converges { upper: f64 },
    Diverges { note: String },
    /// Tabulated payoffs only: partial sum to the documented cutoff and
    /// the increment over the last decade.
    Inconclusive {
        partial: f64,
        last_decade_increment: f64,
    },
}

impl InverseSum {
    pub fn converges(&self) -> bool {
        matches!(self, InverseSum::Converges { .. })
    }
}

/// Full report for one payoff and cutoff.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub cutoff: f64,
    pub growth: GrowthOutcome,
    /// (alpha, monotonicity of h(x)/x^alpha) over the sampled alpha grid.
    pub ratio_monotonicity: Vec<(f64, Monotonicity)>,
    pub inverse_sum: InverseSum,
}

impl ConditionReport {
    /// Some alpha in the sample gives a monotone (or constant) ratio.
    pub fn ratio_ok(&self) -> bool {
        self.ratio_monotonicity
            .iter()
            .any(|(_, m)| *m != Monotonicity::Neither)
    }

    pub fn all_pass(&self) -> bool {
        self.growth.pass(self.cutoff) && self.ratio_ok() && self.inverse_sum.converges()
    }
}

/// First integer n with n > c.
pub fn first_index_beyond(c: f64) -> u64 {
    if c < 0.0 {
        return 1;
    }
    (c.floor() as u64 + 1).max(1)
}

/// Sum of 1/h(n) over integers n > c: closed forms where the payoff shape
/// decides the answer, partial sums with a documented cutoff otherwise.
pub fn inverse_payoff_sum(h: &HedgeKind, c: f64) -> InverseSum {
    let n0 = first_index_beyond(c);
    match h {
        HedgeKind::Power { exponent } => {
            // tiny inflation keeps the value an upper bound despite the
            // ~1e-13 relative error of the tail expansion
            let upper = zeta_tail(*exponent, n0) * (1.0 + 1e-12);
            InverseSum::Converges { upper }
        }
        HedgeKind::Call { .. } => InverseSum::Diverges {
            note: "payoff grows linearly, inverse sum is harmonic-like".into(),
        },
        HedgeKind::PoweredCall { r, level } => {
            // 1/(n^r - k) <= 2/n^r once n^r >= 2k
            let k = *level as f64;
            let mut start = n0;
            while (start as f64).powf(*r) < 2.0 * k + 1.0 {
                start += 1;
            }
            let mut acc = KahanSum::default();
            for n in n0..start {
                let hn = (n as f64).powf(*r) - k;
                if hn <= 0.0 {
                    return InverseSum::Diverges {
                        note: format!("payoff vanishes at n = {n}; raise the cutoff"),
                    };
                }
                acc.add(1.0 / hn);
            }
            let cut = start.max(n0) + A3_PARTIAL_TERMS;
            for n in start..cut {
                acc.add(1.0 / ((n as f64).powf(*r) - k));
            }
            let upper = acc.value() + 2.0 * zeta_tail(*r, cut) * (1.0 + 1e-12);
            InverseSum::Converges { upper }
        }
        HedgeKind::Symmetric(sym) => match sym {
            SymmetricFn::Constant(_) => InverseSum::Diverges {
                note: "bounded payoff".into(),
            },
            SymmetricFn::Abs => InverseSum::Diverges {
                note: "harmonic series".into(),
            },
            SymmetricFn::AbsLogSq => {
                if n0 <= 1 {
                    return InverseSum::Diverges {
                        note: "payoff vanishes at n = 1; use a cutoff >= 1".into(),
                    };
                }
                let mut acc = KahanSum::default();
                for n in n0..n0 + A3_PARTIAL_TERMS {
                    acc.add(1.0 / h.eval(n as f64));
                }
                // 1/(x ln^2 x) is decreasing there, so the integral
                // 1/ln(N) bounds the tail from above.
                let tail = 1.0 / ((n0 + A3_PARTIAL_TERMS) as f64).ln();
                InverseSum::Converges {
                    upper: acc.value() + tail,
                }
            }
            SymmetricFn::AbsLog1p => InverseSum::Diverges {
                note: "sum of 1/(n ln(1+n)) grows like ln ln n".into(),
            },
            SymmetricFn::Table(_) => {
                let mut acc = KahanSum::default();
                let mut at_decade = 0.0;
                let cut = n0 + A3_PARTIAL_TERMS;
                for n in n0..cut {
                    let hn = h.eval(n as f64);
                    if hn <= 0.0 {
                        return InverseSum::Diverges {
                            note: format!("payoff vanishes at n = {n}"),
                        };
                    }
                    acc.add(1.0 / hn);
                    if n == cut / 10 {
                        at_decade = acc.value();
                    }
                }
                InverseSum::Inconclusive {
                    partial: acc.value(),
                    last_decade_increment: acc.value() - at_decade,
                }
            }
        },
    }
}

fn growth_check(h: &HedgeKind, c: f64) -> GrowthOutcome {
    let start = c.max(0.0);
    let mut points: Vec<f64> = (1..=20_000).map(|i| start + i as f64 * 0.01).collect();
    points.extend([1e3, 1e4, 1e5, 1e6].iter().map(|&p| start + p));

    let mut worst: Option<(f64, f64)> = None;
    let mut last_bad = f64::NEG_INFINITY;
    for &x in &points {
        let gap = h.eval(x) - x;
        if gap < -1e-12 * x.max(1.0) {
            last_bad = x;
            if worst.is_none_or(|(_, w)| gap < w) {
                worst = Some((x, gap));
            }
        }
    }
    let observed_threshold = if last_bad == f64::NEG_INFINITY {
        start
    } else if last_bad >= points[points.len() - 1] {
        f64::INFINITY
    } else {
        // first grid point after the last violation
        last_bad + 0.01
    };
    GrowthOutcome {
        holds_beyond_c: worst.is_none(),
        observed_threshold,
        worst_violation: worst,
    }
}

fn classify_ratio(h: &HedgeKind, alpha: f64, c: f64) -> Monotonicity {
    let start = c.max(0.5) + 0.01;
    let n = 600;
    let step = (300.0 - start) / n as f64;
    let mut up = false;
    let mut down = false;
    let mut prev = h.eval(start) / start.powf(alpha);
    for i in 1..=n {
        let x = start + step * i as f64;
        let r = h.eval(x) / x.powf(alpha);
        let tol = 1e-10 * prev.abs().max(r.abs()).max(1e-300);
        if r > prev + tol {
            up = true;
        } else if r < prev - tol {
            down = true;
        }
        prev = r;
    }
    match (up, down) {
        (true, false) => Monotonicity::Increasing,
        (false, true) => Monotonicity::Decreasing,
        (false, false) => Monotonicity::Constant,
        (true, true) => Monotonicity::Neither,
    }
}

/// Run all three condition checks for a payoff and cutoff.
pub fn validate_single_hedge(h: &HedgeKind, c: f64) -> Result<ConditionReport> {
    h.validate()?;
    let alphas = [1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0];
    let ratio_monotonicity = alphas
        .iter()
        .map(|&a| (a, classify_ratio(h, a, c)))
        .collect();
    Ok(ConditionReport {
        cutoff: c,
        growth: growth_check(h, c),
        ratio_monotonicity,
        inverse_sum: inverse_payoff_sum(h, c),
    })
}
