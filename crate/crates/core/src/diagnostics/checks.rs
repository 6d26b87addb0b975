//! Finite-horizon convergence verdicts and the pointwise inequalities the
//! event inclusions rest on. Everything here reports evidence, not proof:
//! a series is called stable when its partial sums stop moving at the
//! configured tolerance, and that label is all downstream code gets.

use crate::engine::RoundRecord;
use crate::error::{Error, Result};
use crate::hedge::ladder::{LadderFamily, PriceLadder};
use crate::hedge::HedgeKind;
use crate::numeric::KahanSum;

/// Default Cauchy-window tolerance for "the partial sums have settled".
pub const CONVERGENCE_TOL: f64 = 1e-3;

/// Default ceiling for a scaled average that should have collapsed to 0.
pub const AVERAGE_TOL: f64 = 1e-2;

/// Finite-horizon convergence evidence for a series of partial sums.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub rounds: u64,
    /// Partial sum at the horizon.
    pub partial: f64,
    /// Change since round N/10.
    pub last_decade_increment: f64,
    /// Spread (max minus min) of the partial sums over rounds [N/2, N].
    pub window_spread: f64,
    pub tolerance: f64,
    /// Window spread at or below tolerance.
    pub cauchy_stable: bool,
}

/// Judge a series from its recorded partial sums, one entry per round
/// starting at round 1. Returns None on an empty record.
pub fn convergence_report(partials: &[f64], tolerance: f64) -> Option<ConvergenceReport> {
    if partials.is_empty() {
        return None;
    }
    let n = partials.len();
    let half = (n / 2).max(1);
    let window = &partials[half - 1..n];
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in window {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let decade = (n / 10).max(1);
    let spread = hi - lo;
    Some(ConvergenceReport {
        rounds: n as u64,
        partial: partials[n - 1],
        last_decade_increment: partials[n - 1] - partials[decade - 1],
        window_spread: spread,
        tolerance,
        cauchy_stable: spread <= tolerance,
    })
}

/// Outcome of the summation-by-parts consistency check: when the ratio
/// series sum(a_n/b_n) settles, the scaled average (1/b_N) sum(a_n) must
/// sit near zero.
#[derive(Clone, Debug)]
pub struct KroneckerReport {
    pub horizon: u64,
    /// sum_{n<=N} a_n/b_n.
    pub ratio_partial: f64,
    /// Spread of the ratio partial sums over the last decade [N/10, N].
    pub ratio_window_spread: f64,
    /// The ratio series shows Cauchy-stable evidence of convergence.
    pub ratio_converged: bool,
    /// (1/b_N) sum_{n<=N} a_n.
    pub scaled_average: f64,
    pub average_tolerance: f64,
    /// Vacuously true when the ratio series has not settled (the lemma
    /// then says nothing).
    pub consistent: bool,
}

/// Feed terms a_n and growing denominators b_n for n = 1..=horizon and
/// report both sides of the lemma. Denominators must be positive, finite,
/// and non-decreasing.
pub fn kronecker_check(
    mut term: impl FnMut(u64) -> f64,
    mut denominator: impl FnMut(u64) -> f64,
    horizon: u64,
    ratio_tolerance: f64,
    average_tolerance: f64,
) -> Result<KroneckerReport> {
    if horizon < 10 {
        return Err(Error::Config(format!(
            "the windowed verdict needs at least 10 rounds, got {horizon}"
        )));
    }
    let mut ratio = KahanSum::default();
    let mut total = KahanSum::default();
    let mut partials = Vec::with_capacity(horizon as usize);
    let mut prev_b = 0.0;
    let mut last_b = 1.0;
    for n in 1..=horizon {
        let a = term(n);
        let b = denominator(n);
        if !a.is_finite() {
            return Err(Error::Config(format!("term at n = {n} is {a}")));
        }
        if !(b.is_finite() && b > 0.0 && b >= prev_b) {
            return Err(Error::Config(format!(
                "denominators must be positive and non-decreasing, got {b} after {prev_b} at n = {n}"
            )));
        }
        prev_b = b;
        last_b = b;
        ratio.add(a / b);
        total.add(a);
        partials.push(ratio.value());
    }
    let n = partials.len();
    let decade = (n / 10).max(1);
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in &partials[decade - 1..n] {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let spread = hi - lo;
    let converged = spread <= ratio_tolerance;
    let average = total.value() / last_b;
    Ok(KroneckerReport {
        horizon,
        ratio_partial: ratio.value(),
        ratio_window_spread: spread,
        ratio_converged: converged,
        scaled_average: average,
        average_tolerance,
        consistent: !converged || average.abs() <= average_tolerance,
    })
}

/// Price comparison behind the powered Cesàro argument: the call at strike
/// n^(1/r) never costs more than n^(1/r-1) times the powered hedge at
/// level n, and the Cesàro averages of the root-strike prices fade.
#[derive(Clone, Debug)]
pub struct CesaroPriceReport {
    pub horizon: u64,
    /// Minimum of (scaled powered price - root-strike price) over n; the
    /// inequality holds everywhere exactly when this is >= 0 (up to the
    /// tolerance already applied).
    pub worst_margin: f64,
    /// (n, (1/n^(1/r)) sum_{i<=n} root-strike price_i) at decade marks.
    pub averages: Vec<(u64, f64)>,
    pub trend_nonincreasing: bool,
}

/// Check the per-index price inequality for n = 1..=horizon and report the
/// Cesàro trend. Both ladders must come from the same measure: plain calls
/// on the n^(1/r) strike schedule against powered hedges at integer
/// levels, sharing one r.
pub fn cesaro_price_check(
    root_strike_ladder: &mut PriceLadder,
    powered_ladder: &mut PriceLadder,
    horizon: u64,
) -> Result<CesaroPriceReport> {
    let r = match (root_strike_ladder.family(), powered_ladder.family()) {
        (
            LadderFamily::CallAtPoweredStrikes { r: r1 },
            LadderFamily::PoweredCall { r: r2 },
        ) if (r1 - r2).abs() < 1e-12 => r1,
        (f1, f2) => {
            return Err(Error::Config(format!(
                "price comparison needs root-strike calls against powered hedges \
                 with one exponent, got {f1:?} and {f2:?}"
            )))
        }
    };
    match (root_strike_ladder.measure(), powered_ladder.measure()) {
        (Some(m1), Some(m2)) if m1 != m2 => {
            return Err(Error::Config(
                "price comparison needs both ladders priced from one measure".into(),
            ))
        }
        _ => {}
    }
    if horizon < 1 {
        return Err(Error::Config("horizon must be at least 1".into()));
    }
    root_strike_ladder.ensure_depth(horizon as usize)?;
    powered_ladder.ensure_depth(horizon as usize)?;

    let mut acc = KahanSum::default();
    let mut worst = f64::INFINITY;
    let mut averages = Vec::new();
    let mut next_mark = first_decade_mark(horizon);
    for n in 1..=horizon {
        let nf = n as f64;
        let root_price = root_strike_ladder.price(n as usize)?;
        let powered_price = powered_ladder.price(n as usize)?;
        let scaled = nf.powf(1.0 / r - 1.0) * powered_price;
        let margin = scaled - root_price;
        if margin < -1e-9 * scaled.abs().max(1.0) {
            return Err(Error::LadderInvariant {
                index: n as usize,
                detail: format!(
                    "root-strike price {root_price} exceeds the scaled powered price {scaled}"
                ),
            });
        }
        worst = worst.min(margin);
        acc.add(root_price);
        if n == next_mark {
            averages.push((n, acc.value() / nf.powf(1.0 / r)));
            next_mark = (next_mark * 10).min(horizon);
        }
    }
    let trend = averages.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    Ok(CesaroPriceReport {
        horizon,
        worst_margin: worst,
        averages,
        trend_nonincreasing: trend,
    })
}

fn first_decade_mark(horizon: u64) -> u64 {
    let mut mark = horizon;
    while mark >= 100 {
        mark /= 10;
    }
    mark.max(1)
}

/// Completed upcrossings of the band [a, b]: entries at or below a
/// followed by an exit at or above b.
pub fn upcrossing_count(series: &[f64], a: f64, b: f64) -> Result<u64> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::Config(format!(
            "upcrossing band needs finite a < b, got [{a}, {b}]"
        )));
    }
    let mut armed = false;
    let mut count = 0;
    for &v in series {
        if armed {
            if v >= b {
                count += 1;
                armed = false;
            }
        } else if v <= a {
            armed = true;
        }
    }
    Ok(count)
}

/// Growth evidence from a recorded trajectory: change of log capital over
/// the last factor-10 stretch of rounds, and how far the peak sits above
/// the finish. Forcing shows up as a positive decade gain; a martingale
/// that merely spiked shows a large peak ratio instead.
#[derive(Clone, Copy, Debug)]
pub struct GrowthTrend {
    pub rounds: u64,
    pub log_final: f64,
    /// log K_N - log K_{N/10}.
    pub decade_log_gain: f64,
    pub max_over_final: f64,
}

pub fn growth_trend(rounds: &[RoundRecord]) -> Option<GrowthTrend> {
    let last = rounds.last()?;
    let n = rounds.len();
    let at_decade = rounds[(n / 10).max(1) - 1].capital;
    let log_of = |k: f64| if k > 0.0 { k.ln() } else { f64::NEG_INFINITY };
    let peak = rounds.iter().fold(f64::NEG_INFINITY, |m, r| m.max(r.capital));
    Some(GrowthTrend {
        rounds: last.n,
        log_final: log_of(last.capital),
        decade_log_gain: log_of(last.capital) - log_of(at_decade),
        max_over_final: if last.capital > 0.0 {
            peak / last.capital
        } else {
            f64::INFINITY
        },
    })
}

/// One pointwise failure, named by the grid point that produced it.
#[derive(Clone, Debug)]
pub struct InclusionViolation {
    pub check: &'static str,
    pub z: f64,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
}

const MAX_STORED_VIOLATIONS: usize = 32;

/// Grid verdict on the three dominances the event inclusions use.
#[derive(Clone, Debug)]
pub struct InclusionReport {
    pub points_checked: u64,
    /// h(z)/z^2 was non-increasing on the grid, so the square-ratio
    /// dominance applies and was checked.
    pub square_ratio_applicable: bool,
    pub violation_count: u64,
    /// At most the first 32 violations, each naming (z, n).
    pub violations: Vec<InclusionViolation>,
}

/// Check, on the grid z in {step, 2 step, ..., z_max} and n in 1..=n_max:
/// the payoff ratio h(z)/h(n) dominates the threshold indicator 1{z >= n};
/// when h(z)/z^2 is non-increasing, z^2/n^2 <= h(z)/h(n) below the
/// threshold; and the centered-square bound (z - nu)^2 <= 2 z^2 + 2 nu^2
/// for both signs of z.
pub fn inclusion_checks(
    hedge: &HedgeKind,
    nu: f64,
    z_max: f64,
    z_step: f64,
    n_max: u64,
) -> Result<InclusionReport> {
    hedge.validate()?;
    if !(z_step > 0.0 && z_max >= z_step && z_step.is_finite() && z_max.is_finite()) {
        return Err(Error::Config(format!(
            "grid needs 0 < step <= max, got step {z_step}, max {z_max}"
        )));
    }
    if n_max < 1 {
        return Err(Error::Config("need at least one threshold index".into()));
    }
    if !(nu.is_finite() && nu >= 0.0) {
        return Err(Error::Config(format!("price must be >= 0, got {nu}")));
    }
    let steps = (z_max / z_step).floor() as u64;

    // applicability scan: is h(z)/z^2 non-increasing along the grid?
    let mut decreasing = true;
    let mut prev = f64::INFINITY;
    for i in 1..=steps {
        let z = i as f64 * z_step;
        let ratio = hedge.eval(z) / (z * z);
        if ratio > prev * (1.0 + 1e-12) {
            decreasing = false;
            break;
        }
        prev = ratio;
    }

    let mut report = InclusionReport {
        points_checked: 0,
        square_ratio_applicable: decreasing,
        violation_count: 0,
        violations: Vec::new(),
    };
    let record = |report: &mut InclusionReport, v: InclusionViolation| {
        report.violation_count += 1;
        if report.violations.len() < MAX_STORED_VIOLATIONS {
            report.violations.push(v);
        }
    };

    for i in 1..=steps {
        let z = i as f64 * z_step;
        let hz = hedge.eval(z);
        // centered-square bound, both signs
        for sx in [z, -z] {
            report.points_checked += 1;
            let lhs = (sx - nu) * (sx - nu);
            let rhs = 2.0 * sx * sx + 2.0 * nu * nu;
            if lhs > rhs + 1e-9 * rhs.max(1.0) {
                record(
                    &mut report,
                    InclusionViolation {
                        check: "centered-square",
                        z: sx,
                        n: 0,
                        lhs,
                        rhs,
                    },
                );
            }
        }
        for n in 1..=n_max {
            let hn = hedge.eval(n as f64);
            if hn <= 0.0 {
                continue;
            }
            let ratio = hz / hn;
            if z >= n as f64 {
                report.points_checked += 1;
                if ratio < 1.0 - 1e-12 {
                    record(
                        &mut report,
                        InclusionViolation {
                            check: "threshold-indicator",
                            z,
                            n,
                            lhs: ratio,
                            rhs: 1.0,
                        },
                    );
                }
            } else if decreasing {
                report.points_checked += 1;
                let square = (z * z) / ((n * n) as f64);
                if square > ratio * (1.0 + 1e-12) {
                    record(
                        &mut report,
                        InclusionViolation {
                            check: "square-ratio",
                            z,
                            n,
                            lhs: square,
                            rhs: ratio,
                        },
                    );
                }
            }
        }
    }
    Ok(report)
}
