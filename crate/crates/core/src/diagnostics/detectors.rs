//! Running detectors for the almost-sure events the strategies force. Each
//! detector consumes the move stream round by round and accumulates the
//! defining series of one event; the partial statistic is what the CSV
//! reports and what the capital lower bounds are checked against.
//!
//! Ids follow the event labels used throughout the test plan ("E1" ..
//! "E5r", with p marking a prime). Series with non-negative terms report
//! monotone partial sums; the signed mean-type series (E4 family) are
//! judged by the Cauchy-window criterion in the checks module.

use crate::error::{Error, Result};
use crate::hedge::ladder::{strike_at, LadderFamily, PriceLadder};
use crate::hedge::HedgeKind;
use crate::numeric::KahanSum;
use crate::strategies::hedged_move_value;

enum Series {
    /// h(x_n)/h(n); rounds where h(n) = 0 contribute nothing.
    HedgeRatio { hedge: HedgeKind },
    /// h(x_n)/n^2.
    HedgeOverSquares { hedge: HedgeKind },
    /// Counts rounds with |x_n| >= n^(1/r).
    OversizedCount { inv_r: f64 },
    /// x_n^2 1{|x_n| <= n^(1/r)} / n^(2/r).
    TruncatedSquares { inv_r: f64 },
    /// Squared hedged move over n^(2/r); mirror flips the raw move before
    /// the clip is added.
    HedgedSquares { inv_r: f64, mirror: bool },
    /// x_n/n, signed.
    ScaledMoves,
    /// (hedged move - its ladder price) over n^(1/r), optionally squared
    /// with denominator n^(2/r). The ladder supplies both the clip strike
    /// and the price.
    CenteredHedged {
        ladder: PriceLadder,
        inv_r: f64,
        squared: bool,
    },
}

pub struct EventDetector {
    id: &'static str,
    series: Series,
    rounds: u64,
    acc: KahanSum,
    count: u64,
    nonnegative: bool,
}

fn validate_exponent(r: f64) -> Result<f64> {
    if !(r.is_finite() && r > 1.0 && r < 2.0) {
        return Err(Error::Config(format!(
            "averaging exponent must lie in (1, 2), got {r}"
        )));
    }
    Ok(1.0 / r)
}

/// "E1": the series a hedge-ratio ticket buyer collects.
pub fn hedge_ratio_series(hedge: HedgeKind) -> Result<EventDetector> {
    hedge.validate()?;
    Ok(EventDetector::new(
        "E1",
        Series::HedgeRatio { hedge },
        true,
    ))
}

/// "E1p": the same numerators against square weights.
pub fn hedge_over_squares_series(hedge: HedgeKind) -> Result<EventDetector> {
    hedge.validate()?;
    Ok(EventDetector::new(
        "E1p",
        Series::HedgeOverSquares { hedge },
        true,
    ))
}

/// "E2": how many moves reached the round index.
pub fn oversized_move_count() -> EventDetector {
    EventDetector::new("E2", Series::OversizedCount { inv_r: 1.0 }, true)
}

/// "E2r": how many moves reached n^(1/r).
pub fn oversized_move_count_powered(r: f64) -> Result<EventDetector> {
    let inv_r = validate_exponent(r)?;
    Ok(EventDetector::new(
        "E2r",
        Series::OversizedCount { inv_r },
        true,
    ))
}

/// "E3": squares of the moves that stayed within the round bound.
pub fn truncated_square_series() -> EventDetector {
    EventDetector::new("E3", Series::TruncatedSquares { inv_r: 1.0 }, true)
}

/// "E3r": the n^(1/r)-bounded version.
pub fn truncated_square_series_powered(r: f64) -> Result<EventDetector> {
    let inv_r = validate_exponent(r)?;
    Ok(EventDetector::new(
        "E3r",
        Series::TruncatedSquares { inv_r },
        true,
    ))
}

/// "E3p" (or "E3pp" mirrored): squares of the hedged moves.
pub fn hedged_square_series(mirror: bool) -> EventDetector {
    EventDetector::new(
        if mirror { "E3pp" } else { "E3p" },
        Series::HedgedSquares { inv_r: 1.0, mirror },
        true,
    )
}

/// "E3rp": squares of the n^(1/r)-clipped hedged moves.
pub fn hedged_square_series_powered(r: f64) -> Result<EventDetector> {
    let inv_r = validate_exponent(r)?;
    Ok(EventDetector::new(
        "E3rp",
        Series::HedgedSquares {
            inv_r,
            mirror: false,
        },
        true,
    ))
}

/// "E4": partial sums of x_n/n, the series whose convergence the averaged
/// law rides on.
pub fn scaled_move_series() -> EventDetector {
    EventDetector::new("E4", Series::ScaledMoves, false)
}

fn centered(ladder: PriceLadder, squared: bool, plain: bool) -> Result<EventDetector> {
    let (id, inv_r) = match (ladder.family(), plain, squared) {
        (LadderFamily::Call, true, false) => ("E4p", 1.0),
        (LadderFamily::Call, true, true) => ("E5", 1.0),
        (LadderFamily::CallAtPoweredStrikes { r }, false, false) => ("E4rp", 1.0 / r),
        (LadderFamily::CallAtPoweredStrikes { r }, false, true) => ("E5r", 1.0 / r),
        (family, _, _) => {
            return Err(Error::Config(format!(
                "centered detectors need a plain-call price ladder matching their \
                 strike schedule, got {family:?}"
            )))
        }
    };
    Ok(EventDetector::new(
        id,
        Series::CenteredHedged {
            ladder,
            inv_r,
            squared,
        },
        squared,
    ))
}

/// "E4p": price-centered hedged moves over n. The ladder must price plain
/// calls at integer strikes.
pub fn centered_hedged_mean_series(ladder: PriceLadder) -> Result<EventDetector> {
    centered(ladder, false, true)
}

/// "E5": squared price-centered hedged moves over n^2.
pub fn centered_hedged_square_series(ladder: PriceLadder) -> Result<EventDetector> {
    centered(ladder, true, true)
}

/// "E4rp": price-centered n^(1/r)-clipped moves over n^(1/r). The ladder
/// must price plain calls on the n^(1/r) strike schedule.
pub fn centered_hedged_mean_series_powered(ladder: PriceLadder) -> Result<EventDetector> {
    centered(ladder, false, false)
}

/// "E5r": the squared version over n^(2/r).
pub fn centered_hedged_square_series_powered(ladder: PriceLadder) -> Result<EventDetector> {
    centered(ladder, true, false)
}

fn root_level(nf: f64, inv_r: f64) -> f64 {
    if inv_r == 1.0 {
        nf
    } else {
        nf.powf(inv_r)
    }
}

impl EventDetector {
    fn new(id: &'static str, series: Series, nonnegative: bool) -> Self {
        EventDetector {
            id,
            series,
            rounds: 0,
            acc: KahanSum::default(),
            count: 0,
            nonnegative,
        }
    }

    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Partial sums of the defining series never decrease for this
    /// detector.
    pub fn has_nonnegative_terms(&self) -> bool {
        self.nonnegative
    }

    /// The running partial statistic (the count, for the counters).
    pub fn value(&self) -> f64 {
        match self.series {
            Series::OversizedCount { .. } => self.count as f64,
            _ => self.acc.value(),
        }
    }

    /// Feed round n's move; rounds must arrive consecutively from 1.
    /// Returns the updated partial statistic.
    pub fn update(&mut self, n: u64, x: f64) -> Result<f64> {
        if n != self.rounds + 1 {
            return Err(Error::Config(format!(
                "detector {} expects round {}, got {n}",
                self.id,
                self.rounds + 1
            )));
        }
        self.rounds = n;
        let nf = n as f64;
        match &mut self.series {
            Series::HedgeRatio { hedge } => {
                let hn = hedge.eval(nf);
                if hn > 0.0 {
                    self.acc.add(hedge.eval(x) / hn);
                }
            }
            Series::HedgeOverSquares { hedge } => {
                self.acc.add(hedge.eval(x) / (nf * nf));
            }
            Series::OversizedCount { inv_r } => {
                if x.abs() >= root_level(nf, *inv_r) {
                    self.count += 1;
                }
            }
            Series::TruncatedSquares { inv_r } => {
                let bound = root_level(nf, *inv_r);
                if x.abs() <= bound {
                    self.acc.add((x * x) / (bound * bound));
                }
            }
            Series::HedgedSquares { inv_r, mirror } => {
                let s = root_level(nf, *inv_r);
                let m = hedged_move_value(x, s, *mirror);
                self.acc.add((m * m) / (s * s));
            }
            Series::ScaledMoves => {
                self.acc.add(x / nf);
            }
            Series::CenteredHedged {
                ladder,
                inv_r,
                squared,
            } => {
                let idx = n as usize;
                ladder.ensure_depth(idx)?;
                let strike = strike_at(ladder.family(), idx);
                let price = ladder.price(idx)?;
                let centered = hedged_move_value(x, strike, false) - price;
                let denom = root_level(nf, *inv_r);
                if *squared {
                    self.acc.add((centered * centered) / (denom * denom));
                } else {
                    self.acc.add(centered / denom);
                }
            }
        }
        Ok(self.value())
    }
}

/// The nine detectors of the plain (rate-n) events, in report order. The
/// hedge feeds the ratio series; the ladder prices integer-strike calls
/// for the centered pair.
pub fn plain_detector_set(hedge: HedgeKind, ladder: PriceLadder) -> Result<Vec<EventDetector>> {
    Ok(vec![
        hedge_ratio_series(hedge.clone())?,
        hedge_over_squares_series(hedge)?,
        oversized_move_count(),
        truncated_square_series(),
        hedged_square_series(false),
        hedged_square_series(true),
        scaled_move_series(),
        centered_hedged_mean_series(ladder.clone())?,
        centered_hedged_square_series(ladder)?,
    ])
}

/// The five detectors of the rate-n^(1/r) events, in report order. The
/// ladder must price plain calls on the n^(1/r) strike schedule; r is read
/// off its family.
pub fn powered_detector_set(root_strike_ladder: PriceLadder) -> Result<Vec<EventDetector>> {
    let r = match root_strike_ladder.family() {
        LadderFamily::CallAtPoweredStrikes { r } => r,
        family => {
            return Err(Error::Config(format!(
                "powered detectors need the n^(1/r) strike schedule, got {family:?}"
            )))
        }
    };
    Ok(vec![
        oversized_move_count_powered(r)?,
        truncated_square_series_powered(r)?,
        hedged_square_series_powered(r)?,
        centered_hedged_mean_series_powered(root_strike_ladder.clone())?,
        centered_hedged_square_series_powered(root_strike_ladder)?,
    ])
}

/// A set of detectors fed in lockstep from one move stream.
pub struct DetectorBank {
    detectors: Vec<EventDetector>,
}

impl DetectorBank {
    pub fn new(detectors: Vec<EventDetector>) -> Self {
        DetectorBank { detectors }
    }

    pub fn update_all(&mut self, n: u64, x: f64) -> Result<()> {
        for d in &mut self.detectors {
            d.update(n, x)?;
        }
        Ok(())
    }

    pub fn detectors(&self) -> &[EventDetector] {
        &self.detectors
    }

    pub fn is_empty(&self) -> bool {
        self.detectors.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hedge::measure::PricingMeasure;

    fn exp_ladder(family: LadderFamily) -> PriceLadder {
        let m = PricingMeasure::two_sided_exponential(1.0).unwrap();
        PriceLadder::from_measure(&m, family, 8).unwrap()
    }

    fn feed(d: &mut EventDetector, moves: &[f64]) -> f64 {
        let mut last = d.value();
        for (i, &x) in moves.iter().enumerate() {
            last = d.update((i + 1) as u64, x).unwrap();
        }
        last
    }

    #[test]
    fn ratio_series_counts_full_hits_exactly() {
        let mut d = hedge_ratio_series(HedgeKind::power(2.0)).unwrap();
        let v = feed(&mut d, &[0.0, 0.0, 0.0, 0.0, 5.0]);
        // h(5)/h(5) contributes exactly 1
        assert_eq!(v, 1.0);
        assert_eq!(d.id(), "E1");
    }

    #[test]
    fn truncated_squares_drop_oversized_moves() {
        let mut d = truncated_square_series();
        let v = feed(&mut d, &[0.0, 0.0, 0.0, 0.0, 10.0]);
        assert_eq!(v, 0.0);
        let w = d.update(6, 3.0).unwrap();
        assert!((w - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hedged_squares_keep_the_clip_payoff() {
        let mut d = hedged_square_series(false);
        // x_5 = 10 clips to 10 + (10-5) = 15, adds 225/25
        let v = feed(&mut d, &[0.0, 0.0, 0.0, 0.0, 10.0]);
        assert_eq!(v, 9.0);
        let mut m = hedged_square_series(true);
        // mirrored: -10 + 5 = -5, adds 25/25
        let w = feed(&mut m, &[0.0, 0.0, 0.0, 0.0, 10.0]);
        assert_eq!(w, 1.0);
        assert_eq!(m.id(), "E3pp");
    }

    #[test]
    fn counters_use_inclusive_thresholds() {
        let mut d = oversized_move_count();
        feed(&mut d, &[1.0, -2.0, 2.9, 4.0]);
        // |x| >= n on rounds 1, 2, 4
        assert_eq!(d.value(), 3.0);

        let mut p = oversized_move_count_powered(1.5).unwrap();
        let just_under: Vec<f64> = (1..=20)
            .map(|n| (n as f64).powf(1.0 / 1.5) * 0.999)
            .collect();
        feed(&mut p, &just_under);
        assert_eq!(p.value(), 0.0);
        assert_eq!(p.id(), "E2r");
    }

    #[test]
    fn scaled_moves_cancel_on_alternating_paths() {
        let mut d = scaled_move_series();
        let moves: Vec<f64> = (1..=10)
            .map(|n| if n % 2 == 0 { n as f64 } else { -(n as f64) })
            .collect();
        let v = feed(&mut d, &moves);
        assert!(v.abs() < 1e-15);
        assert!(!d.has_nonnegative_terms());
    }

    #[test]
    fn centered_series_match_a_hand_computation() {
        let ladder = exp_ladder(LadderFamily::Call);
        let mut mean = centered_hedged_mean_series(ladder.clone()).unwrap();
        let mut square = centered_hedged_square_series(ladder).unwrap();
        let moves: [f64; 3] = [0.5, -3.0, 1.0];
        let mut want_mean = 0.0;
        let mut want_sq = 0.0;
        for (i, &x) in moves.iter().enumerate() {
            let n = (i + 1) as f64;
            let clipped = x + (x.abs() - n).max(0.0);
            let c = clipped - (-n).exp();
            want_mean += c / n;
            want_sq += c * c / (n * n);
            mean.update((i + 1) as u64, x).unwrap();
            square.update((i + 1) as u64, x).unwrap();
        }
        assert!((mean.value() - want_mean).abs() < 1e-12);
        assert!((square.value() - want_sq).abs() < 1e-12);
        assert_eq!(mean.id(), "E4p");
        assert_eq!(square.id(), "E5");
    }

    #[test]
    fn powered_centered_series_use_root_strikes() {
        let r = 1.5;
        let ladder = exp_ladder(LadderFamily::CallAtPoweredStrikes { r });
        let mut d = centered_hedged_mean_series_powered(ladder).unwrap();
        assert_eq!(d.id(), "E4rp");
        // x = 0 at round 1: term is -price(1)/1 = -e^{-1}
        let v = d.update(1, 0.0).unwrap();
        assert!((v + (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn centered_constructors_reject_mismatched_ladders() {
        let powered = exp_ladder(LadderFamily::PoweredCall { r: 1.5 });
        assert!(centered_hedged_mean_series(powered.clone()).is_err());
        assert!(centered_hedged_square_series_powered(powered).is_err());
        let plain = exp_ladder(LadderFamily::Call);
        assert!(centered_hedged_mean_series_powered(plain).is_err());
    }

    #[test]
    fn rounds_must_arrive_in_order() {
        let mut d = truncated_square_series();
        d.update(1, 0.0).unwrap();
        assert!(d.update(3, 0.0).is_err());
        assert!(d.update(2, 0.0).is_ok());
    }

    #[test]
    fn nonnegative_detectors_are_monotone_on_a_rough_path() {
        let ladder = exp_ladder(LadderFamily::Call);
        let mut bank = DetectorBank::new(
            plain_detector_set(HedgeKind::power(2.0), ladder).unwrap(),
        );
        let mut last: Vec<f64> = bank.detectors().iter().map(|d| d.value()).collect();
        for n in 1..=200u64 {
            let x = ((n * 97 % 31) as f64 - 15.0) * 0.8;
            bank.update_all(n, x).unwrap();
            for (d, prev) in bank.detectors().iter().zip(&mut last) {
                if d.has_nonnegative_terms() {
                    assert!(d.value() >= *prev - 1e-15, "{} shrank", d.id());
                }
                *prev = d.value();
            }
        }
    }

    #[test]
    fn detector_sets_carry_the_report_ids() {
        let plain = plain_detector_set(
            HedgeKind::power(2.0),
            exp_ladder(LadderFamily::Call),
        )
        .unwrap();
        let ids: Vec<&str> = plain.iter().map(|d| d.id()).collect();
        assert_eq!(
            ids,
            ["E1", "E1p", "E2", "E3", "E3p", "E3pp", "E4", "E4p", "E5"]
        );
        let powered =
            powered_detector_set(exp_ladder(LadderFamily::CallAtPoweredStrikes { r: 1.5 }))
                .unwrap();
        let ids: Vec<&str> = powered.iter().map(|d| d.id()).collect();
        assert_eq!(ids, ["E2r", "E3r", "E3rp", "E4rp", "E5r"]);
        assert!(powered_detector_set(exp_ladder(LadderFamily::Call)).is_err());
    }
}
