//! The round loop. Each round the skeptic posts a stake on the move plus a
//! list of priced tickets, reality picks a move, and the skeptic's capital
//! absorbs the increment. Capital must stay above a small negative tolerance
//! (scaled by the starting capital); dipping into the tolerance band is
//! recorded as a warning, dropping below it aborts the run.

use crate::error::{Error, Result};
use crate::hedge::ladder::{trapezoid_payoff_level, LadderFamily};
use crate::hedge::PricedHedge;
use crate::numeric::KahanSum;

/// One priced ticket inside a round bet.
#[derive(Clone, Debug)]
pub enum BetPart {
    /// `units` of a single payoff at its quoted price.
    Hedge { hedge: PricedHedge, units: f64 },
    /// `units` of the k-th bull spread of a call family. `unit_price` is the
    /// price of one spread (difference of two adjacent ladder prices).
    Spread {
        family: LadderFamily,
        index: u64,
        units: f64,
        unit_price: f64,
    },
    /// `unit_scale` times the weighted trapezoid sum
    /// sum_{k < count} (k+1)^weight_exp * T_k over a call family.
    /// `weighted_price_sum` caches sum (k+1)^weight_exp * mu_k, so the
    /// bundle's cost is unit_scale * weighted_price_sum. Payoff evaluation
    /// only touches the at most three trapezoids active at the move.
    TrapezoidBundle {
        family: LadderFamily,
        weight_exp: f64,
        count: u64,
        unit_scale: f64,
        weighted_price_sum: f64,
    },
}

#[inline]
pub(crate) fn trapezoid_weight(k: u64, e: f64) -> f64 {
    let b = (k + 1) as f64;
    if e == 2.0 {
        b * b
    } else if e == 1.0 {
        b
    } else {
        b.powf(e)
    }
}

impl BetPart {
    /// Cost charged when the bet is placed.
    pub fn cost(&self) -> f64 {
        match self {
            BetPart::Hedge { hedge, units } => units * hedge.price,
            BetPart::Spread {
                units, unit_price, ..
            } => units * unit_price,
            BetPart::TrapezoidBundle {
                unit_scale,
                weighted_price_sum,
                ..
            } => unit_scale * weighted_price_sum,
        }
    }

    /// Payoff collected after the move lands.
    pub fn payoff(&self, x: f64) -> f64 {
        match self {
            BetPart::Hedge { hedge, units } => units * hedge.kind.eval(x),
            BetPart::Spread {
                family,
                index,
                units,
                ..
            } => units * family.spread_payoff(x, *index),
            BetPart::TrapezoidBundle {
                family,
                weight_exp,
                count,
                unit_scale,
                ..
            } => {
                if *count == 0 {
                    return 0.0;
                }
                let y = family.level_coord(x);
                // trapezoid k is supported on (k-1, k+2); clamp in f64 first
                // so huge moves cannot overflow the index arithmetic
                let lo = (y.ceil() - 2.0).max(0.0).min(*count as f64) as i64;
                let hi = (y.floor() + 1.0).min(*count as f64 - 1.0) as i64;
                let mut s = 0.0;
                let mut k = lo;
                while k <= hi {
                    let t = trapezoid_payoff_level(y, k as u64);
                    if t != 0.0 {
                        s += trapezoid_weight(k as u64, *weight_exp) * t;
                    }
                    k += 1;
                }
                s * unit_scale
            }
        }
    }

    fn scale(&mut self, w: f64) {
        match self {
            BetPart::Hedge { units, .. } | BetPart::Spread { units, .. } => *units *= w,
            BetPart::TrapezoidBundle { unit_scale, .. } => *unit_scale *= w,
        }
    }

    fn units_nonnegative(&self) -> bool {
        match self {
            BetPart::Hedge { units, .. } | BetPart::Spread { units, .. } => *units >= 0.0,
            BetPart::TrapezoidBundle { unit_scale, .. } => *unit_scale >= 0.0,
        }
    }

    fn is_finite(&self) -> bool {
        match self {
            BetPart::Hedge { hedge, units } => units.is_finite() && hedge.price.is_finite(),
            BetPart::Spread {
                units, unit_price, ..
            } => units.is_finite() && unit_price.is_finite(),
            BetPart::TrapezoidBundle {
                unit_scale,
                weighted_price_sum,
                ..
            } => unit_scale.is_finite() && weighted_price_sum.is_finite(),
        }
    }
}

/// A full round bet: a signed stake on the raw move plus priced tickets.
#[derive(Clone, Debug, Default)]
pub struct RoundBet {
    pub stake: f64,
    pub parts: Vec<BetPart>,
}

impl RoundBet {
    /// Bet nothing.
    pub fn null() -> Self {
        RoundBet::default()
    }

    pub fn stake_only(stake: f64) -> Self {
        RoundBet {
            stake,
            parts: Vec::new(),
        }
    }

    /// Total cost of the ticket list.
    pub fn total_cost(&self) -> f64 {
        self.parts.iter().map(BetPart::cost).sum()
    }

    /// Capital change when the move is x.
    pub fn increment(&self, x: f64) -> f64 {
        let mut acc = self.stake * x;
        for p in &self.parts {
            acc += p.payoff(x) - p.cost();
        }
        acc
    }

    /// This bet scaled by w (stake and all units).
    pub fn scaled(&self, w: f64) -> Self {
        let mut b = self.clone();
        b.stake *= w;
        for p in &mut b.parts {
            p.scale(w);
        }
        b
    }

    /// Accumulate w times another bet into this one.
    pub fn add_scaled(&mut self, other: &RoundBet, w: f64) {
        self.stake += w * other.stake;
        for p in &other.parts {
            let mut p = p.clone();
            p.scale(w);
            self.parts.push(p);
        }
    }
}

/// Which bet shapes the protocol admits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProtocolVariant {
    /// At most one ticket per round, a plain hedge, bought (not sold).
    SingleHedge,
    /// Any finite ticket list per round, all bought.
    HedgeSet,
    /// Any finite ticket list, signed units allowed.
    Unrestricted,
}

fn validate_bet(bet: &RoundBet, variant: ProtocolVariant, round: u64) -> Result<()> {
    let bad = |detail: String| {
        Err(Error::ProtocolViolation {
            round,
            detail,
        })
    };
    if !bet.stake.is_finite() {
        return bad(format!("non-finite stake {}", bet.stake));
    }
    for p in &bet.parts {
        if !p.is_finite() {
            return bad("non-finite ticket units or price".into());
        }
    }
    match variant {
        ProtocolVariant::SingleHedge => {
            if bet.parts.len() > 1 {
                return bad(format!(
                    "single-hedge round admits one ticket, got {}",
                    bet.parts.len()
                ));
            }
            if let Some(p) = bet.parts.first() {
                if !matches!(p, BetPart::Hedge { .. }) {
                    return bad("single-hedge round admits only a plain hedge ticket".into());
                }
                if !p.units_nonnegative() {
                    return bad("hedge units must be non-negative".into());
                }
            }
            Ok(())
        }
        ProtocolVariant::HedgeSet => {
            for p in &bet.parts {
                if !p.units_nonnegative() {
                    return bad("ticket units must be non-negative".into());
                }
            }
            Ok(())
        }
        ProtocolVariant::Unrestricted => Ok(()),
    }
}

/// The betting side of the game. Strategies keep their own view of their
/// capital via `observe`, which lets mixtures run components at their own
/// internal scale while the engine tracks the game account.
pub trait SkepticStrategy: Send {
    fn id(&self) -> &str;
    fn initial_capital(&self) -> f64 {
        1.0
    }
    fn variant(&self) -> ProtocolVariant;
    /// The bet for round n (1-based). Called before the move is revealed.
    fn bet(&mut self, n: u64) -> Result<RoundBet>;
    /// The move for round n, revealed after the bet.
    fn observe(&mut self, n: u64, x: f64);
}

/// The move-picking side.
pub trait RealityStrategy: Send {
    fn id(&self) -> &str;
    /// The move for round n. `bet` is the skeptic's posted bet when the
    /// run is configured to reveal it.
    fn next_move(&mut self, n: u64, bet: Option<&RoundBet>) -> f64;
}

/// Never bets; capital stays exactly at its start.
pub struct NullSkeptic {
    variant: ProtocolVariant,
}

impl NullSkeptic {
    pub fn new() -> Self {
        NullSkeptic {
            variant: ProtocolVariant::SingleHedge,
        }
    }
}

impl Default for NullSkeptic {
    fn default() -> Self {
        Self::new()
    }
}

impl SkepticStrategy for NullSkeptic {
    fn id(&self) -> &str {
        "null"
    }
    fn variant(&self) -> ProtocolVariant {
        self.variant
    }
    fn bet(&mut self, _n: u64) -> Result<RoundBet> {
        Ok(RoundBet::null())
    }
    fn observe(&mut self, _n: u64, _x: f64) {}
}

/// Run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub rounds: u64,
    pub variant: ProtocolVariant,
    /// Keep a per-round record (disable for very long runs).
    pub record_trace: bool,
    /// Reveal each bet to reality before it moves (the adversarial order;
    /// sampled realities ignore it either way).
    pub reality_sees_bet: bool,
    /// Keep every posted bet so the run can be replayed.
    pub record_bets: bool,
    /// Collateral tolerance as a fraction of max(1, starting capital).
    pub collateral_tolerance_scale: f64,
}

impl RunConfig {
    pub fn new(rounds: u64, variant: ProtocolVariant) -> Self {
        RunConfig {
            rounds,
            variant,
            record_trace: true,
            reality_sees_bet: true,
            record_bets: false,
            collateral_tolerance_scale: 1e-9,
        }
    }
}

/// One completed round, as recorded in traces and trajectory files.
#[derive(Clone, Copy, Debug)]
pub struct RoundRecord {
    pub n: u64,
    pub x: f64,
    pub stake: f64,
    /// Cost of the round's ticket list.
    pub bet_cost: f64,
    /// Capital after the round settles.
    pub capital: f64,
}

const MAX_STORED_WARNINGS: usize = 16;

/// Result of a completed run.
#[derive(Clone, Debug)]
pub struct GameHistory {
    pub initial_capital: f64,
    pub final_capital: f64,
    pub rounds_played: u64,
    pub min_capital: f64,
    pub max_capital: f64,
    /// First few tolerance-band warnings, plus the total count.
    pub warnings: Vec<String>,
    pub warning_count: u64,
    /// Per-round records when tracing was on.
    pub rounds: Vec<RoundRecord>,
    /// Posted bets when bet recording was on.
    pub bets: Vec<RoundBet>,
}

impl GameHistory {
    /// Recompute the capital column from the stored bets and moves, using
    /// the same accumulation the engine used. With tracing and bet
    /// recording both on, the result matches the recorded capitals bit for
    /// bit.
    pub fn replay_capital(&self) -> Result<Vec<f64>> {
        if self.bets.len() != self.rounds.len() {
            return Err(Error::Config(format!(
                "replay needs one stored bet per stored round, got {} bets for {} rounds",
                self.bets.len(),
                self.rounds.len()
            )));
        }
        let mut capital = KahanSum::new(self.initial_capital);
        let mut out = Vec::with_capacity(self.rounds.len());
        for (bet, rec) in self.bets.iter().zip(&self.rounds) {
            capital.add(bet.increment(rec.x));
            out.push(capital.value());
        }
        Ok(out)
    }
}

/// Run the game, passing every settled round to `observer` before the
/// collateral check (so an aborting round is still visible to the caller).
pub fn run_game_observed(
    skeptic: &mut dyn SkepticStrategy,
    reality: &mut dyn RealityStrategy,
    cfg: &RunConfig,
    mut observer: impl FnMut(u64, f64, &RoundBet, f64),
) -> Result<GameHistory> {
    let k0 = skeptic.initial_capital();
    if !(k0.is_finite() && k0 > 0.0) {
        return Err(Error::Config(format!(
            "starting capital must be positive and finite, got {k0}"
        )));
    }
    let tol = cfg.collateral_tolerance_scale.max(0.0) * k0.max(1.0);
    let mut capital = KahanSum::new(k0);
    let mut min_capital = k0;
    let mut max_capital = k0;
    let mut warnings = Vec::new();
    let mut warning_count = 0u64;
    let mut rounds = Vec::with_capacity(if cfg.record_trace {
        cfg.rounds.min(1 << 22) as usize
    } else {
        0
    });
    let mut bets = Vec::with_capacity(if cfg.record_bets {
        cfg.rounds.min(1 << 22) as usize
    } else {
        0
    });

    for n in 1..=cfg.rounds {
        let bet = skeptic.bet(n)?;
        validate_bet(&bet, cfg.variant, n)?;
        let x = reality.next_move(n, if cfg.reality_sees_bet { Some(&bet) } else { None });
        if !x.is_finite() {
            return Err(Error::ProtocolViolation {
                round: n,
                detail: format!("reality produced a non-finite move {x}"),
            });
        }
        capital.add(bet.increment(x));
        let k = capital.value();
        if cfg.record_trace {
            rounds.push(RoundRecord {
                n,
                x,
                stake: bet.stake,
                bet_cost: bet.total_cost(),
                capital: k,
            });
        }
        if cfg.record_bets {
            bets.push(bet.clone());
        }
        observer(n, x, &bet, k);
        if k < -tol {
            return Err(Error::CollateralViolation {
                round: n,
                capital: k,
                tolerance: tol,
            });
        }
        if k < 0.0 {
            warning_count += 1;
            if warnings.len() < MAX_STORED_WARNINGS {
                warnings.push(format!(
                    "round {n}: capital {k:e} inside the tolerance band (tol {tol:e})"
                ));
            }
        }
        skeptic.observe(n, x);
        min_capital = min_capital.min(k);
        max_capital = max_capital.max(k);
    }

    Ok(GameHistory {
        initial_capital: k0,
        final_capital: capital.value(),
        rounds_played: cfg.rounds,
        min_capital,
        max_capital,
        warnings,
        warning_count,
        rounds,
        bets,
    })
}

/// Run the game without an observer.
pub fn run_game(
    skeptic: &mut dyn SkepticStrategy,
    reality: &mut dyn RealityStrategy,
    cfg: &RunConfig,
) -> Result<GameHistory> {
    run_game_observed(skeptic, reality, cfg, |_, _, _, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hedge::HedgeKind;

    pub(crate) struct Scripted {
        bets: Vec<RoundBet>,
        variant: ProtocolVariant,
    }

    impl Scripted {
        pub(crate) fn new(bets: Vec<RoundBet>, variant: ProtocolVariant) -> Self {
            Scripted { bets, variant }
        }
    }

    impl SkepticStrategy for Scripted {
        fn id(&self) -> &str {
            "scripted"
        }
        fn variant(&self) -> ProtocolVariant {
            self.variant
        }
        fn bet(&mut self, n: u64) -> Result<RoundBet> {
            Ok(self
                .bets
                .get(n as usize - 1)
                .cloned()
                .unwrap_or_else(RoundBet::null))
        }
        fn observe(&mut self, _n: u64, _x: f64) {}
    }

    pub(crate) struct Moves(pub Vec<f64>);

    impl RealityStrategy for Moves {
        fn id(&self) -> &str {
            "scripted-moves"
        }
        fn next_move(&mut self, n: u64, _bet: Option<&RoundBet>) -> f64 {
            self.0.get(n as usize - 1).copied().unwrap_or(0.0)
        }
    }

    fn square_ticket(units: f64) -> RoundBet {
        RoundBet {
            stake: 0.0,
            parts: vec![BetPart::Hedge {
                hedge: PricedHedge::new(HedgeKind::power(2.0), 1.0).unwrap(),
                units,
            }],
        }
    }

    #[test]
    fn null_skeptic_keeps_capital_flat() {
        let mut s = NullSkeptic::new();
        let mut r = Moves(vec![3.0, -7.0, 0.5]);
        let cfg = RunConfig::new(3, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        assert_eq!(h.final_capital, 1.0);
        for rec in &h.rounds {
            assert_eq!(rec.capital, 1.0);
        }
        assert_eq!(h.warning_count, 0);
    }

    #[test]
    fn one_unit_square_ticket_quadruples_on_two() {
        let mut s = Scripted::new(vec![square_ticket(1.0)], ProtocolVariant::SingleHedge);
        let mut r = Moves(vec![2.0]);
        let cfg = RunConfig::new(1, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        // 1 + (4 - 1)
        assert_eq!(h.final_capital, 4.0);
    }

    #[test]
    fn naked_stake_goes_bust() {
        let mut s = Scripted::new(
            vec![RoundBet::stake_only(1.0)],
            ProtocolVariant::SingleHedge,
        );
        let mut r = Moves(vec![-2.0]);
        let cfg = RunConfig::new(1, ProtocolVariant::SingleHedge);
        match run_game(&mut s, &mut r, &cfg) {
            Err(Error::CollateralViolation { round, capital, .. }) => {
                assert_eq!(round, 1);
                assert_eq!(capital, -1.0);
            }
            other => panic!("expected collateral violation, got {other:?}"),
        }
    }

    #[test]
    fn tolerance_band_warns_but_completes() {
        let mut s = Scripted::new(
            vec![RoundBet::stake_only(1.0)],
            ProtocolVariant::SingleHedge,
        );
        let mut r = Moves(vec![-(1.0 + 5e-10)]);
        let cfg = RunConfig::new(1, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        assert_eq!(h.warning_count, 1);
        assert!(h.final_capital < 0.0 && h.final_capital > -1e-9);
    }

    #[test]
    fn recorded_bets_replay_bit_for_bit() {
        let bets: Vec<RoundBet> = (1..=40)
            .map(|n| {
                let mut b = square_ticket(0.01 / n as f64);
                b.stake = if n % 2 == 0 { 1e-3 } else { -1e-3 };
                b
            })
            .collect();
        let moves: Vec<f64> = (1..=40).map(|n| ((n * 37) % 11) as f64 / 3.0 - 1.5).collect();
        let mut s = Scripted::new(bets, ProtocolVariant::Unrestricted);
        let mut r = Moves(moves);
        let mut cfg = RunConfig::new(40, ProtocolVariant::Unrestricted);
        cfg.record_bets = true;
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        let replayed = h.replay_capital().unwrap();
        assert_eq!(replayed.len(), 40);
        for (r_cap, rec) in replayed.iter().zip(&h.rounds) {
            assert_eq!(r_cap.to_bits(), rec.capital.to_bits());
        }
        assert_eq!(*replayed.last().unwrap(), h.final_capital);
    }

    #[test]
    fn single_hedge_variant_rejects_ticket_lists_and_short_sales() {
        let two = RoundBet {
            stake: 0.0,
            parts: vec![
                BetPart::Hedge {
                    hedge: PricedHedge::new(HedgeKind::power(2.0), 1.0).unwrap(),
                    units: 1.0,
                },
                BetPart::Hedge {
                    hedge: PricedHedge::new(HedgeKind::call(1.0), 0.5).unwrap(),
                    units: 1.0,
                },
            ],
        };
        assert!(validate_bet(&two, ProtocolVariant::SingleHedge, 1).is_err());
        assert!(validate_bet(&two, ProtocolVariant::HedgeSet, 1).is_ok());

        let short = square_ticket(-1.0);
        assert!(validate_bet(&short, ProtocolVariant::SingleHedge, 1).is_err());
        assert!(validate_bet(&short, ProtocolVariant::HedgeSet, 1).is_err());
        assert!(validate_bet(&short, ProtocolVariant::Unrestricted, 1).is_ok());

        let spread = RoundBet {
            stake: 0.0,
            parts: vec![BetPart::Spread {
                family: LadderFamily::Call,
                index: 0,
                units: 1.0,
                unit_price: 0.5,
            }],
        };
        assert!(validate_bet(&spread, ProtocolVariant::SingleHedge, 1).is_err());
        assert!(validate_bet(&spread, ProtocolVariant::HedgeSet, 1).is_ok());
    }

    #[test]
    fn bundle_payoff_matches_explicit_sum() {
        let fam = LadderFamily::PoweredCall { r: 1.5 };
        let bundle = BetPart::TrapezoidBundle {
            family: fam,
            weight_exp: 2.0,
            count: 40,
            unit_scale: 0.25,
            weighted_price_sum: 1.0,
        };
        for &x in &[0.0, 0.3, 1.0, -2.7, 5.5, -9.99, 11.4, 30.0] {
            let y = fam.level_coord(x);
            let explicit: f64 = (0..40)
                .map(|k| ((k + 1) * (k + 1)) as f64 * trapezoid_payoff_level(y, k))
                .sum::<f64>()
                * 0.25;
            let got = bundle.payoff(x);
            assert!(
                (got - explicit).abs() <= 1e-12 * explicit.abs().max(1.0),
                "x={x}: {got} vs {explicit}"
            );
        }
        // beyond the last trapezoid's support the bundle pays nothing
        let far = BetPart::TrapezoidBundle {
            family: LadderFamily::Call,
            weight_exp: 2.0,
            count: 3,
            unit_scale: 1.0,
            weighted_price_sum: 0.0,
        };
        assert_eq!(far.payoff(100.0), 0.0);
        assert_eq!(far.payoff(1e300), 0.0);
    }

    #[test]
    fn spread_part_payoff() {
        let p = BetPart::Spread {
            family: LadderFamily::Call,
            index: 2,
            units: 3.0,
            unit_price: 0.125,
        };
        assert_eq!(p.payoff(2.5), 1.5);
        assert_eq!(p.payoff(-10.0), 3.0);
        assert_eq!(p.payoff(1.0), 0.0);
        assert_eq!(p.cost(), 0.375);
    }

    #[test]
    fn bets_combine_linearly() {
        let b1 = square_ticket(2.0);
        let mut b2 = RoundBet::stake_only(-0.5);
        b2.parts.push(BetPart::Spread {
            family: LadderFamily::Call,
            index: 1,
            units: 1.0,
            unit_price: 0.25,
        });
        let mut mix = RoundBet::null();
        mix.add_scaled(&b1, 0.75);
        mix.add_scaled(&b2, 0.25);
        for &x in &[-3.0, 0.0, 1.7, 2.0] {
            let want = 0.75 * b1.increment(x) + 0.25 * b2.increment(x);
            assert!((mix.increment(x) - want).abs() < 1e-12);
        }
        let sc = b1.scaled(0.1);
        assert!((sc.increment(2.0) - 0.1 * b1.increment(2.0)).abs() < 1e-15);
    }

    #[test]
    fn reality_sees_bet_only_when_asked() {
        struct Probe {
            saw: Vec<bool>,
        }
        impl RealityStrategy for Probe {
            fn id(&self) -> &str {
                "probe"
            }
            fn next_move(&mut self, _n: u64, bet: Option<&RoundBet>) -> f64 {
                self.saw.push(bet.is_some());
                0.0
            }
        }
        let mut cfg = RunConfig::new(2, ProtocolVariant::SingleHedge);
        let mut probe = Probe { saw: Vec::new() };
        run_game(&mut NullSkeptic::new(), &mut probe, &cfg).unwrap();
        assert_eq!(probe.saw, vec![true, true]);

        cfg.reality_sees_bet = false;
        let mut probe = Probe { saw: Vec::new() };
        run_game(&mut NullSkeptic::new(), &mut probe, &cfg).unwrap();
        assert_eq!(probe.saw, vec![false, false]);
    }

    #[test]
    fn capital_extremes_tracked() {
        let bets = vec![square_ticket(1.0), RoundBet::stake_only(-1.0)];
        let mut s = Scripted::new(bets, ProtocolVariant::SingleHedge);
        let mut r = Moves(vec![3.0, 2.0]);
        let cfg = RunConfig::new(2, ProtocolVariant::SingleHedge);
        let h = run_game(&mut s, &mut r, &cfg).unwrap();
        // 1 -> 1 + (9 - 1) = 9 -> 9 - 2 = 7
        assert_eq!(h.max_capital, 9.0);
        assert_eq!(h.final_capital, 7.0);
        assert_eq!(h.min_capital, 1.0);
    }

    #[test]
    fn non_finite_moves_rejected() {
        struct NanReality;
        impl RealityStrategy for NanReality {
            fn id(&self) -> &str {
                "nan"
            }
            fn next_move(&mut self, _n: u64, _bet: Option<&RoundBet>) -> f64 {
                f64::NAN
            }
        }
        let cfg = RunConfig::new(1, ProtocolVariant::SingleHedge);
        let err = run_game(&mut NullSkeptic::new(), &mut NanReality, &cfg);
        assert!(matches!(err, Err(Error::ProtocolViolation { round: 1, .. })));
    }
}
