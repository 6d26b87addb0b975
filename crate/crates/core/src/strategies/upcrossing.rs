//! Buy-low/sell-high overlay on another strategy's capital path. While the
//! target's capital sits below `a` the overlay holds one unit of every bet
//! the target posts, letting go once the capital climbs past `b`. Each
//! completed crossing banks more than b - a, and an open position can lose
//! at most a, which caps how often a non-negative capital path can cross
//! the band.

use super::CapitalTracker;
use crate::engine::{ProtocolVariant, RoundBet, SkepticStrategy};
use crate::error::{Error, Result};

pub struct UpcrossingOverlay {
    target: Box<dyn SkepticStrategy>,
    a: f64,
    b: f64,
    in_position: bool,
    target_capital: CapitalTracker,
    completed: u64,
    initial: f64,
    id: String,
}

/// Band 0 <= a < b. With a = 0 the overlay starts from capital 1 and never
/// trades (the target's capital cannot drop below 0); otherwise it starts
/// from exactly a, the worst an open position can cost.
pub fn upcrossing_overlay(
    target: Box<dyn SkepticStrategy>,
    a: f64,
    b: f64,
) -> Result<UpcrossingOverlay> {
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && b > a) {
        return Err(Error::Config(format!(
            "upcrossing band needs 0 <= a < b, got a = {a}, b = {b}"
        )));
    }
    let id = format!("upcross(a={a},b={b}):{}", target.id());
    let k0 = target.initial_capital();
    Ok(UpcrossingOverlay {
        in_position: k0 < a,
        target_capital: CapitalTracker::new(k0),
        a,
        b,
        target,
        completed: 0,
        initial: if a == 0.0 { 1.0 } else { a },
        id,
    })
}

impl UpcrossingOverlay {
    /// Upcrossings of [a, b] completed by the target's capital so far.
    pub fn completed_upcrossings(&self) -> u64 {
        self.completed
    }

    pub fn in_position(&self) -> bool {
        self.in_position
    }

    /// The target's capital as the overlay tracks it.
    pub fn target_capital(&self) -> f64 {
        self.target_capital.capital()
    }
}

impl SkepticStrategy for UpcrossingOverlay {
    fn id(&self) -> &str {
        &self.id
    }

    fn initial_capital(&self) -> f64 {
        self.initial
    }

    fn variant(&self) -> ProtocolVariant {
        self.target.variant()
    }

    fn bet(&mut self, n: u64) -> Result<RoundBet> {
        // the target always advances, in position or not
        let bet = self.target.bet(n)?;
        self.target_capital.post(&bet);
        Ok(if self.in_position {
            bet
        } else {
            RoundBet::null()
        })
    }

    fn observe(&mut self, n: u64, x: f64) {
        self.target_capital.settle(x);
        self.target.observe(n, x);
        let k = self.target_capital.capital();
        if self.in_position {
            if k > self.b {
                self.in_position = false;
                self.completed += 1;
            }
        } else if k < self.a {
            self.in_position = true;
        }
    }
}
