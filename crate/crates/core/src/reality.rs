//! Move generators: fixed deterministic paths, iid draws from a pricing
//! measure, the calibrated adversaries that spend exactly the hedge price
//! in expectation, and replay of a recorded path.

use crate::engine::{RealityStrategy, RoundBet};
use crate::error::{Error, Result};
use crate::hedge::measure::PricingMeasure;
use crate::hedge::HedgeKind;
use crate::rng::SimRng;

/// Fixed move paths. All are computable from the round index alone except
/// the drift, which tracks a harmonic running sum.
#[derive(Clone, Debug)]
pub enum PathKind {
    Zeros,
    Constant(f64),
    /// +v on odd rounds, -v on even.
    Alternating(f64),
    /// Move n at rounds that are powers of two, 0 elsewhere.
    Spike,
    /// x_n = 1 + sum_{i<n} 1/i, so the sample mean after n rounds is
    /// exactly the n-th harmonic number: a mean that never settles.
    HarmonicDrift,
}

/// Deterministic reality following one of the fixed paths.
pub struct DeterministicReality {
    kind: PathKind,
    id: String,
    /// Harmonic sum through the last round served (drift only).
    h: f64,
    last_n: u64,
}

impl DeterministicReality {
    pub fn new(kind: PathKind) -> Self {
        let id = match &kind {
            PathKind::Zeros => "zeros".to_string(),
            PathKind::Constant(v) => format!("constant({v})"),
            PathKind::Alternating(v) => format!("alternating({v})"),
            PathKind::Spike => "spike".to_string(),
            PathKind::HarmonicDrift => "harmonic-drift".to_string(),
        };
        DeterministicReality {
            kind,
            id,
            h: 0.0,
            last_n: 0,
        }
    }
}

impl RealityStrategy for DeterministicReality {
    fn id(&self) -> &str {
        &self.id
    }

    fn next_move(&mut self, n: u64, _bet: Option<&RoundBet>) -> f64 {
        match self.kind {
            PathKind::Zeros => 0.0,
            PathKind::Constant(v) => v,
            PathKind::Alternating(v) => {
                if n % 2 == 1 {
                    v
                } else {
                    -v
                }
            }
            PathKind::Spike => {
                if n.is_power_of_two() {
                    n as f64
                } else {
                    0.0
                }
            }
            PathKind::HarmonicDrift => {
                if n != self.last_n + 1 {
                    // out-of-order query: rebuild the harmonic sum
                    self.h = (1..n).map(|i| 1.0 / i as f64).sum();
                }
                let x = self.h + 1.0;
                self.h += 1.0 / n as f64;
                self.last_n = n;
                x
            }
        }
    }
}

/// Independent draws from a pricing measure. Continuous families draw the
/// sign first, then the magnitude by inverting the tail; discrete measures
/// scan the stored atoms once.
pub struct IidReality {
    measure: PricingMeasure,
    rng: SimRng,
    id: String,
}

impl IidReality {
    pub fn new(measure: PricingMeasure, seed: u64, stream: u64) -> Self {
        let id = format!("iid:{measure}");
        IidReality {
            measure,
            rng: SimRng::new(seed, stream),
            id,
        }
    }

    fn draw(&mut self) -> f64 {
        match &self.measure {
            PricingMeasure::Discrete { support } => {
                let u = self.rng.uniform01();
                let mut acc = 0.0;
                for &(x, m) in support {
                    acc += m;
                    if u < acc {
                        return x;
                    }
                }
                // u landed in the rounding sliver past the last cumulative mass
                support[support.len() - 1].0
            }
            PricingMeasure::TwoSidedExponential { rate } => {
                let s = self.rng.sign();
                let u = self.rng.uniform01_open_left();
                s * (-u.ln() / rate)
            }
            PricingMeasure::TwoSidedPareto { tail_index, scale } => {
                let s = self.rng.sign();
                let u = self.rng.uniform01_open_left();
                s * scale * u.powf(-1.0 / tail_index)
            }
        }
    }
}

impl RealityStrategy for IidReality {
    fn id(&self) -> &str {
        &self.id
    }

    fn next_move(&mut self, _n: u64, _bet: Option<&RoundBet>) -> f64 {
        self.draw()
    }
}

/// Grows spikes of size n^(1/r) just often enough that every round costs the
/// quoted price in expectation: P(move = +-n^(1/r)) = nu/(2n) once n > nu,
/// 0 otherwise. The averaged moves then miss the strong law at exponent r.
pub struct PowerSpikeAdversary {
    r: f64,
    nu: f64,
    rng: SimRng,
    id: String,
}

impl PowerSpikeAdversary {
    pub fn new(r: f64, nu: f64, seed: u64, stream: u64) -> Result<Self> {
        if !(r.is_finite() && (1.0..2.0).contains(&r)) {
            return Err(Error::Config(format!(
                "spike exponent must sit in [1, 2), got {r}"
            )));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::Config(format!("spike budget must be > 0, got {nu}")));
        }
        Ok(PowerSpikeAdversary {
            r,
            nu,
            id: format!("adversary-power(r={r},nu={nu})"),
            rng: SimRng::new(seed, stream),
        })
    }
}

impl RealityStrategy for PowerSpikeAdversary {
    fn id(&self) -> &str {
        &self.id
    }

    fn next_move(&mut self, n: u64, _bet: Option<&RoundBet>) -> f64 {
        let nf = n as f64;
        if nf <= self.nu {
            // inactive round; deliberately consumes no randomness
            return 0.0;
        }
        let u = self.rng.uniform01();
        let p = self.nu / nf;
        if u < p {
            let mag = if self.r == 1.0 { nf } else { nf.powf(1.0 / self.r) };
            if u < 0.5 * p {
                mag
            } else {
                -mag
            }
        } else {
            0.0
        }
    }
}

/// Spikes of size n calibrated against an arbitrary payoff: each active
/// round satisfies E[h(move)] = nu exactly, so a price-nu hedge never
/// profits in expectation, yet the moves break the averaged law the hedge
/// was bought to force. Needs h(0) = 0 so inactive rounds are free.
pub struct HedgeSpikeAdversary {
    hedge: HedgeKind,
    nu: f64,
    rng: SimRng,
    id: String,
}

impl HedgeSpikeAdversary {
    pub fn new(hedge: HedgeKind, nu: f64, seed: u64, stream: u64) -> Result<Self> {
        hedge.validate()?;
        if hedge.eval(0.0) != 0.0 {
            return Err(Error::Config(format!(
                "hedge-calibrated spikes need a payoff vanishing at 0, got h(0) = {}",
                hedge.eval(0.0)
            )));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::Config(format!("spike budget must be > 0, got {nu}")));
        }
        Ok(HedgeSpikeAdversary {
            id: format!("adversary-hedge({hedge},nu={nu})"),
            hedge,
            nu,
            rng: SimRng::new(seed, stream),
        })
    }
}

impl RealityStrategy for HedgeSpikeAdversary {
    fn id(&self) -> &str {
        &self.id
    }

    fn next_move(&mut self, n: u64, _bet: Option<&RoundBet>) -> f64 {
        let nf = n as f64;
        let hn = self.hedge.eval(nf);
        if hn <= self.nu {
            // spending nu on rounds this early would need mass > 1
            return 0.0;
        }
        let u = self.rng.uniform01();
        let p = self.nu / hn;
        if u < p {
            if u < 0.5 * p {
                nf
            } else {
                -nf
            }
        } else {
            0.0
        }
    }
}

/// Replays a stored path; rounds past its end are 0.
pub struct ReplayReality {
    moves: Vec<f64>,
    id: String,
}

impl ReplayReality {
    pub fn new(moves: Vec<f64>) -> Self {
        ReplayReality {
            id: format!("replay({} moves)", moves.len()),
            moves,
        }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }
}

impl RealityStrategy for ReplayReality {
    fn id(&self) -> &str {
        &self.id
    }

    fn next_move(&mut self, n: u64, _bet: Option<&RoundBet>) -> f64 {
        self.moves.get(n as usize - 1).copied().unwrap_or(0.0)
    }
}
