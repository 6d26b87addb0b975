//! Small numeric kernels shared across the crate: compensated and pairwise
//! summation, zeta-function tails, harmonic numbers, and the Wilson score
//! interval. All of these are hot paths or feed collateral-safety budgets,
//! so they avoid allocation and keep float behavior deterministic.

/// Two-sided z value for a 99% Wilson score interval.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Kahan–Babuska compensated accumulator.
///
/// Long games accumulate 1e6+ capital increments; naive summation drifts
/// enough to blur the 1e-9 collateral tolerance. Neumaier's variant also
/// handles increments larger than the running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new(initial: f64) -> Self {
        KahanSum {
            sum: initial,
            comp: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Pairwise summation: order-deterministic and far more accurate than a
/// left fold for long vectors.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        let mut acc = KahanSum::default();
        for &x in xs {
            acc.add(x);
        }
        return acc.value();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Tail of the zeta series: sum over j >= m of j^(-s), for s > 1, m >= 1.
///
/// First ten terms are summed directly, the remainder comes from the
/// Euler–Maclaurin expansion; relative accuracy is ~1e-13 over the ranges
/// used here (s in (1, 4], m up to 1e7).
pub fn zeta_tail(s: f64, m: u64) -> f64 {
    assert!(s > 1.0, "zeta tail requires s > 1, got {s}");
    assert!(m >= 1);
    let big_m = m + 64;
    let mut head = KahanSum::default();
    for j in m..big_m {
        head.add((j as f64).powf(-s));
    }
    let x = big_m as f64;
    let integral = x.powf(1.0 - s) / (s - 1.0);
    let half = 0.5 * x.powf(-s);
    let d1 = s * x.powf(-s - 1.0) / 12.0;
    let d3 = s * (s + 1.0) * (s + 2.0) * x.powf(-s - 3.0) / 720.0;
    let d5 = s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * x.powf(-s - 5.0) / 30_240.0;
    head.value() + integral + half + d1 - d3 + d5
}

/// n-th harmonic number. Exact summation up to 1e6 terms, Euler–Maclaurin
/// beyond that.
pub fn harmonic(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n <= 1_000_000 {
        let mut acc = KahanSum::default();
        for j in 1..=n {
            acc.add(1.0 / j as f64);
        }
        return acc.value();
    }
    let x = n as f64;
    x.ln() + EULER_GAMMA + 0.5 / x - 1.0 / (12.0 * x * x) + 1.0 / (120.0 * x.powi(4))
}

/// Wilson score interval for a Bernoulli proportion, clamped to [0, 1].
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0, "wilson interval needs at least one trial");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}
