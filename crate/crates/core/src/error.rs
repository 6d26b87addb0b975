use thiserror::Error;

/// Errors surfaced by hedge construction, pricing, strategy setup, and game runs.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("pricing requires E|x|^{needed:.4} finite, but measure `{measure}` does not provide it (hedge `{hedge}`)")]
    InsufficientMoments {
        measure: String,
        hedge: String,
        needed: f64,
    },

    #[error("quadrature failed to converge for `{integrand}`: {detail}")]
    Quadrature { integrand: String, detail: String },

    #[error("price ladder holds {depth} prices but index {index} was requested and no measure is attached to extend it")]
    LadderTooShort { depth: usize, index: usize },

    #[error("price ladder invariant broken at index {index}: {detail}")]
    LadderInvariant { index: usize, detail: String },

    #[error("collateral duty violated at round {round}: capital {capital:.6e} fell below -{tolerance:.1e}")]
    CollateralViolation {
        round: u64,
        capital: f64,
        tolerance: f64,
    },

    #[error("malformed bet at round {round}: {detail}")]
    ProtocolViolation { round: u64, detail: String },

    #[error("strategy `{strategy}` cannot be built: {detail}")]
    StrategyConstruction { strategy: String, detail: String },

    #[error("budget check failed for `{strategy}`: portfolio cost {total:.6} exceeds the safe budget {budget:.6}")]
    BudgetExceeded {
        strategy: String,
        total: f64,
        budget: f64,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed csv at line {line}: {detail}")]
    Csv { line: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
