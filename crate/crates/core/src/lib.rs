//! Simulation engine for betting protocols over priced hedges: capital
//! processes for skeptic strategies, move generators for reality, price
//! ladders with coherence checks, almost-sure-event detectors, and exact
//! capital lower bounds for the shipped strategies.

pub mod csv;
pub mod diagnostics;
pub mod engine;
pub mod error;
pub mod hedge;
pub mod numeric;
pub mod reality;
pub mod rng;
pub mod strategies;

pub use csv::{
    format_real, read_path_csv, write_ladder_csv, write_path_csv, write_trajectory_csv,
    DetectorCsvWriter,
};
pub use diagnostics::{
    cesaro_price_check, convergence_report, doob_check, growth_trend, inclusion_checks,
    kronecker_check, plain_detector_set, powered_detector_set, upcrossing_count,
    CesaroPriceReport, ConvergenceReport, DetectorBank, DoobReport, EventDetector, GrowthTrend,
    InclusionReport, KroneckerReport,
};
pub use engine::{
    run_game, run_game_observed, BetPart, GameHistory, NullSkeptic, ProtocolVariant,
    RealityStrategy, RoundBet, RoundRecord, RunConfig, SkepticStrategy,
};
pub use error::{Error, Result};
pub use hedge::ladder::{
    bull_spread, call_payoff_level, check_coherence, spread_payoff_level, strike_at, trapezoid,
    trapezoid_payoff_level, trapezoid_r, CoherenceReport, LadderFamily, PriceLadder,
};
pub use hedge::measure::{price_hedge, PricingMeasure};
pub use hedge::validate::{validate_single_hedge, ConditionReport, InverseSum};
pub use hedge::{HedgeKind, HedgePortfolio, PricedHedge, SymmetricFn};
pub use reality::{
    DeterministicReality, HedgeSpikeAdversary, IidReality, PathKind, PowerSpikeAdversary,
    ReplayReality,
};
pub use rng::{SimRng, RNG_SCHEMA};
pub use strategies::bounds::{
    epsilon_hedged_term, epsilon_single_term, inverse_hedge_bound, threshold_count_bound,
    truncated_variance_bound, weighted_hedge_bound, InverseHedgeBound, LogCapitalSandwich,
    ThresholdCountBound, TruncatedVarianceBound, WeightedHedgeBound,
};
pub use strategies::countable::{
    epsilon_hedged, epsilon_hedged_on, powered_budget_constant, scheduled_ticket_buyer,
    slln_hedge_set_mixture, spread_count_forcer, variance_forcer, variance_forcer_powered,
    CountableHedgeContext, EpsilonHedged, ScheduledTicketBuyer, StakeDenominator,
    TrapezoidVarianceForcer,
};
pub use strategies::mz::{
    epsilon_hedged_powered, mz_mixture, spread_count_forcer_powered, variance_forcer_mz, MzContext,
};
pub use strategies::single::{
    epsilon_single, inverse_payoff_buyer, slln_single_mixture, slln_single_weak_mixture,
    weighted_inverse_buyer, EpsilonSingle, InversePayoffBuyer, WeightedInverseBuyer,
};
pub use strategies::upcrossing::{upcrossing_overlay, UpcrossingOverlay};
pub use strategies::{
    combine_strategies, equal_mixture, geometric_mixture, hedged_move, hedged_move_value,
    scale_strategy, CombinedSkeptic, ScaledSkeptic, SingleHedgeContext,
};
