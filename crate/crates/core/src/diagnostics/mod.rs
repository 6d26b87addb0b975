//! Finite-horizon evidence gathering: event detectors over move streams,
//! convergence and price-comparison checks, upcrossing counts, capital
//! growth trends, and the Monte Carlo maximal-inequality harness.

pub mod checks;
pub mod detectors;
pub mod doob;

pub use checks::{
    cesaro_price_check, convergence_report, growth_trend, inclusion_checks, kronecker_check,
    upcrossing_count, CesaroPriceReport, ConvergenceReport, GrowthTrend, InclusionReport,
    InclusionViolation, KroneckerReport, AVERAGE_TOL, CONVERGENCE_TOL,
};
pub use detectors::{
    centered_hedged_mean_series, centered_hedged_mean_series_powered,
    centered_hedged_square_series, centered_hedged_square_series_powered, hedge_over_squares_series,
    hedge_ratio_series, hedged_square_series, hedged_square_series_powered, oversized_move_count,
    oversized_move_count_powered, plain_detector_set, powered_detector_set, scaled_move_series,
    truncated_square_series, truncated_square_series_powered, DetectorBank, EventDetector,
};
pub use doob::{doob_check, DoobReport};
