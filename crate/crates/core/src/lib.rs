//! Weighted recursive averages, their windowed variants, and the EMA/MACD
//! trend-indicator stack built on them.
//!
//! * [`averages`]: the α-average recursion, expanded weights, weight
//!   families and the geometric mean.
//! * [`moving`]: N-moving α-averages and the moving exponential average.
//! * [`comparison`]: youngest-first sequences, limit EA versus limit MEA,
//!   admissibility and the `(1−α)^N` error bound.
//! * [`indicators`]: N-day EMA, MACD, short/long classification and
//!   buy/sell events, with an O(1) streaming EMA.
//! * [`oracles`]: closed forms and brute-force sums used as test references.
//! * [`ingest`]: CSV/JSON close series and indicator reports.
//! * [`cli`]: the `trendavg` command line.

pub mod averages;
pub mod cli;
pub mod comparison;
mod error;
pub mod indicators;
pub mod ingest;
pub mod moving;
pub mod oracles;

pub use crate::averages::{
    alpha_average, alpha_average_expanded, binomial_family_schedule, expanded_weights,
    geometric_mean, geometric_mean_update, AverageSeries, ExpandedWeights, GeometricState, Series,
    WeightSchedule,
};
pub use crate::comparison::{
    check_admissibility, ea_mea_difference, limit_ea, limit_mea, relative_error_bound, reverse,
    rho_bound_check, AdmissibilityReport, EaMeaDifference, ReversedSeries,
};
pub use crate::error::{Error, Result};
pub use crate::indicators::{
    classify_days, crossover_events, ema, ema_series, ema_stream_update, macd, CloseSeries,
    DayState, EmaStreamState, IndicatorConfig, MacdSeries, SignalEvent, SignalKind,
};
pub use crate::moving::{mea, moving_alpha_average, window_alpha_average, MovingAverageSeries};
