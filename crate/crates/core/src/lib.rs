//! Windowed trade-tick analytics.
//!
//! A stream of deals `(time, value, volume)` is cut into averaging windows.
//! For each window the crate computes frequency-based moments of values and
//! volumes and, from them, market-based statistics that weight each deal by
//! its volume: the VWAP, the price volatility under second-order volume
//! weights, the analogous return statistics for a lag, and squared
//! coefficients of variation. Deal pools give aggregate macro variables, and
//! linear combinations of components (profit = sales - expenses) get their
//! variance decomposed into per-component and cross terms.
//!
//! Each market-based volatility is computed two ways, tick by tick and from
//! the frequency moments alone, and reports carry the discrepancy.
//!
//! ```
//! use market_moments::{partition, price_stats_direct, TradeTick};
//!
//! let ticks = vec![
//!     TradeTick::new(0.25, 12.0, 3.0).unwrap(),
//!     TradeTick::new(0.75, 2.0, 1.0).unwrap(),
//! ];
//! let windows = partition(&ticks, 1.0, 0.0).unwrap();
//! let p = price_stats_direct(&windows[0]).unwrap();
//! assert_eq!(p.mean, 3.5);
//! assert!((p.volatility - 0.45).abs() < 1e-12);
//! ```

pub mod accum;
pub mod aggregate;
pub mod analysis;
pub mod cli;
pub mod composite;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod moments;
pub mod price;
pub mod returns;
pub mod rng;
pub mod stream;
pub mod synth;
pub mod trade;

pub use accum::{CompensatedSum, PairAccumulator, SeriesAccumulator};
pub use aggregate::{aggregate, cv_transfer_check, AggregateStats, CvTransfer, Deal, DealPool};
pub use analysis::{analyze_pool, analyze_window, AnalysisReport, AnalyzeOptions};
pub use composite::{
    composite_moments, composite_stats, monte_carlo_composite_oracle, profit_stats, ComponentStat,
    CompositeStats, CorrelationMatrix, MonteCarloEstimate, ProfitCorrelation,
};
pub use error::{Error, Result};
pub use gaussian::{gaussian_from_stats, gaussian_gap, GaussianApprox, GaussianGap, TwoMoments};
pub use moments::{
    coefficient_of_variation_sq, cross_correlation, moment, volatility, window_moments, MomentSet,
};
pub use price::{price_cv_sq, price_stats_closed_form, price_stats_direct, vwap, weights_order2, PriceStats};
pub use returns::{
    build_lagged, lagged_moments, mean_return, return_cv_sq, return_stats_closed_form,
    return_stats_direct, LaggedTick, LaggedWindow, ReturnStats,
};
pub use rng::{NormalStream, GENERATOR_ID};
pub use stream::{WindowJob, WindowStream};
pub use synth::{agent_pool, generate, GenSpec, Generator, Marginal};
pub use trade::{partition, price_of, window_index, TradeTick, WindowSeries, WindowSpec};
