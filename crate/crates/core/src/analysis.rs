//! End-to-end analysis of one window, deal pool or composite spec into an
//! [`AnalysisReport`].
//!
//! Every report carries both computation paths of the market-based
//! volatilities and their discrepancy, so that the closed-form identities are
//! visible in ordinary use.

use std::collections::BTreeMap;

use crate::aggregate::{aggregate, AggregateStats, DealPool};
use crate::composite::{CompositeMoments, CompositeStats, MonteCarloEstimate};
use crate::error::{Error, Result};
use crate::gaussian::{gaussian_from_stats, gaussian_gap, GaussianApprox, GaussianGap};
use crate::moments::{window_moments, MomentSet};
use crate::price::{price_stats_closed_form, price_stats_direct, PriceStats};
use crate::returns::{lagged_moments, return_stats_closed_form, return_stats_direct, LaggedWindow, ReturnStats};
use crate::stream::WindowJob;
use crate::trade::WindowSpec;

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowInfo {
    pub index: i64,
    pub spec: WindowSpec,
    pub n_ticks: u64,
}

/// Both volatility paths of one variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Paths<T> {
    pub direct: T,
    pub closed_form: T,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReturnOutcome {
    Computed {
        moments: MomentSet,
        stats: Paths<ReturnStats>,
    },
    /// No tick had a resolvable past price.
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSection {
    pub lag: f64,
    pub resolved: u64,
    pub unresolved: u64,
    pub outcome: ReturnOutcome,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompositeOutcome {
    Full(CompositeStats),
    /// The composite mean is zero: moments only, no coefficient of variation.
    ZeroMean(CompositeMoments),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub generator: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisReport {
    pub window: Option<WindowInfo>,
    pub moments: Option<MomentSet>,
    pub price: Option<Paths<PriceStats>>,
    pub returns: Option<ReturnSection>,
    pub aggregate: Option<AggregateStats>,
    pub composite: Option<CompositeOutcome>,
    /// Sampled check of the composite variance.
    pub oracle: Option<MonteCarloEstimate>,
    /// Gaussian approximation per reported variable.
    pub gaussian: BTreeMap<String, GaussianApprox>,
    /// Departure of retained samples from their Gaussian, when requested.
    pub gaussian_gap: BTreeMap<String, GaussianGap>,
    pub provenance: Option<Provenance>,
    /// Numeric degeneracies met while building the report.
    pub degeneracies: Vec<String>,
}

impl AnalysisReport {
    pub fn is_degenerate(&self) -> bool {
        !self.degeneracies.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AnalyzeOptions {
    /// Keep per-tick samples to compute Gaussian gap metrics.
    pub gap: bool,
}

fn gap_of(samples: &[f64], g: &GaussianApprox) -> Option<GaussianGap> {
    // one-sample windows carry no shape information
    gaussian_gap(samples, g).ok()
}

fn window_info(index: i64, spec: WindowSpec, n: usize) -> WindowInfo {
    WindowInfo {
        index,
        spec,
        n_ticks: n as u64,
    }
}

/// Price, value and (when lagged) return statistics of one window.
pub fn analyze_window(job: &WindowJob, opts: AnalyzeOptions) -> Result<AnalysisReport> {
    let w = &job.window;
    let moments = window_moments(w)?;
    let price = Paths {
        direct: price_stats_direct(w)?,
        closed_form: price_stats_closed_form(&moments)?,
    };
    let mut report = AnalysisReport {
        window: Some(window_info(job.index, *w.spec(), w.len())),
        moments: Some(moments),
        price: Some(price),
        ..Default::default()
    };
    if price.direct.cv_sq.is_none() {
        report.degeneracies.push("price: zero VWAP, coefficient of variation undefined".into());
    }

    let value_g = gaussian_from_stats(moments.value_moments[0], moments.value_volatility)?;
    let price_g = gaussian_from_stats(price.direct.mean, price.direct.volatility)?;
    report.gaussian.insert("value".into(), value_g);
    report.gaussian.insert("price".into(), price_g);
    if opts.gap {
        let values: Vec<f64> = w.ticks().iter().map(|t| t.value()).collect();
        let prices: Vec<f64> = w.ticks().iter().map(|t| t.price()).collect();
        report.gaussian_gap.extend(gap_of(&values, &value_g).map(|g| ("value".into(), g)));
        report.gaussian_gap.extend(gap_of(&prices, &price_g).map(|g| ("price".into(), g)));
    }

    if let Some(lagged) = &job.lagged {
        let section = match lagged {
            Ok(l) => returns_section(l, &mut report, opts)?,
            Err(Error::EmptyLaggedWindow { unresolved }) => {
                report
                    .degeneracies
                    .push(format!("returns: no resolvable past price ({unresolved} ticks)"));
                ReturnSection {
                    lag: job.lag.unwrap_or(f64::NAN),
                    resolved: 0,
                    unresolved: *unresolved as u64,
                    outcome: ReturnOutcome::Empty,
                }
            }
            Err(e) => return Err(Error::DegenerateWindow(e.to_string())),
        };
        report.returns = Some(section);
    }
    Ok(report)
}

fn returns_section(l: &LaggedWindow, report: &mut AnalysisReport, opts: AnalyzeOptions) -> Result<ReturnSection> {
    let stats = Paths {
        direct: return_stats_direct(l)?,
        closed_form: return_stats_closed_form(l)?,
    };
    if stats.direct.cv_sq.is_none() {
        report.degeneracies.push("returns: zero mean return, coefficient of variation undefined".into());
    }
    let g = gaussian_from_stats(stats.direct.mean, stats.direct.volatility)?;
    report.gaussian.insert("return".into(), g);
    if opts.gap {
        let rets: Vec<f64> = l.ticks.iter().map(|t| t.ret).collect();
        report.gaussian_gap.extend(gap_of(&rets, &g).map(|g| ("return".into(), g)));
    }
    Ok(ReturnSection {
        lag: l.lag,
        resolved: l.ticks.len() as u64,
        unresolved: l.unresolved as u64,
        outcome: ReturnOutcome::Computed {
            moments: lagged_moments(l)?,
            stats,
        },
    })
}

/// Aggregate statistics of one deal pool.
pub fn analyze_pool(index: i64, pool: &DealPool, opts: AnalyzeOptions) -> Result<AnalysisReport> {
    let stats = aggregate(pool)?;
    let mut report = AnalysisReport {
        window: Some(window_info(index, *pool.window(), pool.len())),
        aggregate: Some(stats),
        ..Default::default()
    };
    if stats.agg_cv_sq.is_none() {
        report.degeneracies.push("aggregate: zero mean deal value, coefficient of variation undefined".into());
    }
    let g = gaussian_from_stats(stats.agg_mean, stats.agg_volatility)?;
    report.gaussian.insert("aggregate".into(), g);
    if opts.gap {
        // samples of x = K * C
        let k = stats.k as f64;
        let xs: Vec<f64> = pool.deals().iter().map(|d| k * d.value).collect();
        report.gaussian_gap.extend(gap_of(&xs, &g).map(|g| ("aggregate".into(), g)));
    }
    Ok(report)
}

/// Report for a composite variable; a zero mean yields moments only and a
/// recorded degeneracy.
pub fn composite_report(stats: Result<CompositeStats>, moments: impl FnOnce() -> Result<CompositeMoments>) -> Result<AnalysisReport> {
    let mut report = AnalysisReport::default();
    let (outcome, mean, vol) = match stats {
        Ok(s) => {
            let (m, v) = (s.mean, s.volatility);
            (CompositeOutcome::Full(s), m, v)
        }
        Err(Error::UndefinedCv) => {
            let m = moments()?;
            report
                .degeneracies
                .push("composite: zero mean, coefficient of variation undefined".into());
            (CompositeOutcome::ZeroMean(m), m.mean, m.volatility)
        }
        Err(e) => return Err(e),
    };
    report.gaussian.insert("composite".into(), gaussian_from_stats(mean, vol)?);
    report.composite = Some(outcome);
    Ok(report)
}
