//! Random macroeconomic variables built from a pool of deals.
//!
//! With `K` deals of values `C_ij` inside one window, the random variable
//! `x = K * C` has mean `K * C(1)`, the conventional aggregate (the total value
//! of all deals), and volatility `K^2 * sigma_C^2`. Its squared coefficient of
//! variation therefore equals that of a single deal.

use serde::Serialize;

use crate::accum::SeriesAccumulator;
use crate::error::{Error, Result};
use crate::moments::cv_sq;
use crate::trade::WindowSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Deal {
    pub agent: String,
    pub time: f64,
    pub value: f64,
}

impl Deal {
    pub fn new(agent: impl Into<String>, time: f64, value: f64) -> Result<Self> {
        if !(time.is_finite() && value.is_finite()) {
            return Err(Error::InvalidTick(format!(
                "deal at {time} with value {value} is not finite"
            )));
        }
        Ok(Self {
            agent: agent.into(),
            time,
            value,
        })
    }
}

/// All deals of all agents inside one window.
///
/// Agent labels are kept for lineage only; the statistics flatten over agents.
/// No deduplication is performed.
#[derive(Debug, Clone, PartialEq)]
pub struct DealPool {
    deals: Vec<Deal>,
    window: WindowSpec,
}

impl DealPool {
    pub fn new(window: WindowSpec, deals: Vec<Deal>) -> Result<Self> {
        if let Some(d) = deals.iter().find(|d| !window.contains(d.time)) {
            return Err(Error::InvalidWindow(format!(
                "deal at {} outside [{}, {})",
                d.time,
                window.lo(),
                window.hi()
            )));
        }
        Ok(Self { deals, window })
    }

    pub fn deals(&self) -> &[Deal] {
        &self.deals
    }

    pub fn window(&self) -> &WindowSpec {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.deals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deals.is_empty()
    }

    /// Number of distinct agents.
    pub fn n_agents(&self) -> usize {
        let mut agents: Vec<&str> = self.deals.iter().map(|d| d.agent.as_str()).collect();
        agents.sort_unstable();
        agents.dedup();
        agents.len()
    }

    fn accumulate(&self) -> SeriesAccumulator {
        self.deals.iter().map(|d| d.value).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregateStats {
    /// `K`, the total number of deals.
    pub k: u64,
    /// `C(1)`.
    pub deal_mean: f64,
    /// `C(2)`.
    pub deal_second: f64,
    /// `C_delta(1) = K * C(1)`, the total value.
    pub total: f64,
    /// `C_delta(2) = K * C(2)`.
    pub total_second: f64,
    /// `x(1)`; equals `total`.
    pub agg_mean: f64,
    /// `sigma_x^2 = K^2 * sigma_C^2`.
    pub agg_volatility: f64,
    /// `chi_x^2`; `None` when the deal mean is zero.
    pub agg_cv_sq: Option<f64>,
    /// `chi_C^2`; `None` when the deal mean is zero.
    pub deal_cv_sq: Option<f64>,
}

impl AggregateStats {
    /// Statistics of flattened deal values held in an accumulator.
    pub fn from_accumulator(acc: &SeriesAccumulator) -> Result<Self> {
        if acc.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let k = acc.count() as f64;
        let deal_mean = acc.mean();
        let deal_second = acc.raw_moment(2);
        let total = acc.total();
        // K^2 sigma_C^2 = K * S2 - S1^2
        let agg_volatility = acc.scaled_variance();
        let deal_volatility = acc.variance();
        Ok(Self {
            k: acc.count(),
            deal_mean,
            deal_second,
            total,
            total_second: k * deal_second,
            agg_mean: total,
            agg_volatility,
            agg_cv_sq: cv_sq(agg_volatility, total).ok(),
            deal_cv_sq: cv_sq(deal_volatility, deal_mean).ok(),
        })
    }

    /// `sigma_C^2`.
    pub fn deal_volatility(&self) -> f64 {
        let k = self.k as f64;
        self.agg_volatility / (k * k)
    }
}

pub fn aggregate(pool: &DealPool) -> Result<AggregateStats> {
    AggregateStats::from_accumulator(&pool.accumulate())
}

/// Both squared coefficients of variation and their absolute difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvTransfer {
    pub agg_cv_sq: f64,
    pub deal_cv_sq: f64,
    pub gap: f64,
}

/// Checks `chi_x^2 == chi_C^2` on a pool.
pub fn cv_transfer_check(pool: &DealPool) -> Result<CvTransfer> {
    let stats = aggregate(pool)?;
    match (stats.agg_cv_sq, stats.deal_cv_sq) {
        (Some(agg), Some(deal)) => Ok(CvTransfer {
            agg_cv_sq: agg,
            deal_cv_sq: deal,
            gap: (agg - deal).abs(),
        }),
        _ => Err(Error::UndefinedCv),
    }
}
