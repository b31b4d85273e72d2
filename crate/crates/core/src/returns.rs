//! Market-based return statistics for a constant lag `tau`.
//!
//! Each tick's return is `r_i = p(t_i) / p(t_i - tau)` and its past market value
//! is `C_o,i = p(t_i - tau) * U_i`, so that `C_i = r_i * C_o,i`. Return
//! statistics are then the price statistics with past market values standing
//! in for volumes.

use serde::Serialize;

use crate::accum::{CompensatedSum, PairAccumulator};
use crate::error::{Error, Result};
use crate::moments::{cv_sq, MomentSet};
use crate::price::{closed_form_kernel, direct_kernel, MarketMoments};
use crate::trade::{check_sorted, TradeTick, WindowSeries};

/// A tick paired with the price `tau` earlier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaggedTick {
    pub tick: TradeTick,
    pub past_price: f64,
    /// `C_o = past_price * volume`.
    pub past_value: f64,
    /// `r = value / past_value`.
    pub ret: f64,
}

impl LaggedTick {
    pub fn new(tick: TradeTick, past_price: f64) -> Result<Self> {
        if !(past_price.is_finite() && past_price > 0.0) {
            return Err(Error::InvalidTick(format!(
                "past price {past_price} must be positive"
            )));
        }
        let past_value = past_price * tick.volume();
        Ok(Self {
            tick,
            past_price,
            past_value,
            ret: tick.value() / past_value,
        })
    }
}

/// The lagged ticks of one window, with the count of ticks dropped for lack
/// of a past price.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedWindow {
    pub ticks: Vec<LaggedTick>,
    pub unresolved: usize,
    pub lag: f64,
}

impl LaggedWindow {
    /// Wraps already-resolved ticks.
    pub fn new(ticks: Vec<LaggedTick>, lag: f64) -> Self {
        Self {
            ticks,
            unresolved: 0,
            lag,
        }
    }

    fn pairs(&self) -> Vec<(f64, f64)> {
        self.ticks
            .iter()
            .map(|t| (t.tick.value(), t.past_value))
            .collect()
    }
}

/// Return analogues of [`crate::price::PriceStats`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnStats {
    /// `h(1, tau)`.
    pub mean: f64,
    /// `h(2, tau)`.
    pub second_moment: f64,
    /// `sigma_r^2(tau)`.
    pub volatility: f64,
    /// `chi_r^2(tau)`; `None` when the mean return is zero.
    pub cv_sq: Option<f64>,
    pub lag: f64,
}

impl ReturnStats {
    fn from_kernel(m: MarketMoments, lag: f64) -> Self {
        Self {
            mean: m.mean,
            second_moment: m.second_moment,
            volatility: m.volatility,
            cv_sq: m.cv_sq(),
            lag,
        }
    }
}

/// Resolves `p(t_i - lag)` for every tick of `window` against `history`.
///
/// The past price is that of the latest history tick with `time <= t_i - lag`
/// (the last one among equal times). Ticks with no such history tick, or whose
/// resolved price is not positive, are dropped and counted in `unresolved`.
pub fn build_lagged(window: &WindowSeries, history: &[TradeTick], lag: f64) -> Result<LaggedWindow> {
    if !(lag.is_finite() && lag > 0.0) {
        return Err(Error::Domain(format!("lag {lag} must be positive")));
    }
    check_sorted(history)?;
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut ticks = Vec::with_capacity(window.len());
    let mut unresolved = 0;
    for tick in window.ticks() {
        let target = tick.time() - lag;
        let idx = history.partition_point(|h| h.time() <= target);
        let past = idx.checked_sub(1).map(|i| history[i].price());
        match past {
            Some(p) if p > 0.0 => ticks.push(LaggedTick::new(*tick, p)?),
            _ => unresolved += 1,
        }
    }
    if ticks.is_empty() {
        return Err(Error::EmptyLaggedWindow { unresolved });
    }
    Ok(LaggedWindow {
        ticks,
        unresolved,
        lag,
    })
}

/// `h(1, tau) = sum C / sum C_o`, the past-value-weighted mean return.
pub fn mean_return(lagged: &LaggedWindow) -> Result<f64> {
    if lagged.ticks.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let value: CompensatedSum = lagged.ticks.iter().map(|t| t.tick.value()).collect();
    let past: CompensatedSum = lagged.ticks.iter().map(|t| t.past_value).collect();
    if past.value() == 0.0 {
        return Err(Error::DegenerateWindow("zero total past value".into()));
    }
    Ok(value.value() / past.value())
}

/// Frequency moments of the value and past-value series (past values in the
/// volume slot).
pub fn lagged_moments(lagged: &LaggedWindow) -> Result<MomentSet> {
    let mut acc = PairAccumulator::new();
    for t in &lagged.ticks {
        acc.push(t.tick.value(), t.past_value);
    }
    MomentSet::from_accumulator(&acc)
}

/// Return statistics from the weighted sum of squared deviations under
/// weights `C_o,i^2 / sum C_o^2`.
pub fn return_stats_direct(lagged: &LaggedWindow) -> Result<ReturnStats> {
    direct_kernel(&lagged.pairs()).map(|m| ReturnStats::from_kernel(m, lagged.lag))
}

/// Return statistics from the frequency moments of values and past values.
pub fn return_stats_closed_form(lagged: &LaggedWindow) -> Result<ReturnStats> {
    let m = lagged_moments(lagged)?;
    closed_form_kernel(&m).map(|k| ReturnStats::from_kernel(k, lagged.lag))
}

/// `chi_r^2 = sigma_r^2 / h(1)^2`.
pub fn return_cv_sq(stats: &ReturnStats) -> Result<f64> {
    cv_sq(stats.volatility, stats.mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trade::WindowSpec;

    fn tick(t: f64, c: f64, u: f64) -> TradeTick {
        TradeTick::new(t, c, u).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    fn lagged(pairs: &[(f64, f64)]) -> LaggedWindow {
        // (value, past_value) with unit volume so past_price == past_value
        let ticks = pairs
            .iter()
            .map(|&(c, co)| LaggedTick::new(tick(0.0, c, 1.0), co).unwrap())
            .collect();
        LaggedWindow::new(ticks, 1.0)
    }

    #[test]
    fn lookup_examples() {
        let w = WindowSeries::new(WindowSpec::new(10.0, 1.0).unwrap(), vec![tick(10.0, 12.0, 3.0)])
            .unwrap();
        let hist = [tick(4.0, 4.0, 2.0), tick(10.0, 12.0, 3.0)];
        let l = build_lagged(&w, &hist, 5.0).unwrap();
        assert_eq!(l.ticks.len(), 1);
        assert_eq!(l.ticks[0].past_price, 2.0);
        assert_eq!(l.ticks[0].ret, 2.0);
        assert_eq!(l.ticks[0].past_value, 6.0);

        let hist = [tick(3.0, 1.0, 1.0), tick(4.5, 2.0, 1.0)];
        let w = WindowSeries::new(WindowSpec::new(10.0, 1.0).unwrap(), vec![tick(10.0, 4.0, 1.0)])
            .unwrap();
        // 4.5 <= 10 - 5, so the later history tick wins
        assert_eq!(build_lagged(&w, &hist, 5.0).unwrap().ticks[0].past_price, 2.0);
        // with the lag raised past it, only t = 3 qualifies
        assert_eq!(build_lagged(&w, &hist, 5.6).unwrap().ticks[0].past_price, 1.0);

        let err = build_lagged(&w, &hist, 100.0).unwrap_err();
        assert!(matches!(err, Error::EmptyLaggedWindow { unresolved: 1 }));
    }

    #[test]
    fn ties_resolve_to_last_and_unresolved_counted() {
        let hist = [
            tick(0.0, 1.0, 1.0),
            tick(0.0, 3.0, 1.0),
            tick(2.0, 5.0, 1.0),
            tick(2.5, 6.0, 1.0),
        ];
        let w = WindowSeries::new(
            WindowSpec::new(2.5, 1.0).unwrap(),
            vec![tick(2.0, 5.0, 1.0), tick(2.5, 6.0, 1.0)],
        )
        .unwrap();
        let l = build_lagged(&w, &hist, 2.25).unwrap();
        assert_eq!(l.unresolved, 1);
        assert_eq!(l.ticks.len(), 1);
        assert_eq!(l.ticks[0].past_price, 3.0);
    }

    #[test]
    fn bad_lag_and_unsorted_history() {
        let w = WindowSeries::new(WindowSpec::new(0.5, 1.0).unwrap(), vec![tick(0.5, 1.0, 1.0)])
            .unwrap();
        assert!(build_lagged(&w, &[], 0.0).is_err());
        assert!(matches!(
            build_lagged(&w, &[tick(1.0, 1.0, 1.0), tick(0.0, 1.0, 1.0)], 1.0),
            Err(Error::Unsorted { index: 1 })
        ));
    }

    #[test]
    fn mean_return_examples() {
        assert_eq!(mean_return(&lagged(&[(12.0, 6.0), (2.0, 1.0)])).unwrap(), 2.0);
        assert!(close(
            mean_return(&lagged(&[(12.0, 6.0), (2.0, 0.5)])).unwrap(),
            14.0 / 6.5
        ));
        assert_eq!(mean_return(&lagged(&[(3.0, 2.0)])).unwrap(), 1.5);
    }

    #[test]
    fn direct_examples() {
        let s = return_stats_direct(&lagged(&[(6.0, 3.0), (8.0, 4.0)])).unwrap();
        assert_eq!(s.volatility, 0.0);
        assert_eq!(s.second_moment, 4.0);

        let s = return_stats_direct(&lagged(&[(6.0, 3.0), (4.0, 1.0)])).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!(close(s.volatility, 0.45));
        assert!(close(s.second_moment, 6.7));

        let s = return_stats_direct(&lagged(&[(5.0, 2.0)])).unwrap();
        assert_eq!(s.volatility, 0.0);
    }

    #[test]
    fn closed_form_examples() {
        let l = lagged(&[(6.0, 3.0), (4.0, 1.0)]);
        let m = lagged_moments(&l).unwrap();
        assert_eq!(m.value_moment(1), 5.0);
        assert_eq!(m.volume_moment(1), 2.0);
        assert_eq!(m.value_moment(2), 26.0);
        assert_eq!(m.volume_moment(2), 5.0);
        assert_eq!(m.cross_cu, 11.0);
        assert_eq!(m.value_volatility, 1.0);
        assert_eq!(m.volume_volatility, 1.0);
        assert_eq!(m.corr_cu, 1.0);
        let s = return_stats_closed_form(&l).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!(close(s.volatility, 0.45));
        assert_eq!(s.lag, 1.0);

        let s = return_stats_closed_form(&lagged(&[(6.0, 3.0), (8.0, 4.0)])).unwrap();
        assert_eq!(s.volatility, 0.0);
    }

    #[test]
    fn cv_examples() {
        let s = return_stats_direct(&lagged(&[(6.0, 3.0), (4.0, 1.0)])).unwrap();
        assert!(close(return_cv_sq(&s).unwrap(), 0.072));
        let s = return_stats_direct(&lagged(&[(2.0, 1.0)])).unwrap();
        assert_eq!(return_cv_sq(&s).unwrap(), 0.0);
    }

    #[test]
    fn identity_a4_per_tick() {
        for (c, u, p) in [(12.0, 3.0, 1.7), (0.3, 7.0, 123.4), (1e6, 1e-3, 5e-4)] {
            let l = LaggedTick::new(tick(0.0, c, u), p).unwrap();
            let back = l.ret * l.past_value;
            assert!((back - c).abs() <= 2.0 * f64::EPSILON * c.abs());
        }
    }
}
