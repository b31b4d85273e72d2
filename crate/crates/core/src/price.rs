//! Market-based price statistics of one window.
//!
//! The average price is the VWAP `a(1) = C(1)/U(1)`. The volatility averages
//! squared deviations from `a(1)` under second-order weights
//! `w_i = U_i^2 / sum U^2`, which is what makes it "market-based" rather than
//! the equal-weight variance of the tick prices.
//!
//! Two independent routes are provided:
//!
//! * [`price_stats_direct`] evaluates the weighted sum of squared deviations
//!   tick by tick;
//! * [`price_stats_closed_form`] needs only the frequency moments of values
//!   and volumes:
//!
//! ```text
//! sigma_p^2 = (Omega_C^2 + a(1)^2 Omega_U^2 - 2 a(1) corr[CU]) / U(2)
//! ```
//!
//! The same kernel serves returns, with past market values in the role of
//! volumes (see [`crate::returns`]).

use serde::Serialize;

use crate::accum::CompensatedSum;
use crate::error::{Error, Result};
use crate::moments::{cv_sq, MomentSet};
use crate::trade::WindowSeries;

/// Market-based first and second price moments of one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceStats {
    /// `a(1)`, the VWAP.
    pub mean: f64,
    /// `a(2) = volatility + mean^2`.
    pub second_moment: f64,
    /// `sigma_p^2`.
    pub volatility: f64,
    /// `chi_p^2 = sigma_p^2 / a(1)^2`; `None` when the VWAP is zero.
    pub cv_sq: Option<f64>,
    /// `p(1,2)`: price averaged under `w(t_i; 2)`.
    pub weighted_price_m1: f64,
    /// `p(2,2)`: squared price averaged under `w(t_i; 2)`.
    pub weighted_price_m2: f64,
}

/// Output of the shared kernel, before it is labeled as price or return.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct MarketMoments {
    pub mean: f64,
    pub second_moment: f64,
    pub volatility: f64,
    pub weighted_m1: f64,
    pub weighted_m2: f64,
}

impl MarketMoments {
    pub fn cv_sq(&self) -> Option<f64> {
        cv_sq(self.volatility, self.mean).ok()
    }
}

impl From<MarketMoments> for PriceStats {
    fn from(m: MarketMoments) -> Self {
        PriceStats {
            mean: m.mean,
            second_moment: m.second_moment,
            volatility: m.volatility,
            cv_sq: m.cv_sq(),
            weighted_price_m1: m.weighted_m1,
            weighted_price_m2: m.weighted_m2,
        }
    }
}

/// Weighted statistics of the ratios `v_i / b_i` under weights `b_i^2 / sum b^2`,
/// centred on `sum v / sum b`.
pub(crate) fn direct_kernel(pairs: &[(f64, f64)]) -> Result<MarketMoments> {
    if pairs.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let total_v: CompensatedSum = pairs.iter().map(|p| p.0).collect();
    let total_b: CompensatedSum = pairs.iter().map(|p| p.1).collect();
    let total_b2: CompensatedSum = pairs.iter().map(|p| p.1 * p.1).collect();
    let (total_b, total_b2) = (total_b.value(), total_b2.value());
    if total_b == 0.0 || total_b2 == 0.0 {
        return Err(Error::DegenerateWindow("zero total weight".into()));
    }
    let mean = total_v.value() / total_b;

    let mut m1 = CompensatedSum::default();
    let mut m2 = CompensatedSum::default();
    let mut dev = CompensatedSum::default();
    for &(v, b) in pairs {
        let w = b * b / total_b2;
        let r = v / b;
        m1.add(r * w);
        m2.add(r * r * w);
        dev.add((r - mean) * (r - mean) * w);
    }
    let volatility = dev.value();
    Ok(MarketMoments {
        mean,
        second_moment: volatility + mean * mean,
        volatility,
        weighted_m1: m1.value(),
        weighted_m2: m2.value(),
    })
}

/// The same statistics from frequency moments alone.
pub(crate) fn closed_form_kernel(m: &MomentSet) -> Result<MarketMoments> {
    let (c1, c2) = (m.value_moment(1), m.value_moment(2));
    let (u1, u2) = (m.volume_moment(1), m.volume_moment(2));
    if u1 == 0.0 || !(u2 > 1e-300 * c2.abs()) {
        return Err(Error::DegenerateWindow(format!(
            "weight moments U(1)={u1}, U(2)={u2} too small"
        )));
    }
    let a = c1 / u1;
    let volatility =
        (m.value_volatility + a * a * m.volume_volatility - 2.0 * a * m.corr_cu) / u2;
    Ok(MarketMoments {
        mean: a,
        second_moment: volatility + a * a,
        volatility,
        weighted_m1: m.cross_cu / u2,
        weighted_m2: c2 / u2,
    })
}

/// Volume-weighted average price `sum C / sum U`.
pub fn vwap(window: &WindowSeries) -> Result<f64> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let value: CompensatedSum = window.ticks().iter().map(|t| t.value()).collect();
    let volume: CompensatedSum = window.ticks().iter().map(|t| t.volume()).collect();
    if volume.value() == 0.0 {
        return Err(Error::DegenerateWindow("zero total volume".into()));
    }
    Ok(value.value() / volume.value())
}

/// Second-order weights `U_i^2 / sum U^2`; they sum to one.
pub fn weights_order2(window: &WindowSeries) -> Result<Vec<f64>> {
    if window.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let total: CompensatedSum = window.ticks().iter().map(|t| t.volume().powi(2)).collect();
    let total = total.value();
    Ok(window
        .ticks()
        .iter()
        .map(|t| t.volume().powi(2) / total)
        .collect())
}

fn value_volume_pairs(window: &WindowSeries) -> Vec<(f64, f64)> {
    window.ticks().iter().map(|t| (t.value(), t.volume())).collect()
}

/// Price statistics from the explicit weighted sum `sum (p_i - a(1))^2 w(t_i; 2)`.
pub fn price_stats_direct(window: &WindowSeries) -> Result<PriceStats> {
    direct_kernel(&value_volume_pairs(window)).map(PriceStats::from)
}

/// Price statistics from the frequency moments of values and volumes.
pub fn price_stats_closed_form(moments: &MomentSet) -> Result<PriceStats> {
    closed_form_kernel(moments).map(PriceStats::from)
}

/// `chi_p^2 = sigma_p^2 / a(1)^2`.
pub fn price_cv_sq(stats: &PriceStats) -> Result<f64> {
    cv_sq(stats.volatility, stats.mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::window_moments;
    use crate::trade::{TradeTick, WindowSpec};

    fn window(pairs: &[(f64, f64)]) -> WindowSeries {
        let n = pairs.len() as f64 + 1.0;
        let ticks = pairs
            .iter()
            .enumerate()
            .map(|(i, &(c, u))| TradeTick::new(i as f64 / n, c, u).unwrap())
            .collect();
        WindowSeries::new(WindowSpec::new(0.5, 1.0).unwrap(), ticks).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn vwap_examples() {
        assert_eq!(vwap(&window(&[(10.0, 2.0), (6.0, 2.0)])).unwrap(), 4.0);
        assert_eq!(vwap(&window(&[(12.0, 3.0), (2.0, 1.0)])).unwrap(), 3.5);
        let p = 2.75;
        let w = window(&[(p * 1.0, 1.0), (p * 7.5, 7.5), (p * 0.25, 0.25)]);
        assert!(close(vwap(&w).unwrap(), p));
    }

    #[test]
    fn weights_examples() {
        assert_eq!(
            weights_order2(&window(&[(1.0, 2.0), (1.0, 2.0)])).unwrap(),
            vec![0.5, 0.5]
        );
        let w = weights_order2(&window(&[(1.0, 3.0), (1.0, 1.0)])).unwrap();
        assert!(close(w[0], 0.9) && close(w[1], 0.1));
        assert_eq!(weights_order2(&window(&[(1.0, 5.0)])).unwrap(), vec![1.0]);
    }

    #[test]
    fn direct_examples() {
        let s = price_stats_direct(&window(&[(10.0, 2.0), (6.0, 2.0)])).unwrap();
        assert_eq!(s.mean, 4.0);
        assert_eq!(s.weighted_price_m1, 4.0);
        assert_eq!(s.weighted_price_m2, 17.0);
        assert_eq!(s.volatility, 1.0);
        assert_eq!(s.second_moment, 17.0);

        let s = price_stats_direct(&window(&[(12.0, 3.0), (2.0, 1.0)])).unwrap();
        assert_eq!(s.mean, 3.5);
        assert!(close(s.weighted_price_m1, 3.8));
        assert!(close(s.weighted_price_m2, 14.8));
        assert!(close(s.volatility, 0.45));
        assert!(close(s.second_moment, 12.7));

        let s = price_stats_direct(&window(&[(6.0, 2.0), (1.5, 0.5), (30.0, 10.0)])).unwrap();
        assert_eq!(s.volatility, 0.0);
        assert_eq!(s.second_moment, 9.0);
    }

    #[test]
    fn closed_form_examples() {
        let m = window_moments(&window(&[(10.0, 2.0), (6.0, 2.0)])).unwrap();
        let s = price_stats_closed_form(&m).unwrap();
        assert_eq!(s.volatility, 1.0);
        assert_eq!(s.mean, 4.0);

        let m = window_moments(&window(&[(12.0, 3.0), (2.0, 1.0)])).unwrap();
        let s = price_stats_closed_form(&m).unwrap();
        assert!(close(s.volatility, 0.45));
        assert!(close(s.second_moment, 12.7));
        assert!(close(s.weighted_price_m1, 3.8));
        assert!(close(s.weighted_price_m2, 14.8));

        let m = window_moments(&window(&[(8.0, 2.0), (8.0, 2.0)])).unwrap();
        let s = price_stats_closed_form(&m).unwrap();
        assert_eq!(s.volatility, 0.0);
        assert_eq!(s.second_moment, s.mean * s.mean);
    }

    #[test]
    fn closed_form_rejects_degenerate_weights() {
        let mut m = window_moments(&window(&[(1.0, 1.0)])).unwrap();
        m.volume_moments = [0.0; 4];
        assert!(matches!(
            price_stats_closed_form(&m),
            Err(Error::DegenerateWindow(_))
        ));
    }

    #[test]
    fn cv_examples() {
        let s = price_stats_direct(&window(&[(10.0, 2.0), (6.0, 2.0)])).unwrap();
        assert_eq!(price_cv_sq(&s).unwrap(), 1.0 / 16.0);
        let s = price_stats_direct(&window(&[(12.0, 3.0), (2.0, 1.0)])).unwrap();
        assert!(close(price_cv_sq(&s).unwrap(), 0.45 / 12.25));
        let s = price_stats_direct(&window(&[(3.0, 1.0)])).unwrap();
        assert_eq!(price_cv_sq(&s).unwrap(), 0.0);

        let s = price_stats_direct(&window(&[(1.0, 1.0), (-1.0, 1.0)])).unwrap();
        assert_eq!(s.cv_sq, None);
        assert!(matches!(price_cv_sq(&s), Err(Error::UndefinedCv)));
    }

    #[test]
    fn empty_window_errors() {
        let w = WindowSeries::new(WindowSpec::new(0.0, 1.0).unwrap(), vec![]).unwrap();
        assert!(matches!(vwap(&w), Err(Error::EmptyWindow)));
        assert!(matches!(price_stats_direct(&w), Err(Error::EmptyWindow)));
        assert!(matches!(weights_order2(&w), Err(Error::EmptyWindow)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rel(a: f64, b: f64) -> f64 {
            (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
        }

        proptest! {
            #[test]
            fn equal_volumes_reduce_to_frequency_variance(
                prices in prop::collection::vec(0.5f64..200.0, 1..60),
                u in 0.1f64..100.0,
            ) {
                let w = window(&prices.iter().map(|p| (p * u, u)).collect::<Vec<_>>());
                let s = price_stats_direct(&w).unwrap();
                let tick_prices: Vec<f64> = w.ticks().iter().map(|t| t.price()).collect();
                let mean = crate::moments::moment(&tick_prices, 1).unwrap();
                let var = crate::moments::volatility(&tick_prices).unwrap();
                prop_assert!(rel(s.mean, mean) < 1e-12);
                prop_assert!((s.volatility - var).abs() <= 1e-9 * s.second_moment);
            }

            #[test]
            fn weights_sum_to_one(vols in prop::collection::vec(1e-3f64..1e3, 1..80)) {
                let w = window(&vols.iter().map(|&u| (1.0, u)).collect::<Vec<_>>());
                let total: f64 = weights_order2(&w).unwrap().iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }
}
