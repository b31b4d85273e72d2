//! Frequency-based (equal-weight) moments of raw trade series.
//!
//! All estimators use population normalization `1/N`.

use serde::Serialize;

use crate::accum::{PairAccumulator, SeriesAccumulator};
use crate::error::{Error, Result};
use crate::trade::WindowSeries;

fn accumulate(series: &[f64]) -> Result<SeriesAccumulator> {
    if series.is_empty() {
        return Err(Error::EmptyWindow);
    }
    Ok(series.iter().copied().collect())
}

/// `(1/N) * sum x_i^order` for `order` in 1..=4.
pub fn moment(series: &[f64], order: u32) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(Error::Domain(format!("moment order {order} not in 1..=4")));
    }
    Ok(accumulate(series)?.raw_moment(order as usize))
}

/// Population variance `C(2) - C(1)^2`.
pub fn volatility(series: &[f64]) -> Result<f64> {
    Ok(accumulate(series)?.variance())
}

/// Population covariance `E[ab] - E[a]E[b]` of index-paired series.
pub fn cross_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut acc = PairAccumulator::new();
    for (&x, &y) in a.iter().zip(b) {
        acc.push(x, y);
    }
    Ok(acc.covariance())
}

/// Squared coefficient of variation `volatility / mean^2`.
pub fn coefficient_of_variation_sq(series: &[f64]) -> Result<f64> {
    let acc = accumulate(series)?;
    cv_sq(acc.variance(), acc.mean())
}

pub(crate) fn cv_sq(volatility: f64, mean: f64) -> Result<f64> {
    if mean == 0.0 {
        return Err(Error::UndefinedCv);
    }
    Ok(volatility / (mean * mean))
}

/// Frequency-based moments of the value and volume series of one window.
///
/// The "volume" slot holds whichever series plays the weighting role: trade
/// volumes for prices, past market values for returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub n_ticks: u64,
    /// `C(1)..C(4)`.
    pub value_moments: [f64; 4],
    /// `U(1)..U(4)`.
    pub volume_moments: [f64; 4],
    /// `E[C U]`.
    pub cross_cu: f64,
    /// `C(2) - C(1)^2`.
    pub value_volatility: f64,
    /// `U(2) - U(1)^2`.
    pub volume_volatility: f64,
    /// `E[C U] - C(1) U(1)`.
    pub corr_cu: f64,
}

impl MomentSet {
    pub fn from_accumulator(acc: &PairAccumulator) -> Result<Self> {
        if acc.count() == 0 {
            return Err(Error::EmptyWindow);
        }
        let (c, u) = (acc.first(), acc.second());
        let moments = |s: &SeriesAccumulator| {
            [
                s.raw_moment(1),
                s.raw_moment(2),
                s.raw_moment(3),
                s.raw_moment(4),
            ]
        };
        Ok(Self {
            n_ticks: acc.count(),
            value_moments: moments(c),
            volume_moments: moments(u),
            cross_cu: acc.cross_moment(),
            value_volatility: c.variance(),
            volume_volatility: u.variance(),
            corr_cu: acc.covariance(),
        })
    }

    /// `C(order)`, `order` in 1..=4.
    pub fn value_moment(&self, order: usize) -> f64 {
        self.value_moments[order - 1]
    }

    /// `U(order)`, `order` in 1..=4.
    pub fn volume_moment(&self, order: usize) -> f64 {
        self.volume_moments[order - 1]
    }

    pub fn value_cv_sq(&self) -> Result<f64> {
        cv_sq(self.value_volatility, self.value_moment(1))
    }

    pub fn volume_cv_sq(&self) -> Result<f64> {
        cv_sq(self.volume_volatility, self.volume_moment(1))
    }
}

/// Value/volume moments of every tick in the window, in one pass.
pub fn window_moments(window: &WindowSeries) -> Result<MomentSet> {
    let mut acc = PairAccumulator::new();
    for t in window.ticks() {
        acc.push(t.value(), t.volume());
    }
    MomentSet::from_accumulator(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trade::{TradeTick, WindowSpec};

    fn window(pairs: &[(f64, f64)]) -> WindowSeries {
        let ticks = pairs
            .iter()
            .enumerate()
            .map(|(i, &(c, u))| TradeTick::new(i as f64 / (pairs.len() + 1) as f64, c, u).unwrap())
            .collect();
        WindowSeries::new(WindowSpec::new(0.5, 1.0).unwrap(), ticks).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment(&[2.0, 4.0, 6.0], 1).unwrap(), 4.0);
        assert!(close(moment(&[2.0, 4.0, 6.0], 2).unwrap(), 56.0 / 3.0));
        for n in 1..=4 {
            assert_eq!(moment(&[1.5; 7], n).unwrap(), 1.5f64.powi(n as i32));
        }
        assert!(matches!(moment(&[], 1), Err(Error::EmptyWindow)));
        assert!(matches!(moment(&[1.0], 5), Err(Error::Domain(_))));
    }

    #[test]
    fn volatility_examples() {
        assert!(close(volatility(&[2.0, 4.0, 6.0]).unwrap(), 8.0 / 3.0));
        assert_eq!(volatility(&[3.25; 5]).unwrap(), 0.0);
        assert_eq!(volatility(&[5.0, 7.0]).unwrap(), 1.0);
        assert!(volatility(&[]).is_err());
    }

    #[test]
    fn cross_correlation_examples() {
        assert_eq!(cross_correlation(&[12.0, 2.0], &[3.0, 1.0]).unwrap(), 5.0);
        assert_eq!(cross_correlation(&[1.0, 9.0, -3.0], &[2.0; 3]).unwrap(), 0.0);
        assert_eq!(cross_correlation(&[5.0, 7.0], &[3.0, 1.0]).unwrap(), -1.0);
        assert!(matches!(
            cross_correlation(&[1.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn cv_examples() {
        assert!(close(
            coefficient_of_variation_sq(&[2.0, 4.0, 6.0]).unwrap(),
            1.0 / 6.0
        ));
        assert_eq!(coefficient_of_variation_sq(&[4.0; 3]).unwrap(), 0.0);
        assert!(close(
            coefficient_of_variation_sq(&[5.0, 7.0]).unwrap(),
            1.0 / 36.0
        ));
        assert!(matches!(
            coefficient_of_variation_sq(&[-1.0, 1.0]),
            Err(Error::UndefinedCv)
        ));
    }

    #[test]
    fn window_moments_examples() {
        let m = window_moments(&window(&[(10.0, 2.0), (6.0, 2.0)])).unwrap();
        assert_eq!(m.value_moment(1), 8.0);
        assert_eq!(m.value_moment(2), 68.0);
        assert_eq!(m.volume_moment(1), 2.0);
        assert_eq!(m.volume_moment(2), 4.0);
        assert_eq!(m.cross_cu, 16.0);
        assert_eq!(m.value_volatility, 4.0);
        assert_eq!(m.volume_volatility, 0.0);
        assert_eq!(m.corr_cu, 0.0);

        let m = window_moments(&window(&[(5.0, 1.0)])).unwrap();
        assert_eq!(
            (m.value_volatility, m.volume_volatility, m.corr_cu),
            (0.0, 0.0, 0.0)
        );

        let m = window_moments(&window(&[(12.0, 3.0), (2.0, 1.0)])).unwrap();
        assert_eq!(m.value_moment(1), 7.0);
        assert_eq!(m.value_moment(2), 74.0);
        assert_eq!(m.volume_moment(1), 2.0);
        assert_eq!(m.volume_moment(2), 5.0);
        assert_eq!(m.cross_cu, 19.0);
        assert_eq!(m.value_volatility, 25.0);
        assert_eq!(m.volume_volatility, 1.0);
        assert_eq!(m.corr_cu, 5.0);
        // third and fourth moments by brute force: (1728 + 8)/2, (20736 + 16)/2
        assert_eq!(m.value_moment(3), 868.0);
        assert_eq!(m.value_moment(4), 10376.0);

        let empty = WindowSeries::new(WindowSpec::new(0.0, 1.0).unwrap(), vec![]).unwrap();
        assert!(matches!(window_moments(&empty), Err(Error::EmptyWindow)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn rel_close(a: f64, b: f64, tol: f64) -> bool {
            (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
        }

        fn two_pass(xs: &[f64]) -> f64 {
            let n = xs.len() as f64;
            let m = xs.iter().sum::<f64>() / n;
            xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n
        }

        proptest! {
            #[test]
            fn moment_form_matches_two_pass(xs in prop::collection::vec(-1e4f64..1e4, 2..300)) {
                let v = volatility(&xs).unwrap();
                let w = two_pass(&xs);
                prop_assert!((v - w).abs() <= 1e-9 * w.max(1e-12 * xs.iter().map(|x| x * x).sum::<f64>()));
            }

            #[test]
            fn shift_and_scale(
                xs in prop::collection::vec(1.0f64..1e3, 2..100),
                k in -1e3f64..1e3,
                s in 0.1f64..10.0,
            ) {
                let v = volatility(&xs).unwrap();
                let shifted: Vec<_> = xs.iter().map(|x| x + k).collect();
                let scaled: Vec<_> = xs.iter().map(|x| x * s).collect();
                prop_assert!((volatility(&shifted).unwrap() - v).abs() <= 1e-9 * v.max(1e-6));
                prop_assert!(rel_close(volatility(&scaled).unwrap(), s * s * v, 1e-9) || v < 1e-12);
                let cv = coefficient_of_variation_sq(&xs).unwrap();
                prop_assert!((coefficient_of_variation_sq(&scaled).unwrap() - cv).abs() <= 1e-9 * cv.max(1e-12));
            }

            #[test]
            fn self_covariance_is_volatility(xs in prop::collection::vec(-1e3f64..1e3, 1..100)) {
                let v = volatility(&xs).unwrap();
                let c = cross_correlation(&xs, &xs).unwrap();
                prop_assert!((v - c).abs() <= 1e-9 * v.max(1e-9));
            }

            #[test]
            fn moment_set_invariants(pairs in prop::collection::vec((0.01f64..1e3, 0.01f64..1e3), 1..100)) {
                let m = window_moments(&window(&pairs)).unwrap();
                prop_assert!(m.value_volatility >= 0.0 && m.volume_volatility >= 0.0);
                let diff = m.value_moment(2) - m.value_moment(1).powi(2);
                prop_assert!((diff - m.value_volatility).abs() <= 1e-9 * m.value_moment(2));
                let bound = (m.value_volatility * m.volume_volatility).sqrt();
                prop_assert!(m.corr_cu.abs() <= bound * (1.0 + 1e-9) + 1e-12 * m.cross_cu.abs());
            }
        }
    }
}
