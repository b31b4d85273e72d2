//! Two-moment Gaussian approximation of a computed random variable, and a
//! measure of how far empirical data departs from it.
//!
//! A forecast that pins down only a mean and a volatility can at best be the
//! Gaussian with those two moments. [`gaussian_gap`] reports what such a
//! forecast leaves out: the Kolmogorov–Smirnov distance to the data and the
//! sample skewness and excess kurtosis, both zero for the Gaussian itself.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use libm::erfc;
use statrs::function::erf::erfc_inv;

use crate::accum::SeriesAccumulator;
use crate::aggregate::AggregateStats;
use crate::composite::CompositeStats;
use crate::error::{Error, Result};
use crate::price::PriceStats;
use crate::returns::ReturnStats;

/// Standard normal CDF.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

/// Standard normal survival function `1 - cdf(z)`, accurate in the upper tail.
pub fn std_normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / SQRT_2)
}

pub fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal quantile: a starting point from `erfc_inv`, refined by one
/// Newton step on the survival function.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("probability {p} not in (0, 1)")));
    }
    // work in the tail that keeps full relative precision
    let (q, sign) = if p > 0.5 { (1.0 - p, 1.0) } else { (p, -1.0) };
    let mut z = SQRT_2 * erfc_inv(2.0 * q);
    let err = std_normal_sf(z) - q;
    let dens = std_normal_pdf(z);
    if dens > 0.0 {
        z += err / dens;
    }
    Ok(sign * z)
}

/// A normal distribution, or a point mass when the variance is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianApprox {
    pub mean: f64,
    pub variance: f64,
}

/// Anything with a first moment and a volatility.
pub trait TwoMoments {
    fn first_moment(&self) -> f64;
    fn volatility(&self) -> f64;
}

impl TwoMoments for PriceStats {
    fn first_moment(&self) -> f64 {
        self.mean
    }
    fn volatility(&self) -> f64 {
        self.volatility
    }
}

impl TwoMoments for ReturnStats {
    fn first_moment(&self) -> f64 {
        self.mean
    }
    fn volatility(&self) -> f64 {
        self.volatility
    }
}

impl TwoMoments for AggregateStats {
    fn first_moment(&self) -> f64 {
        self.agg_mean
    }
    fn volatility(&self) -> f64 {
        self.agg_volatility
    }
}

impl TwoMoments for CompositeStats {
    fn first_moment(&self) -> f64 {
        self.mean
    }
    fn volatility(&self) -> f64 {
        self.volatility
    }
}

pub fn gaussian_from_stats(mean: f64, volatility: f64) -> Result<GaussianApprox> {
    if !mean.is_finite() {
        return Err(Error::InvalidStats(format!("mean {mean} is not finite")));
    }
    if !(volatility.is_finite() && volatility >= 0.0) {
        return Err(Error::InvalidStats(format!(
            "volatility {volatility} must be finite and non-negative"
        )));
    }
    Ok(GaussianApprox {
        mean,
        variance: volatility,
    })
}

impl GaussianApprox {
    pub fn from_moments(stats: &impl TwoMoments) -> Result<Self> {
        gaussian_from_stats(stats.first_moment(), stats.volatility())
    }

    pub fn is_degenerate(&self) -> bool {
        self.variance == 0.0
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }

    /// Density; `+inf` at the atom of a point mass.
    pub fn pdf(&self, x: f64) -> f64 {
        if self.is_degenerate() {
            return if x == self.mean { f64::INFINITY } else { 0.0 };
        }
        let s = self.std_dev();
        std_normal_pdf((x - self.mean) / s) / s
    }

    /// CDF; a right-continuous step for a point mass.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.is_degenerate() {
            return if x < self.mean { 0.0 } else { 1.0 };
        }
        std_normal_cdf((x - self.mean) / self.std_dev())
    }

    pub fn sf(&self, x: f64) -> f64 {
        if self.is_degenerate() {
            return if x < self.mean { 1.0 } else { 0.0 };
        }
        std_normal_sf((x - self.mean) / self.std_dev())
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        let z = std_normal_quantile(p)?;
        Ok(self.mean + self.std_dev() * z)
    }

    /// Quantile of the upper tail: the `x` with `sf(x) == q`.
    pub fn upper_quantile(&self, q: f64) -> Result<f64> {
        let z = std_normal_quantile(q)?;
        Ok(self.mean - self.std_dev() * z)
    }

    /// Central moment of the given order: zero for odd orders,
    /// `(k-1)!! * variance^(k/2)` for even ones.
    pub fn central_moment(&self, order: u32) -> f64 {
        if order % 2 == 1 {
            return 0.0;
        }
        let double_factorial: f64 = (1..order).step_by(2).map(f64::from).product();
        double_factorial * self.variance.powi(order as i32 / 2)
    }
}

/// Departure of an empirical sample from a two-moment Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussianGap {
    pub n: u64,
    /// Sup-distance between the empirical CDF and the Gaussian CDF;
    /// `+inf` when a point mass is compared with non-constant data.
    pub ks_statistic: f64,
    /// Sample skewness `m3 / m2^1.5`.
    pub excess_skewness: f64,
    /// Sample excess kurtosis `m4 / m2^2 - 3`.
    pub excess_kurtosis: f64,
}

pub fn gaussian_gap(samples: &[f64], g: &GaussianApprox) -> Result<GaussianGap> {
    if samples.len() < 2 {
        return Err(Error::Domain(format!(
            "gaussian gap needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("samples must be finite".into()));
    }
    let acc: SeriesAccumulator = samples.iter().copied().collect();
    let m2 = acc.central_moment(2);
    let (skew, kurt) = if m2 > 0.0 {
        (
            acc.central_moment(3) / m2.powf(1.5),
            acc.central_moment(4) / (m2 * m2) - 3.0,
        )
    } else {
        (0.0, 0.0)
    };

    let ks_statistic = if g.is_degenerate() {
        if samples.iter().all(|&x| x == g.mean) {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        ks_distance(samples, g)
    };

    Ok(GaussianGap {
        n: samples.len() as u64,
        ks_statistic,
        excess_skewness: skew,
        excess_kurtosis: kurt,
    })
}

fn ks_distance(samples: &[f64], g: &GaussianApprox) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = g.cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}
