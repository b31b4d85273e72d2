//! Monte-Carlo estimate of a composite's mean and variance, used to check the
//! analytic volatility independently.
//!
//! Components are sampled jointly Gaussian with the given means, volatilities
//! and covariances. Draws are split into fixed-size batches; batch `b` uses
//! ChaCha stream `b` of the root seed, so the estimate does not depend on how
//! many threads run the batches.

use rayon::prelude::*;
use serde::Serialize;

use super::{validate, ComponentStat, CorrelationMatrix};
use crate::accum::SeriesAccumulator;
use crate::error::{Error, Result};
use crate::rng::NormalStream;

const BATCH: u64 = 1 << 16;
pub const MIN_DRAWS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub draws: u64,
    pub sample_mean: f64,
    pub sample_variance: f64,
    /// Standard error of `sample_variance`, `sqrt((m4 - m2^2) / n)`.
    pub variance_std_error: f64,
}

impl MonteCarloEstimate {
    /// `(analytic - sample_variance) / variance_std_error`.
    pub fn z_score(&self, analytic_variance: f64) -> f64 {
        let diff = analytic_variance - self.sample_variance;
        if self.variance_std_error == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY.copysign(diff)
            }
        } else {
            diff / self.variance_std_error
        }
    }
}

/// Lower-triangular factor of the covariance matrix, allowing zero pivots on
/// positive semidefinite input.
pub(crate) fn cholesky(components: &[ComponentStat], corr: &CorrelationMatrix) -> Result<Vec<Vec<f64>>> {
    let cov = validate(components, corr)?;
    let n = cov.len();
    let scale = cov.iter().enumerate().map(|(i, r)| r[i]).fold(0.0, f64::max);
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = cov[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if d < -tol {
            return Err(Error::NotPositiveSemidefinite { pivot: j });
        }
        let pivot = if d > tol { d.sqrt() } else { 0.0 };
        l[j][j] = pivot;
        for i in j + 1..n {
            let r = cov[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if pivot == 0.0 {
                if r.abs() > tol.sqrt() * scale.sqrt().max(tol) {
                    return Err(Error::NotPositiveSemidefinite { pivot: j });
                }
            } else {
                l[i][j] = r / pivot;
            }
        }
    }
    Ok(l)
}

/// Sample mean and variance of `sum beta(q) a(q)` over `draws` joint draws.
pub fn monte_carlo_composite_oracle(
    components: &[ComponentStat],
    corr: &CorrelationMatrix,
    draws: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if draws < MIN_DRAWS {
        return Err(Error::Domain(format!(
            "monte carlo oracle needs at least {MIN_DRAWS} draws, got {draws}"
        )));
    }
    let l = cholesky(components, corr)?;
    let n = components.len();
    // the composite is beta . (mean + L z) = beta . mean + (L^T beta) . z
    let offset: f64 = components.iter().map(|c| c.beta * c.mean).sum();
    let loading: Vec<f64> = (0..n)
        .map(|k| (k..n).map(|i| components[i].beta * l[i][k]).sum())
        .collect();

    let batches = draws.div_ceil(BATCH);
    let partials: Vec<SeriesAccumulator> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let len = BATCH.min(draws - b * BATCH);
            let mut stream = NormalStream::new(seed, b);
            let mut acc = SeriesAccumulator::new();
            let mut z = vec![0.0; n];
            for _ in 0..len {
                for zk in z.iter_mut() {
                    *zk = stream.next_normal();
                }
                let x = offset + loading.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
                acc.push(x);
            }
            acc
        })
        .collect();

    let mut total = SeriesAccumulator::new();
    for p in &partials {
        total.merge(p);
    }
    let m2 = total.central_moment(2);
    let m4 = total.central_moment(4);
    Ok(MonteCarloEstimate {
        draws,
        sample_mean: total.mean(),
        sample_variance: m2,
        variance_std_error: ((m4 - m2 * m2).max(0.0) / draws as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::composite::composite_stats;

    fn profit() -> (Vec<ComponentStat>, CorrelationMatrix) {
        (
            vec![
                ComponentStat::new("sales", 2.0, 6.0, 1.0).unwrap(),
                ComponentStat::new("expenses", -2.0, 2.0, 1.0).unwrap(),
            ],
            CorrelationMatrix::new()
                .with("sales", "expenses", -1.0)
                .unwrap(),
        )
    }

    #[test]
    fn profit_fixture_within_three_standard_errors() {
        let (c, m) = profit();
        let est = monte_carlo_composite_oracle(&c, &m, 1_000_000, 2024).unwrap();
        assert!(est.z_score(16.0).abs() < 3.0, "{est:?}");
        assert!((est.sample_mean - 8.0).abs() < 3.0 * (16.0f64 / 1e6).sqrt());
    }

    #[test]
    fn zero_volatility_components() {
        let c = vec![
            ComponentStat::new("a", 3.0, 1.0, 0.0).unwrap(),
            ComponentStat::new("b", -1.0, 5.0, 0.0).unwrap(),
        ];
        let m = CorrelationMatrix::new().with("a", "b", 0.0).unwrap();
        let est = monte_carlo_composite_oracle(&c, &m, 20_000, 1).unwrap();
        assert_eq!(est.sample_variance, 0.0);
        assert_eq!(est.sample_mean, -2.0);
        assert_eq!(est.z_score(0.0), 0.0);
    }

    #[test]
    fn independent_unit_components() {
        let c = vec![
            ComponentStat::new("a", 1.0, 0.0, 1.0).unwrap(),
            ComponentStat::new("b", 1.0, 0.0, 1.0).unwrap(),
        ];
        let m = CorrelationMatrix::new().with("a", "b", 0.0).unwrap();
        let est = monte_carlo_composite_oracle(&c, &m, 1_000_000, 99).unwrap();
        assert!(est.z_score(2.0).abs() < 3.0, "{est:?}");
    }

    #[test]
    fn rejects_indefinite_and_small_draws() {
        let c = vec![
            ComponentStat::new("a", 1.0, 1.0, 1.0).unwrap(),
            ComponentStat::new("b", 1.0, 1.0, 1.0).unwrap(),
            ComponentStat::new("c", 1.0, 1.0, 1.0).unwrap(),
        ];
        // pairwise admissible but jointly indefinite
        let m = CorrelationMatrix::new()
            .with("a", "b", 0.9)
            .unwrap()
            .with("a", "c", 0.9)
            .unwrap()
            .with("b", "c", -0.9)
            .unwrap();
        assert!(matches!(
            monte_carlo_composite_oracle(&c, &m, 10_000, 0),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
        let (c, m) = profit();
        assert!(matches!(
            monte_carlo_composite_oracle(&c, &m, 100, 0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn deterministic_for_seed() {
        let (c, m) = profit();
        let a = monte_carlo_composite_oracle(&c, &m, 200_000, 5).unwrap();
        let b = monte_carlo_composite_oracle(&c, &m, 200_000, 5).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c1 = pool.install(|| monte_carlo_composite_oracle(&c, &m, 200_000, 5).unwrap());
        assert_eq!(a, c1);
        assert_eq!(composite_stats(&c, &m).unwrap().volatility, 16.0);
    }
}
