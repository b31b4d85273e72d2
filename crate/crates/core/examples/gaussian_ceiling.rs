//! What a two-moment forecast keeps and what it discards.

use market_moments::{
    gaussian_from_stats, gaussian_gap, price_stats_direct, GaussianApprox, GenSpec, Generator,
    Marginal, Result, TradeTick, WindowSeries, WindowSpec,
};

pub fn run_example() -> Result<()> {
    let ticks = vec![TradeTick::new(0.25, 12.0, 3.0)?, TradeTick::new(0.75, 2.0, 1.0)?];
    let window = WindowSeries::new(WindowSpec::new(0.5, 1.0)?, ticks)?;
    let g = GaussianApprox::from_moments(&price_stats_direct(&window)?)?;
    println!("price ~ N({}, {})", g.mean, g.variance);
    println!("P(price < 3) = {:.6}", g.cdf(3.0));
    println!("95% upper bound = {:.6}", g.quantile(0.95)?);
    assert_eq!((g.central_moment(1), g.central_moment(2)), (0.0, g.variance));

    // heavy-tailed values: the Gaussian matches two moments and nothing else
    let sigma: f64 = 0.5;
    let spec = GenSpec {
        n_ticks: 200_000,
        time_step: 1e-3,
        start_time: 0.0,
        value_dist: Marginal::Lognormal { mu: 0.0, sigma },
        volume_dist: Marginal::Constant { value: 1.0 },
        target_corr_cu: 0.0,
        seed: 3,
    };
    let values: Vec<f64> = Generator::new(&spec)?.generate().iter().map(|t| t.value()).collect();
    let m = spec.value_dist;
    let g = gaussian_from_stats(m.mean(), m.variance())?;
    let gap = gaussian_gap(&values, &g)?;
    let w = (sigma * sigma).exp();
    println!(
        "KS = {:.4}, skewness = {:.3} (lognormal: {:.3}), excess kurtosis = {:.2}",
        gap.ks_statistic,
        gap.excess_skewness,
        (w + 2.0) * (w - 1.0).sqrt(),
        gap.excess_kurtosis
    );
    assert!(gap.ks_statistic > 0.01);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
