//! Profit = sales - expenses, its variance decomposition and a sampled check.

use market_moments::{
    composite_stats, monte_carlo_composite_oracle, profit_stats, ComponentStat, CorrelationMatrix,
    ProfitCorrelation, Result,
};

pub fn run_example() -> Result<()> {
    // two sales of 5 and 7, two expenses of 3 and 1, paired by index
    let profit = profit_stats(&[5.0, 7.0], &[3.0, 1.0], ProfitCorrelation::Paired)?;
    println!("Pr = {}, sigma^2 = {}, chi^2 = {}", profit.mean, profit.volatility, profit.cv_sq);
    for (label, theta) in &profit.theta {
        println!("  theta({label}) = {theta}");
    }
    for p in &profit.phi {
        println!("  Phi({}, {}) = {}", p.first, p.second, p.phi);
    }
    assert_eq!(profit.cv_sq, 0.25);
    assert!((profit.normalization() - 1.0).abs() < 1e-12);

    // three components given by their moments
    let comps = vec![
        ComponentStat::new("revenue", 1.0, 100.0, 64.0)?,
        ComponentStat::new("wages", -1.0, 40.0, 9.0)?,
        ComponentStat::new("rent", -1.0, 20.0, 1.0)?,
    ];
    let corr = CorrelationMatrix::new()
        .with("revenue", "wages", 12.0)?
        .with("revenue", "rent", 0.0)?
        .with("wages", "rent", 0.5)?;
    let s = composite_stats(&comps, &corr)?;
    let mc = monte_carlo_composite_oracle(&comps, &corr, 1_000_000, 42)?;
    println!(
        "analytic sigma^2 = {}, sampled {} +- {} (z = {:.2})",
        s.volatility,
        mc.sample_variance,
        mc.variance_std_error,
        mc.z_score(s.volatility)
    );
    assert!(mc.z_score(s.volatility).abs() < 3.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
