//! Aggregate macro variables from pools of deals.

use market_moments::{
    agent_pool, aggregate, cv_transfer_check, Deal, DealPool, GenSpec, Marginal, Result, WindowSpec,
};

pub fn run_example() -> Result<()> {
    let deals = vec![
        Deal::new("alice", 0.1, 2.0)?,
        Deal::new("bob", 0.4, 4.0)?,
        Deal::new("alice", 0.7, 6.0)?,
    ];
    let pool = DealPool::new(WindowSpec::new(0.5, 1.0)?, deals)?;
    let s = aggregate(&pool)?;
    println!("K = {}, total = {}, sigma_x^2 = {}", s.k, s.total, s.agg_volatility);
    assert_eq!((s.total, s.agg_volatility), (12.0, 24.0));

    // the macro variable inherits the per-deal coefficient of variation
    let t = cv_transfer_check(&pool)?;
    println!("chi_x^2 = {}, chi_C^2 = {}", t.agg_cv_sq, t.deal_cv_sq);
    assert!(t.gap < 1e-15);

    // how deals are spread over agents does not matter
    let spec = GenSpec {
        n_ticks: 5_000,
        time_step: 0.01,
        start_time: 0.0,
        value_dist: Marginal::Gamma { shape: 3.0, scale: 2.0 },
        volume_dist: Marginal::Constant { value: 1.0 },
        target_corr_cu: 0.0,
        seed: 11,
    };
    let one = aggregate(&agent_pool(&spec, 1, 5)?)?;
    let many = aggregate(&agent_pool(&spec, 40, 5)?)?;
    assert_eq!(one, many);
    println!("5000 generated deals: chi_x^2 = {:?}", many.agg_cv_sq);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
