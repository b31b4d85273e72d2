//! VWAP and market-based price volatility, tick by tick and in closed form.

use market_moments::{
    price_cv_sq, price_stats_closed_form, price_stats_direct, vwap, weights_order2,
    window_moments, Result, TradeTick, WindowSeries, WindowSpec,
};

pub fn run_example() -> Result<()> {
    let ticks = vec![TradeTick::new(0.25, 12.0, 3.0)?, TradeTick::new(0.75, 2.0, 1.0)?];
    let window = WindowSeries::new(WindowSpec::new(0.5, 1.0)?, ticks)?;

    // prices 4 and 2; weights U^2 / sum U^2 = 0.9 and 0.1
    println!("VWAP a(1) = {}", vwap(&window)?);
    println!("w(2) = {:?}", weights_order2(&window)?);

    let direct = price_stats_direct(&window)?;
    let closed = price_stats_closed_form(&window_moments(&window)?)?;
    println!("sigma_p^2 direct      = {}", direct.volatility);
    println!("sigma_p^2 closed form = {}", closed.volatility);
    println!("chi_p^2 = {}", price_cv_sq(&direct)?);
    assert!((direct.volatility - 0.45).abs() < 1e-12);
    assert!((direct.volatility - closed.volatility).abs() < 1e-12);
    assert!((direct.second_moment - closed.second_moment).abs() < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
