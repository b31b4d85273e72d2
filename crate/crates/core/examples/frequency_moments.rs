//! Equal-weight moments of values and volumes within one window.

use market_moments::{
    coefficient_of_variation_sq, cross_correlation, moment, volatility, window_moments, Result,
    TradeTick, WindowSeries, WindowSpec,
};

pub fn run_example() -> Result<()> {
    let values = [12.0, 2.0];
    let volumes = [3.0, 1.0];

    println!("C(1) = {}", moment(&values, 1)?);
    println!("C(2) = {}", moment(&values, 2)?);
    println!("Omega_C^2 = {}", volatility(&values)?);
    println!("corr[CU] = {}", cross_correlation(&values, &volumes)?);
    println!("chi_C^2 = {}", coefficient_of_variation_sq(&values)?);
    assert_eq!(volatility(&values)?, 25.0);
    assert_eq!(cross_correlation(&values, &volumes)?, 5.0);

    let ticks = vec![TradeTick::new(0.25, 12.0, 3.0)?, TradeTick::new(0.75, 2.0, 1.0)?];
    let window = WindowSeries::new(WindowSpec::new(0.5, 1.0)?, ticks)?;
    let m = window_moments(&window)?;
    println!("window: {m:?}");
    assert_eq!(m.volume_moments[1], 5.0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
