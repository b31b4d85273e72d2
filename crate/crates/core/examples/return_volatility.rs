//! Returns over a lag: past market values take the place of volumes.

use market_moments::{
    build_lagged, mean_return, partition, price_stats_direct, return_stats_closed_form,
    return_stats_direct, LaggedTick, LaggedWindow, Result, TradeTick,
};

pub fn run_example() -> Result<()> {
    let history: Vec<TradeTick> = [(1.0, 4.0, 2.0), (4.0, 9.0, 3.0), (10.0, 12.0, 3.0), (10.5, 5.0, 1.0)]
        .iter()
        .map(|&(t, c, u)| TradeTick::new(t, c, u))
        .collect::<Result<_>>()?;
    let windows = partition(&history, 2.0, 0.0)?;
    let window = windows.last().expect("nonempty");

    // past price at t - 5 is that of the latest tick at or before it
    let lagged = build_lagged(window, &history, 5.0)?;
    for t in &lagged.ticks {
        println!("t={} p(t-tau)={} C_o={} r={}", t.tick.time(), t.past_price, t.past_value, t.ret);
    }
    println!("h(1) = {}", mean_return(&lagged)?);
    let direct = return_stats_direct(&lagged)?;
    let closed = return_stats_closed_form(&lagged)?;
    println!("sigma_r^2 = {} (closed form {})", direct.volatility, closed.volatility);
    assert!((direct.volatility - closed.volatility).abs() <= 1e-12 * direct.second_moment);

    // with past value equal to volume (past price 1), returns are prices
    let as_prices = LaggedWindow::new(
        window
            .ticks()
            .iter()
            .map(|&t| LaggedTick::new(TradeTick::new(t.time(), t.value(), t.volume())?, 1.0))
            .collect::<Result<_>>()?,
        5.0,
    );
    let r = return_stats_direct(&as_prices)?;
    let p = price_stats_direct(window)?;
    assert_eq!((r.mean, r.volatility), (p.mean, p.volatility));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
