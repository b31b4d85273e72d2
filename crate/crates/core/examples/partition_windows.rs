//! Cut a tick stream into tumbling windows, in memory and streaming.

use market_moments::{partition, window_index, Result, TradeTick, WindowStream};

pub fn run_example() -> Result<()> {
    let ticks: Vec<TradeTick> = [0.1, 0.4, 0.9, 1.0, 1.5, 3.2]
        .iter()
        .map(|&t| TradeTick::new(t, 10.0 * t + 1.0, 2.0))
        .collect::<Result<_>>()?;

    // windows are [k, k + 1); the empty [2, 3) is skipped
    let windows = partition(&ticks, 1.0, 0.0)?;
    for w in &windows {
        let s = w.spec();
        println!("[{}, {}) center {} holds {} ticks", s.lo(), s.hi(), s.center(), w.len());
    }
    let sizes: Vec<usize> = windows.iter().map(|w| w.len()).collect();
    assert_eq!(sizes, [3, 2, 1]);
    // a tick on a boundary belongs to the window it opens
    assert_eq!(window_index(1.0, 1.0, 0.0), 1);

    // the streaming form yields the same windows without holding the input
    let streamed: Vec<_> = WindowStream::new(ticks.into_iter().map(Ok), 1.0, 0.0, None)?
        .map(|job| job.map(|j| j.window))
        .collect::<Result<_>>()?;
    assert_eq!(streamed, windows);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
