//! Streaming tumbling-window assembly over a time-sorted tick source.
//!
//! Only the ticks of the window being filled are buffered, plus, when a lag is
//! set, the history needed to resolve past prices: the latest tick at or
//! before `lo - lag` and everything after it.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::returns::{build_lagged, LaggedWindow};
use crate::trade::{window_index, TradeTick, WindowSeries, WindowSpec};

/// One nonempty window ready for analysis.
#[derive(Debug)]
pub struct WindowJob {
    pub index: i64,
    pub window: WindowSeries,
    pub lag: Option<f64>,
    /// Present when a lag was configured. An unresolvable window is carried
    /// as its error so the caller can report it without aborting.
    pub lagged: Option<Result<LaggedWindow>>,
}

pub struct WindowStream<I> {
    source: I,
    width: f64,
    origin: f64,
    lag: Option<f64>,
    seen: usize,
    last_time: f64,
    current: Option<(i64, Vec<TradeTick>)>,
    history: VecDeque<TradeTick>,
    done: bool,
}

impl<I> WindowStream<I>
where
    I: Iterator<Item = Result<TradeTick>>,
{
    pub fn new(source: I, width: f64, origin: f64, lag: Option<f64>) -> Result<Self> {
        // validates width and origin
        WindowSpec::tumbling(origin, width, 0)?;
        if let Some(l) = lag {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Domain(format!("lag {l} must be positive")));
            }
        }
        Ok(Self {
            source,
            width,
            origin,
            lag,
            seen: 0,
            last_time: f64::NEG_INFINITY,
            current: None,
            history: VecDeque::new(),
            done: false,
        })
    }

    /// Number of ticks consumed so far.
    pub fn ticks_seen(&self) -> usize {
        self.seen
    }

    fn finish(&mut self, index: i64, ticks: Vec<TradeTick>) -> Result<WindowJob> {
        let spec = WindowSpec::tumbling(self.origin, self.width, index)?;
        let window = WindowSeries::new(spec, ticks)?;
        let lagged = self.lag.map(|lag| {
            self.prune(spec.lo() - lag);
            build_lagged(&window, self.history.make_contiguous(), lag)
        });
        Ok(WindowJob {
            index,
            window,
            lag: self.lag,
            lagged,
        })
    }

    /// Drops history no later lookup can need: every tick followed by another
    /// at or before `threshold`.
    fn prune(&mut self, threshold: f64) {
        while self.history.len() >= 2 && self.history[1].time() <= threshold {
            self.history.pop_front();
        }
    }
}

impl<I> Iterator for WindowStream<I>
where
    I: Iterator<Item = Result<TradeTick>>,
{
    type Item = Result<WindowJob>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        loop {
            match self.source.next() {
                Some(Ok(tick)) => {
                    if tick.time() < self.last_time {
                        self.done = true;
                        return Some(Err(Error::Unsorted { index: self.seen }));
                    }
                    self.last_time = tick.time();
                    self.seen += 1;
                    let k = window_index(tick.time(), self.width, self.origin);
                    let flushed = match &mut self.current {
                        Some((idx, buf)) if *idx == k => {
                            buf.push(tick);
                            None
                        }
                        _ => self.current.replace((k, vec![tick])),
                    };
                    // the closed window resolves against history that does
                    // not yet include the new tick
                    let job = flushed.map(|(idx, buf)| self.finish(idx, buf));
                    if self.lag.is_some() {
                        self.history.push_back(tick);
                    }
                    if let Some(job) = job {
                        if job.is_err() {
                            self.done = true;
                        }
                        return Some(job);
                    }
                }
                Some(Err(e)) => {
                    self.done = true;
                    return Some(Err(e));
                }
                None => {
                    self.done = true;
                    return self.current.take().map(|(idx, buf)| self.finish(idx, buf));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trade::partition;

    fn ticks(n: usize) -> Vec<TradeTick> {
        (0..n)
            .map(|i| {
                let t = i as f64 * 0.37;
                TradeTick::new(t, 1.0 + (i % 7) as f64, 1.0 + (i % 3) as f64).unwrap()
            })
            .collect()
    }

    #[test]
    fn matches_batch_partition() {
        let ts = ticks(500);
        let jobs: Vec<WindowJob> = WindowStream::new(ts.iter().copied().map(Ok), 2.0, 0.5, None)
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        let batch = partition(&ts, 2.0, 0.5).unwrap();
        assert_eq!(jobs.len(), batch.len());
        for (j, w) in jobs.iter().zip(&batch) {
            assert_eq!(&j.window, w);
            assert!(j.lagged.is_none());
        }
    }

    #[test]
    fn lagged_matches_full_history() {
        let ts = ticks(400);
        for lag in [0.2, 1.0, 3.7, 30.0, 500.0] {
            let jobs: Vec<WindowJob> =
                WindowStream::new(ts.iter().copied().map(Ok), 5.0, 0.0, Some(lag))
                    .unwrap()
                    .collect::<Result<_>>()
                    .unwrap();
            for j in jobs {
                let want = build_lagged(&j.window, &ts, lag);
                match (j.lagged.unwrap(), want) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b),
                    (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
                    (a, b) => panic!("lag {lag}: {a:?} vs {b:?}"),
                }
            }
        }
    }

    #[test]
    fn history_stays_bounded() {
        let ts = ticks(10_000);
        let mut s = WindowStream::new(ts.iter().copied().map(Ok), 1.0, 0.0, Some(2.0)).unwrap();
        while let Some(j) = s.next() {
            j.unwrap();
            // lag + window + the new tick, at 0.37 s spacing
            assert!(s.history.len() <= 12, "{}", s.history.len());
        }
    }

    #[test]
    fn unsorted_input_reports_global_index() {
        let mut ts = ticks(50);
        ts.swap(30, 31);
        let err = WindowStream::new(ts.into_iter().map(Ok), 1.0, 0.0, None)
            .unwrap()
            .collect::<Result<Vec<_>>>()
            .unwrap_err();
        assert!(matches!(err, Error::Unsorted { index: 31 }), "{err:?}");
    }

    #[test]
    fn empty_source_yields_nothing() {
        let s = WindowStream::new(std::iter::empty(), 1.0, 0.0, None).unwrap();
        assert_eq!(s.count(), 0);
    }
}
