//! Trade ticks, averaging windows and tumbling-window partitioning.
//!
//! A tick carries the traded value `C` and volume `U` of one deal; its price is
//! `C / U`. Windows are half-open intervals `[lo, hi)` so that a tiling of the
//! time axis assigns every tick to exactly one window.

use serde::Serialize;

use crate::error::{Error, Result};

/// One market deal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TradeTick {
    time: f64,
    value: f64,
    volume: f64,
}

impl TradeTick {
    pub fn new(time: f64, value: f64, volume: f64) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::InvalidTick(format!("time {time} is not finite")));
        }
        if !value.is_finite() {
            return Err(Error::InvalidTick(format!("value {value} is not finite")));
        }
        if !(volume.is_finite() && volume > 0.0) {
            return Err(Error::InvalidTick(format!("volume {volume} must be positive")));
        }
        Ok(Self { time, value, volume })
    }

    /// Builds a tick from its price, deriving the value as `price * volume`.
    pub fn from_price(time: f64, price: f64, volume: f64) -> Result<Self> {
        if !price.is_finite() {
            return Err(Error::InvalidTick(format!("price {price} is not finite")));
        }
        Self::new(time, price * volume, volume)
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// `value / volume`. Volume is positive by construction.
    pub fn price(&self) -> f64 {
        self.value / self.volume
    }
}

/// Price of a tick, rejecting non-positive volumes.
///
/// `TradeTick::new` already enforces a positive volume, so this only fails for
/// ticks assembled through unchecked paths such as deserialized fixtures.
pub fn price_of(tick: &TradeTick) -> Result<f64> {
    if !(tick.volume > 0.0) {
        return Err(Error::InvalidTick(format!(
            "volume {} must be positive",
            tick.volume
        )));
    }
    Ok(tick.price())
}

/// Averaging interval: a tick belongs iff `lo <= time < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowSpec {
    center: f64,
    width: f64,
    lo: f64,
    hi: f64,
}

impl WindowSpec {
    pub fn new(center: f64, width: f64) -> Result<Self> {
        check_width(width)?;
        if !center.is_finite() {
            return Err(Error::InvalidWindow(format!("center {center} is not finite")));
        }
        Ok(Self {
            center,
            width,
            lo: center - width / 2.0,
            hi: center + width / 2.0,
        })
    }

    /// The `index`-th tumbling window of a grid anchored at `origin`.
    pub fn tumbling(origin: f64, width: f64, index: i64) -> Result<Self> {
        check_width(width)?;
        let k = index as f64;
        Ok(Self {
            center: origin + (k + 0.5) * width,
            width,
            lo: origin + k * width,
            hi: origin + (k + 1.0) * width,
        })
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, time: f64) -> bool {
        self.lo <= time && time < self.hi
    }
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidWindow(format!("width {width} must be positive")))
    }
}

/// The ticks of one averaging interval, in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSeries {
    spec: WindowSpec,
    ticks: Vec<TradeTick>,
}

impl WindowSeries {
    pub fn new(spec: WindowSpec, ticks: Vec<TradeTick>) -> Result<Self> {
        check_sorted(&ticks)?;
        if let Some(t) = ticks.iter().find(|t| !spec.contains(t.time)) {
            return Err(Error::InvalidWindow(format!(
                "tick at {} outside [{}, {})",
                t.time, spec.lo, spec.hi
            )));
        }
        Ok(Self { spec, ticks })
    }

    pub fn spec(&self) -> &WindowSpec {
        &self.spec
    }

    pub fn ticks(&self) -> &[TradeTick] {
        &self.ticks
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    pub fn into_ticks(self) -> Vec<TradeTick> {
        self.ticks
    }
}

pub(crate) fn check_sorted(ticks: &[TradeTick]) -> Result<()> {
    match ticks.windows(2).position(|w| w[1].time < w[0].time) {
        Some(i) => Err(Error::Unsorted { index: i + 1 }),
        None => Ok(()),
    }
}

/// Index of the tumbling window of `width` anchored at `origin` that holds `time`.
pub fn window_index(time: f64, width: f64, origin: f64) -> i64 {
    let mut k = ((time - origin) / width).floor() as i64;
    // floor of the quotient can land one cell off after rounding
    while time < origin + k as f64 * width {
        k -= 1;
    }
    while time >= origin + (k + 1) as f64 * width {
        k += 1;
    }
    k
}

/// Splits time-sorted ticks into tumbling windows `[origin + k*width, origin + (k+1)*width)`.
///
/// Empty windows are omitted; the returned windows are in time order.
pub fn partition(ticks: &[TradeTick], width: f64, origin: f64) -> Result<Vec<WindowSeries>> {
    check_width(width)?;
    if !origin.is_finite() {
        return Err(Error::InvalidWindow(format!("origin {origin} is not finite")));
    }
    check_sorted(ticks)?;

    let mut out: Vec<WindowSeries> = Vec::new();
    let mut current: Option<(i64, Vec<TradeTick>)> = None;
    for tick in ticks {
        let k = window_index(tick.time, width, origin);
        match &mut current {
            Some((idx, buf)) if *idx == k => buf.push(*tick),
            _ => {
                if let Some((idx, buf)) = current.take() {
                    out.push(WindowSeries {
                        spec: WindowSpec::tumbling(origin, width, idx)?,
                        ticks: buf,
                    });
                }
                current = Some((k, vec![*tick]));
            }
        }
    }
    if let Some((idx, buf)) = current {
        out.push(WindowSeries {
            spec: WindowSpec::tumbling(origin, width, idx)?,
            ticks: buf,
        });
    }
    Ok(out)
}
