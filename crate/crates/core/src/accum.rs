//! Streaming power-sum accumulators.
//!
//! Each series is accumulated as compensated sums of powers of `x - shift`,
//! where the shift is the first observation. Central moments are then formed
//! from sums of small deviations, which keeps `C(2) - C(1)^2` free of the
//! cancellation that raw power sums suffer on series far from zero.

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Shifted power sums of orders 1 through 4 for a single series.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SeriesAccumulator {
    n: u64,
    shift: f64,
    sums: [CompensatedSum; 4],
}

impl SeriesAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        if self.n == 0 {
            self.shift = x;
        }
        self.n += 1;
        let d = x - self.shift;
        let d2 = d * d;
        self.sums[0].add(d);
        self.sums[1].add(d2);
        self.sums[2].add(d2 * d);
        self.sums[3].add(d2 * d2);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Sum of `(x - shift)^order` for `order` in 1..=4.
    pub fn shifted_sum(&self, order: usize) -> f64 {
        self.sums[order - 1].value()
    }

    /// Sum of the raw observations.
    pub fn total(&self) -> f64 {
        self.n as f64 * self.shift + self.shifted_sum(1)
    }

    pub fn mean(&self) -> f64 {
        self.shift + self.shifted_sum(1) / self.n as f64
    }

    /// `N^2` times the population variance, i.e. `N * S2 - S1^2` over shifted sums.
    ///
    /// Exact for integer-valued series whose sums stay below 2^53.
    pub fn scaled_variance(&self) -> f64 {
        let n = self.n as f64;
        let s1 = self.shifted_sum(1);
        (n * self.shifted_sum(2) - s1 * s1).max(0.0)
    }

    /// Population variance `C(2) - C(1)^2`.
    pub fn variance(&self) -> f64 {
        let n = self.n as f64;
        self.scaled_variance() / (n * n)
    }

    /// Population central moment of `order` in 2..=4.
    pub fn central_moment(&self, order: usize) -> f64 {
        let n = self.n as f64;
        let m1 = self.shifted_sum(1) / n;
        let m2 = self.shifted_sum(2) / n;
        let m3 = self.shifted_sum(3) / n;
        let m4 = self.shifted_sum(4) / n;
        match order {
            1 => 0.0,
            2 => self.variance(),
            3 => m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1,
            4 => m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1.powi(4),
            _ => panic!("central moment order {order} not tracked"),
        }
    }

    /// Raw moment `E[x^order]` for `order` in 1..=4.
    pub fn raw_moment(&self, order: usize) -> f64 {
        let mu = self.mean();
        let c2 = self.variance();
        match order {
            1 => mu,
            2 => c2 + mu * mu,
            3 => self.central_moment(3) + 3.0 * mu * c2 + mu.powi(3),
            4 => {
                self.central_moment(4)
                    + 4.0 * mu * self.central_moment(3)
                    + 6.0 * mu * mu * c2
                    + mu.powi(4)
            }
            _ => panic!("raw moment order {order} not tracked"),
        }
    }

    /// Shifted sums of `other` re-expressed about `self.shift`.
    fn rebased(&self, other: &SeriesAccumulator) -> [f64; 4] {
        let delta = other.shift - self.shift;
        let n = other.n as f64;
        let s = [
            n,
            other.shifted_sum(1),
            other.shifted_sum(2),
            other.shifted_sum(3),
            other.shifted_sum(4),
        ];
        // sum (d + delta)^k = sum_j C(k, j) delta^(k-j) S_j
        const BINOM: [[f64; 5]; 5] = [
            [1.0, 0.0, 0.0, 0.0, 0.0],
            [1.0, 1.0, 0.0, 0.0, 0.0],
            [1.0, 2.0, 1.0, 0.0, 0.0],
            [1.0, 3.0, 3.0, 1.0, 0.0],
            [1.0, 4.0, 6.0, 4.0, 1.0],
        ];
        let mut out = [0.0; 4];
        for k in 1..=4 {
            let terms: CompensatedSum = (0..=k)
                .map(|j| BINOM[k][j] * delta.powi((k - j) as i32) * s[j])
                .collect();
            out[k - 1] = terms.value();
        }
        out
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &SeriesAccumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let rebased = self.rebased(other);
        for (sum, x) in self.sums.iter_mut().zip(rebased) {
            sum.add(x);
        }
        self.n += other.n;
    }
}

impl Extend<f64> for SeriesAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

impl std::iter::FromIterator<f64> for SeriesAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = SeriesAccumulator::new();
        acc.extend(iter);
        acc
    }
}

/// Joint accumulator for two paired series `(a_i, b_i)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairAccumulator {
    a: SeriesAccumulator,
    b: SeriesAccumulator,
    cross: CompensatedSum,
}

impl PairAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, a: f64, b: f64) {
        self.a.push(a);
        self.b.push(b);
        self.cross
            .add((a - self.a.shift()) * (b - self.b.shift()));
    }

    pub fn count(&self) -> u64 {
        self.a.count()
    }

    pub fn first(&self) -> &SeriesAccumulator {
        &self.a
    }

    pub fn second(&self) -> &SeriesAccumulator {
        &self.b
    }

    /// `N^2` times the population covariance.
    pub fn scaled_covariance(&self) -> f64 {
        let n = self.count() as f64;
        n * self.cross.value() - self.a.shifted_sum(1) * self.b.shifted_sum(1)
    }

    /// Population covariance `E[ab] - E[a]E[b]`.
    pub fn covariance(&self) -> f64 {
        let n = self.count() as f64;
        self.scaled_covariance() / (n * n)
    }

    /// Joint raw moment `E[ab]`.
    pub fn cross_moment(&self) -> f64 {
        self.covariance() + self.a.mean() * self.b.mean()
    }

    pub fn merge(&mut self, other: &PairAccumulator) {
        if other.count() == 0 {
            return;
        }
        if self.count() == 0 {
            *self = *other;
            return;
        }
        let da = other.a.shift() - self.a.shift();
        let db = other.b.shift() - self.b.shift();
        let n = other.count() as f64;
        let rebased: CompensatedSum = [
            other.cross.value(),
            db * other.a.shifted_sum(1),
            da * other.b.shifted_sum(1),
            n * da * db,
        ]
        .into_iter()
        .collect();
        self.cross.add(rebased.value());
        self.a.merge(&other.a);
        self.b.merge(&other.b);
    }
}
