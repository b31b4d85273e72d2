//! Reproducible synthetic trade streams.
//!
//! Values and volumes are drawn through a Gaussian copula: a latent standard
//! normal pair with correlation `rho` is mapped through the inverse CDFs of the
//! chosen marginals. `rho` is solved so that the Pearson correlation of the
//! resulting value and volume series equals the requested target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

use crate::aggregate::{Deal, DealPool};
use crate::error::{Error, Result};
use crate::gaussian::{std_normal_cdf, std_normal_pdf};
use crate::rng::NormalStream;
use crate::trade::{TradeTick, WindowSpec};

/// Marginal distribution family of generated values or volumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Marginal {
    /// `exp(mu + sigma * Z)`.
    Lognormal { mu: f64, sigma: f64 },
    /// Shape `k`, scale `theta`.
    Gamma { shape: f64, scale: f64 },
    Constant { value: f64 },
}

impl Marginal {
    fn validate(&self, what: &str, positive: bool) -> Result<()> {
        let ok = match *self {
            Marginal::Lognormal { mu, sigma } => mu.is_finite() && sigma.is_finite() && sigma > 0.0,
            Marginal::Gamma { shape, scale } => {
                shape.is_finite() && shape > 0.0 && scale.is_finite() && scale > 0.0
            }
            Marginal::Constant { value } => value.is_finite() && (!positive || value > 0.0),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid {what} distribution {self:?}")))
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Marginal::Constant { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Marginal::Lognormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Marginal::Gamma { shape, scale } => shape * scale,
            Marginal::Constant { value } => value,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Marginal::Lognormal { mu, sigma } => {
                let s2 = sigma * sigma;
                s2.exp_m1() * (2.0 * mu + s2).exp()
            }
            Marginal::Gamma { shape, scale } => shape * scale * scale,
            Marginal::Constant { .. } => 0.0,
        }
    }

    /// Skewness; zero for the constant family.
    pub fn skewness(&self) -> f64 {
        match *self {
            Marginal::Lognormal { sigma, .. } => {
                let e = (sigma * sigma).exp();
                (e + 2.0) * (e - 1.0).sqrt()
            }
            Marginal::Gamma { shape, .. } => 2.0 / shape.sqrt(),
            Marginal::Constant { .. } => 0.0,
        }
    }

    /// Excess kurtosis; zero for the constant family.
    pub fn excess_kurtosis(&self) -> f64 {
        match *self {
            Marginal::Lognormal { sigma, .. } => {
                let s2 = sigma * sigma;
                (4.0 * s2).exp() + 2.0 * (3.0 * s2).exp() + 3.0 * (2.0 * s2).exp() - 6.0
            }
            Marginal::Gamma { shape, .. } => 6.0 / shape,
            Marginal::Constant { .. } => 0.0,
        }
    }

    /// The marginal's quantile at `Phi(z)`.
    pub fn from_standard_normal(&self, z: f64) -> f64 {
        match *self {
            Marginal::Lognormal { mu, sigma } => (mu + sigma * z).exp(),
            Marginal::Gamma { shape, scale } => {
                (gamma_quantile_at(shape, z) * scale).max(f64::MIN_POSITIVE)
            }
            Marginal::Constant { value } => value,
        }
    }
}

/// Unit-scale gamma quantile at probability `Phi(z)`.
///
/// Newton iteration on `log x`, started from the Wilson–Hilferty
/// approximation. For `z <= 0` the iteration solves `log P(k, x) = log Phi(z)`
/// and otherwise `log Q(k, x) = log Phi(-z)`; both are close to linear in
/// `log x` far out in their tails, and neither loses precision near one.
pub(crate) fn gamma_quantile_at(shape: f64, z: f64) -> f64 {
    let lower = z <= 0.0;
    let target = std_normal_cdf(if lower { z } else { -z }).ln();
    let c = 1.0 / (9.0 * shape);
    let wh = shape * (1.0 - c + z * c.sqrt()).powi(3);
    let mut x = if wh > 0.0 {
        wh
    } else {
        // P(k, x) ~ x^k / Gamma(k + 1) for small x
        ((target + ln_gamma(shape + 1.0)) / shape).exp().max(1e-300)
    };
    let ln_norm = ln_gamma(shape);
    for _ in 0..200 {
        let tail = if lower { gamma_lr(shape, x) } else { gamma_ur(shape, x) };
        if !(tail > 0.0) {
            // underflowed: move toward the bulk
            x = if lower { x * 2.0 } else { x * 0.5 };
            continue;
        }
        // d log P / d log x = x pdf(x) / P, and minus that for Q
        let dens = ((shape - 1.0) * x.ln() - x - ln_norm).exp() * x / tail;
        if !(dens > 0.0) {
            break;
        }
        let slope = if lower { dens } else { -dens };
        let step = ((tail.ln() - target) / slope).clamp(-1.0, 1.0);
        x *= (-step).exp();
        if step.abs() < 1e-15 {
            break;
        }
    }
    x
}

fn default_time_step() -> f64 {
    1.0
}

/// Parameters of a synthetic trade stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    pub n_ticks: u64,
    /// Constant spacing between consecutive deals, seconds.
    #[serde(default = "default_time_step")]
    pub time_step: f64,
    #[serde(default)]
    pub start_time: f64,
    pub value_dist: Marginal,
    pub volume_dist: Marginal,
    /// Target Pearson correlation between value and volume.
    #[serde(default)]
    pub target_corr_cu: f64,
    #[serde(default)]
    pub seed: u64,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.time_step.is_finite() && self.time_step >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "time_step {} must be finite and non-negative",
                self.time_step
            )));
        }
        if !self.start_time.is_finite() {
            return Err(Error::InvalidSpec("start_time must be finite".into()));
        }
        if !(self.target_corr_cu.abs() <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "target_corr_cu {} not in [-1, 1]",
                self.target_corr_cu
            )));
        }
        self.value_dist.validate("value", false)?;
        self.volume_dist.validate("volume", true)?;
        Ok(())
    }
}

/// Grid for Gaussian expectations: trapezoid on [-9, 9].
const GRID_HALF_WIDTH: f64 = 9.0;
const GRID_STEP: f64 = 0.05;
/// Finer table used to interpolate the second marginal at rotated arguments.
const TABLE_HALF_WIDTH: f64 = 13.0;
const TABLE_STEP: f64 = 1e-3;

struct CopulaQuadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    f: Vec<f64>,
    g_table: Vec<f64>,
    mean_f: f64,
    mean_g: f64,
    sd_f: f64,
    sd_g: f64,
}

impl CopulaQuadrature {
    fn new(first: &Marginal, second: &Marginal) -> Self {
        let n = (2.0 * GRID_HALF_WIDTH / GRID_STEP).round() as usize;
        let nodes: Vec<f64> = (0..=n)
            .map(|i| -GRID_HALF_WIDTH + i as f64 * GRID_STEP)
            .collect();
        let weights: Vec<f64> = nodes.iter().map(|&z| std_normal_pdf(z) * GRID_STEP).collect();
        let f: Vec<f64> = nodes.iter().map(|&z| first.from_standard_normal(z)).collect();
        let m = (2.0 * TABLE_HALF_WIDTH / TABLE_STEP).round() as usize;
        let g_table: Vec<f64> = (0..=m)
            .map(|i| second.from_standard_normal(-TABLE_HALF_WIDTH + i as f64 * TABLE_STEP))
            .collect();
        let mut q = Self {
            nodes,
            weights,
            f,
            g_table,
            mean_f: 0.0,
            mean_g: 0.0,
            sd_f: 0.0,
            sd_g: 0.0,
        };
        let gs: Vec<f64> = q.nodes.iter().map(|&z| q.g(z)).collect();
        let moments = |vals: &[f64], w: &[f64]| {
            let m1: f64 = vals.iter().zip(w).map(|(v, w)| v * w).sum();
            let m2: f64 = vals.iter().zip(w).map(|(v, w)| (v - m1).powi(2) * w).sum();
            (m1, m2.sqrt())
        };
        (q.mean_f, q.sd_f) = moments(&q.f, &q.weights);
        (q.mean_g, q.sd_g) = moments(&gs, &q.weights);
        q
    }

    fn g(&self, z: f64) -> f64 {
        let pos = ((z + TABLE_HALF_WIDTH) / TABLE_STEP).clamp(0.0, (self.g_table.len() - 1) as f64);
        let i = (pos.floor() as usize).min(self.g_table.len() - 2);
        let t = pos - i as f64;
        self.g_table[i] * (1.0 - t) + self.g_table[i + 1] * t
    }

    /// Pearson correlation of `(f(Z1), g(rho Z1 + sqrt(1 - rho^2) Z3))`.
    fn pearson(&self, rho: f64) -> f64 {
        let s = (1.0 - rho * rho).max(0.0).sqrt();
        let mut cov = 0.0;
        for (&zi, (&wi, &fi)) in self.nodes.iter().zip(self.weights.iter().zip(&self.f)) {
            let inner: f64 = if s == 0.0 {
                self.g(rho * zi) - self.mean_g
            } else {
                self.nodes
                    .iter()
                    .zip(&self.weights)
                    .map(|(&zj, &wj)| wj * (self.g(rho * zi + s * zj) - self.mean_g))
                    .sum()
            };
            cov += wi * (fi - self.mean_f) * inner;
        }
        cov / (self.sd_f * self.sd_g)
    }
}

/// Pearson correlation of value and volume implied by a latent copula
/// correlation `rho`.
pub fn implied_pearson(value: &Marginal, volume: &Marginal, rho: f64) -> f64 {
    if value.is_constant() || volume.is_constant() {
        return 0.0;
    }
    if let (
        Marginal::Lognormal { sigma: s1, .. },
        Marginal::Lognormal { sigma: s2, .. },
    ) = (value, volume)
    {
        return (rho * s1 * s2).exp_m1() / ((s1 * s1).exp_m1() * (s2 * s2).exp_m1()).sqrt();
    }
    CopulaQuadrature::new(value, volume).pearson(rho)
}

/// The latent correlation that yields `target` Pearson correlation, or an
/// error carrying the attainable range.
pub fn copula_correlation(value: &Marginal, volume: &Marginal, target: f64) -> Result<f64> {
    if target == 0.0 {
        return Ok(0.0);
    }
    if value.is_constant() || volume.is_constant() {
        return Err(Error::InfeasibleCorrelation {
            target,
            min: 0.0,
            max: 0.0,
        });
    }
    if let (
        Marginal::Lognormal { sigma: s1, .. },
        Marginal::Lognormal { sigma: s2, .. },
    ) = (value, volume)
    {
        let scale = ((s1 * s1).exp_m1() * (s2 * s2).exp_m1()).sqrt();
        let arg = 1.0 + target * scale;
        let rho = if arg > 0.0 {
            arg.ln() / (s1 * s2)
        } else {
            f64::NEG_INFINITY
        };
        if !(-1.0..=1.0).contains(&rho) {
            return Err(Error::InfeasibleCorrelation {
                target,
                min: implied_pearson(value, volume, -1.0),
                max: implied_pearson(value, volume, 1.0),
            });
        }
        return Ok(rho);
    }

    let quad = CopulaQuadrature::new(value, volume);
    let (min, max) = (quad.pearson(-1.0), quad.pearson(1.0));
    if target < min || target > max {
        return Err(Error::InfeasibleCorrelation { target, min, max });
    }
    let (mut lo, mut hi) = (-1.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if quad.pearson(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A validated spec with its latent correlation solved.
#[derive(Debug, Clone)]
pub struct Generator {
    spec: GenSpec,
    rho: f64,
}

const CHUNK: u64 = 1 << 14;

impl Generator {
    pub fn new(spec: &GenSpec) -> Result<Self> {
        spec.validate()?;
        let rho = copula_correlation(&spec.value_dist, &spec.volume_dist, spec.target_corr_cu)?;
        Ok(Self {
            spec: spec.clone(),
            rho,
        })
    }

    pub fn spec(&self) -> &GenSpec {
        &self.spec
    }

    pub fn latent_correlation(&self) -> f64 {
        self.rho
    }

    /// Ticks `start..start + len`; tick `i` depends only on `(seed, i)`.
    pub fn chunk(&self, start: u64, len: u64) -> Vec<TradeTick> {
        let end = (start + len).min(self.spec.n_ticks);
        if start >= end {
            return Vec::new();
        }
        let s = (1.0 - self.rho * self.rho).max(0.0).sqrt();
        let mut stream = NormalStream::at_pair(self.spec.seed, 0, start);
        (start..end)
            .map(|i| {
                let (z1, z3) = stream.next_pair();
                let z2 = self.rho * z1 + s * z3;
                let time = self.spec.start_time + i as f64 * self.spec.time_step;
                let value = self.spec.value_dist.from_standard_normal(z1);
                let volume = self.spec.volume_dist.from_standard_normal(z2);
                TradeTick::new(time, value, volume).expect("validated marginals yield valid ticks")
            })
            .collect()
    }

    /// Lazily generated ticks, one chunk at a time.
    pub fn stream(&self) -> impl Iterator<Item = TradeTick> + '_ {
        (0..self.spec.n_ticks.div_ceil(CHUNK)).flat_map(move |c| self.chunk(c * CHUNK, CHUNK))
    }

    /// All ticks, generated in parallel chunks.
    pub fn generate(&self) -> Vec<TradeTick> {
        let n_chunks = self.spec.n_ticks.div_ceil(CHUNK);
        (0..n_chunks)
            .into_par_iter()
            .flat_map_iter(|c| self.chunk(c * CHUNK, CHUNK))
            .collect()
    }
}

pub fn generate(spec: &GenSpec) -> Result<Vec<TradeTick>> {
    Ok(Generator::new(spec)?.generate())
}

/// Deals of `spec` spread over `n_agents` agents by a seeded multinomial split.
///
/// The pool's window is the smallest one that holds every generated deal time.
pub fn agent_pool(spec: &GenSpec, n_agents: usize, seed: u64) -> Result<DealPool> {
    if n_agents == 0 {
        return Err(Error::InvalidSpec("n_agents must be at least 1".into()));
    }
    let ticks = generate(spec)?;
    let mut split = NormalStream::new(seed, 1);
    let deals = ticks
        .iter()
        .map(|t| {
            let agent = split.next_below(n_agents as u64);
            Deal::new(format!("agent-{agent}"), t.time(), t.value())
        })
        .collect::<Result<Vec<_>>>()?;

    let step = if spec.time_step > 0.0 { spec.time_step } else { 1.0 };
    let n = spec.n_ticks.max(1) as f64;
    let lo = spec.start_time - 0.5 * step;
    let window = WindowSpec::new(lo + 0.5 * n * step, n * step)?;
    // guard against the rounded bounds excluding the last deal
    let window = if deals.iter().all(|d| window.contains(d.time)) {
        window
    } else {
        WindowSpec::new(window.center() + 0.5 * step, window.width() + 2.0 * step)?
    };
    DealPool::new(window, deals)
}
