//! Uncertainty of linear combinations `a = sum_q beta(q) a(q)` of random
//! components, such as profit = sales - expenses.
//!
//! Correlations here are unnormalized: `corr(q, k) = E[(a(q) - A(q))(a(k) - A(k))]`.
//! The cross weights `Phi(q, k) = beta(q) beta(k) A(q) A(k) / A^2` keep the sign
//! of `beta(q) beta(k)`, so `sum theta + 2 sum Phi = 1` holds even with
//! negative coefficients.

mod oracle;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::accum::CompensatedSum;
use crate::error::{Error, Result};
use crate::moments::{cross_correlation, moment, volatility};

pub use oracle::{monte_carlo_composite_oracle, MonteCarloEstimate};

/// One component `a(q)` with its coefficient.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentStat {
    pub label: String,
    pub beta: f64,
    /// `A(q)`.
    pub mean: f64,
    /// `sigma^2(q)`.
    pub volatility: f64,
}

impl ComponentStat {
    pub fn new(label: impl Into<String>, beta: f64, mean: f64, volatility: f64) -> Result<Self> {
        let label = label.into();
        if !(beta.is_finite() && mean.is_finite()) {
            return Err(Error::InvalidStats(format!(
                "component {label}: beta and mean must be finite"
            )));
        }
        if !(volatility.is_finite() && volatility >= 0.0) {
            return Err(Error::InvalidStats(format!(
                "component {label}: volatility {volatility} must be non-negative"
            )));
        }
        Ok(Self {
            label,
            beta,
            mean,
            volatility,
        })
    }

    /// Mean and volatility estimated from raw observations.
    pub fn from_values(label: impl Into<String>, beta: f64, values: &[f64]) -> Result<Self> {
        Self::new(label, beta, moment(values, 1)?, volatility(values)?)
    }
}

/// Symmetric table of pairwise covariances keyed by component label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorrelationMatrix {
    entries: BTreeMap<(String, String), f64>,
}

fn key(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_owned(), b.to_owned())
    } else {
        (b.to_owned(), a.to_owned())
    }
}

impl CorrelationMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, a: &str, b: &str, corr: f64) -> Result<()> {
        if a == b {
            return Err(Error::InvalidCorrelation(format!(
                "diagonal entry ({a}, {a}) is the component volatility"
            )));
        }
        if !corr.is_finite() {
            return Err(Error::InvalidCorrelation(format!("({a}, {b}) = {corr}")));
        }
        self.entries.insert(key(a, b), corr);
        Ok(())
    }

    pub fn with(mut self, a: &str, b: &str, corr: f64) -> Result<Self> {
        self.insert(a, b, corr)?;
        Ok(self)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        self.entries.get(&key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Mean and volatility of a linear combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompositeMoments {
    pub mean: f64,
    pub volatility: f64,
}

/// Mean, volatility and the decomposition of the squared coefficient of
/// variation of a linear combination.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeStats {
    /// `A = sum beta(q) A(q)`.
    pub mean: f64,
    /// `sigma_A^2 = sum beta^2 sigma^2 + 2 sum_{q<k} beta(q) beta(k) corr(q, k)`.
    pub volatility: f64,
    /// `chi_A^2 = sigma_A^2 / A^2`.
    pub cv_sq: f64,
    /// `theta(q) = beta(q)^2 A(q)^2 / A^2`, keyed by label.
    pub theta: BTreeMap<String, f64>,
    /// `chi^2(q)`; `None` for a zero-mean component.
    pub component_cv_sq: BTreeMap<String, Option<f64>>,
    /// `Phi(q, k)` for `q` before `k` in input order.
    pub phi: Vec<PairTerm>,
    /// `sum theta chi^2 + 2 sum Phi Psi`; `None` when a component mean is zero.
    pub decomposed_cv_sq: Option<f64>,
}

/// Cross terms of one component pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTerm {
    pub first: String,
    pub second: String,
    pub corr: f64,
    pub phi: f64,
    /// `Psi(q, k) = corr(q, k) / (A(q) A(k))`; `None` for a zero-mean component.
    pub psi: Option<f64>,
}

impl CompositeStats {
    /// `sum theta + 2 sum Phi`, which equals one identically.
    pub fn normalization(&self) -> f64 {
        let theta = self.theta.values().copied();
        let phi = self.phi.iter().map(|p| 2.0 * p.phi);
        theta.chain(phi).collect::<CompensatedSum>().value()
    }

    pub fn pair(&self, first: &str, second: &str) -> Option<&PairTerm> {
        self.phi.iter().find(|p| {
            (p.first == first && p.second == second) || (p.first == second && p.second == first)
        })
    }
}

fn validate(components: &[ComponentStat], corr: &CorrelationMatrix) -> Result<Vec<Vec<f64>>> {
    if components.is_empty() {
        return Err(Error::IncompleteSpec("no components".into()));
    }
    let n = components.len();
    for (i, c) in components.iter().enumerate() {
        if components[..i].iter().any(|d| d.label == c.label) {
            return Err(Error::IncompleteSpec(format!("duplicate label {}", c.label)));
        }
    }
    let mut cov = vec![vec![0.0; n]; n];
    for q in 0..n {
        cov[q][q] = components[q].volatility;
        for k in q + 1..n {
            let (a, b) = (&components[q], &components[k]);
            let c = corr.get(&a.label, &b.label).ok_or_else(|| {
                Error::IncompleteSpec(format!("missing correlation ({}, {})", a.label, b.label))
            })?;
            let bound = (a.volatility * b.volatility).sqrt();
            if c.abs() > bound * (1.0 + 1e-9) + 1e-12 * (a.mean.abs() * b.mean.abs()).max(1.0) {
                return Err(Error::InvalidCorrelation(format!(
                    "|corr({}, {})| = {} exceeds sqrt of volatilities {bound}",
                    a.label,
                    b.label,
                    c.abs()
                )));
            }
            cov[q][k] = c;
            cov[k][q] = c;
        }
    }
    Ok(cov)
}

/// Mean and volatility only; defined even when the composite mean is zero.
pub fn composite_moments(
    components: &[ComponentStat],
    corr: &CorrelationMatrix,
) -> Result<CompositeMoments> {
    let cov = validate(components, corr)?;
    // compensated, since the terms may cancel and every share divides by the mean
    let mean = components
        .iter()
        .map(|c| c.beta * c.mean)
        .collect::<CompensatedSum>()
        .value();
    let mut volatility = 0.0;
    for (q, a) in components.iter().enumerate() {
        volatility += a.beta * a.beta * a.volatility;
        for (k, b) in components.iter().enumerate().skip(q + 1) {
            volatility += 2.0 * a.beta * b.beta * cov[q][k];
        }
    }
    Ok(CompositeMoments { mean, volatility })
}

pub fn composite_stats(
    components: &[ComponentStat],
    corr: &CorrelationMatrix,
) -> Result<CompositeStats> {
    let CompositeMoments { mean, volatility } = composite_moments(components, corr)?;
    if mean == 0.0 {
        return Err(Error::UndefinedCv);
    }
    let a2 = mean * mean;

    let mut theta = BTreeMap::new();
    let mut component_cv_sq = BTreeMap::new();
    let mut decomposed = Some(0.0);
    // shares r(q) = beta(q) A(q) / A; theta and Phi are their products
    let share: Vec<f64> = components.iter().map(|c| c.beta * c.mean / mean).collect();
    for (c, r) in components.iter().zip(&share) {
        let t = r * r;
        let chi = (c.mean != 0.0).then(|| c.volatility / (c.mean * c.mean));
        decomposed = decomposed.zip(chi).map(|(acc, chi)| acc + t * chi);
        theta.insert(c.label.clone(), t);
        component_cv_sq.insert(c.label.clone(), chi);
    }

    let mut phi = Vec::new();
    for (q, a) in components.iter().enumerate() {
        for (k, b) in components.iter().enumerate().skip(q + 1) {
            let c = corr.get(&a.label, &b.label).expect("validated");
            let p = share[q] * share[k];
            let psi = (a.mean != 0.0 && b.mean != 0.0).then(|| c / (a.mean * b.mean));
            decomposed = decomposed.zip(psi).map(|(acc, psi)| acc + 2.0 * p * psi);
            phi.push(PairTerm {
                first: a.label.clone(),
                second: b.label.clone(),
                corr: c,
                phi: p,
                psi,
            });
        }
    }

    Ok(CompositeStats {
        mean,
        volatility,
        cv_sq: volatility / a2,
        theta,
        component_cv_sq,
        phi,
        decomposed_cv_sq: decomposed,
    })
}

/// Where the sales/expense correlation of a profit computation comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfitCorrelation {
    /// Supplied by the caller.
    Explicit(f64),
    /// Estimated from the index-paired sale and expense sequences, which must
    /// then have equal lengths.
    Paired,
}

pub const SALES: &str = "sales";
pub const EXPENSES: &str = "expenses";

/// Profit `Pr = K_S Sa(1) - K_E Ex(1)` as a two-component combination with
/// `beta_sales = K_S` and `beta_expenses = -K_E`.
pub fn profit_stats(
    sales: &[f64],
    expenses: &[f64],
    correlation: ProfitCorrelation,
) -> Result<CompositeStats> {
    let corr = match correlation {
        ProfitCorrelation::Explicit(c) => c,
        ProfitCorrelation::Paired => {
            if sales.len() != expenses.len() {
                return Err(Error::IncompleteSpec(format!(
                    "cannot pair {} sales with {} expenses; supply the correlation explicitly",
                    sales.len(),
                    expenses.len()
                )));
            }
            cross_correlation(sales, expenses)?
        }
    };
    let components = [
        ComponentStat::from_values(SALES, sales.len() as f64, sales)?,
        ComponentStat::from_values(EXPENSES, -(expenses.len() as f64), expenses)?,
    ];
    let matrix = CorrelationMatrix::new().with(SALES, EXPENSES, corr)?;
    composite_stats(&components, &matrix)
}
