//! TOML documents: composite specs and generator specs.
//!
//! A composite spec lists components and every pairwise correlation:
//!
//! ```toml
//! [[components]]
//! label = "sales"
//! beta = 2.0          # optional when `values` is given: defaults to their count
//! mean = 6.0
//! volatility = 1.0
//!
//! [[components]]
//! label = "expenses"
//! beta = -2.0
//! values = [1.0, 3.0]  # alternative to mean/volatility
//!
//! [[correlations]]
//! between = ["sales", "expenses"]
//! value = -1.0
//! ```
//!
//! or, for profit, the raw deal values:
//!
//! ```toml
//! [profit]
//! sales = [5.0, 7.0]
//! expenses = [1.0, 3.0]
//! corr = -1.0          # optional: estimated from index pairs when absent
//! ```

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::composite::{
    composite_moments, composite_stats, profit_stats, ComponentStat, CompositeMoments,
    CompositeStats, CorrelationMatrix, ProfitCorrelation, EXPENSES, SALES,
};
use crate::error::{Error, Result};
use crate::moments::{cross_correlation, moment, volatility};
use crate::synth::GenSpec;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub label: String,
    pub beta: Option<f64>,
    pub mean: Option<f64>,
    pub volatility: Option<f64>,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationEntry {
    pub between: [String; 2],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfitEntry {
    pub sales: Vec<f64>,
    pub expenses: Vec<f64>,
    pub corr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositeSpec {
    #[serde(default)]
    pub components: Vec<ComponentEntry>,
    #[serde(default)]
    pub correlations: Vec<CorrelationEntry>,
    pub profit: Option<ProfitEntry>,
}

impl CompositeSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        match (&spec.profit, spec.components.is_empty()) {
            (Some(_), false) => Err(Error::Config(
                "use either [profit] or [[components]], not both".into(),
            )),
            (None, true) => Err(Error::IncompleteSpec("no components".into())),
            _ => Ok(spec),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Component statistics and correlation matrix described by the spec.
    pub fn resolve(&self) -> Result<(Vec<ComponentStat>, CorrelationMatrix)> {
        if let Some(p) = &self.profit {
            let corr = match p.corr {
                Some(c) => c,
                None if p.sales.len() == p.expenses.len() => cross_correlation(&p.sales, &p.expenses)?,
                None => {
                    return Err(Error::IncompleteSpec(
                        "sales and expenses differ in length; give corr explicitly".into(),
                    ))
                }
            };
            let comps = vec![
                ComponentStat::new(SALES, p.sales.len() as f64, moment(&p.sales, 1)?, volatility(&p.sales)?)?,
                ComponentStat::new(
                    EXPENSES,
                    -(p.expenses.len() as f64),
                    moment(&p.expenses, 1)?,
                    volatility(&p.expenses)?,
                )?,
            ];
            return Ok((comps, CorrelationMatrix::new().with(SALES, EXPENSES, corr)?));
        }
        let mut comps = Vec::with_capacity(self.components.len());
        for c in &self.components {
            let stat = match (&c.values, c.mean, c.volatility) {
                (Some(v), None, None) => {
                    ComponentStat::from_values(&c.label, c.beta.unwrap_or(v.len() as f64), v)?
                }
                (None, Some(m), Some(s)) => {
                    let beta = c.beta.ok_or_else(|| {
                        Error::IncompleteSpec(format!("component {}: beta required with mean/volatility", c.label))
                    })?;
                    ComponentStat::new(&c.label, beta, m, s)?
                }
                _ => {
                    return Err(Error::IncompleteSpec(format!(
                        "component {}: give either values or both mean and volatility",
                        c.label
                    )))
                }
            };
            comps.push(stat);
        }
        let mut corr = CorrelationMatrix::new();
        for e in &self.correlations {
            for label in &e.between {
                if !comps.iter().any(|c| &c.label == label) {
                    return Err(Error::IncompleteSpec(format!(
                        "correlation names unknown component {label}"
                    )));
                }
            }
            corr.insert(&e.between[0], &e.between[1], e.value)?;
        }
        Ok((comps, corr))
    }

    pub fn stats(&self) -> Result<CompositeStats> {
        if let Some(p) = &self.profit {
            let pairing = match p.corr {
                Some(c) => ProfitCorrelation::Explicit(c),
                None => ProfitCorrelation::Paired,
            };
            return profit_stats(&p.sales, &p.expenses, pairing);
        }
        let (comps, corr) = self.resolve()?;
        composite_stats(&comps, &corr)
    }

    pub fn moments(&self) -> Result<CompositeMoments> {
        let (comps, corr) = self.resolve()?;
        composite_moments(&comps, &corr)
    }
}

/// Loads a generator spec; `seed` overrides the one in the file.
pub fn load_genspec(path: &Path, seed: Option<u64>) -> Result<GenSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_genspec(&text, seed)
}

pub fn parse_genspec(text: &str, seed: Option<u64>) -> Result<GenSpec> {
    let mut spec: GenSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate()?;
    Ok(spec)
}
