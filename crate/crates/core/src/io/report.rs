//! Canonical JSON form of an [`AnalysisReport`].
//!
//! Keys are sorted, floats use the shortest round-trip decimal, and output is
//! compact with a trailing newline, so identical inputs give identical bytes.
//! A quantity that is undefined or not finite is written as an object
//! `{"degenerate": "<reason>"}` in place of the number, never omitted.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Map, Number, Value};

use crate::aggregate::AggregateStats;
use crate::analysis::{
    AnalysisReport, CompositeOutcome, Paths, ReturnOutcome, WindowInfo, ENGINE_VERSION,
    REPORT_SCHEMA_VERSION,
};
use crate::composite::CompositeStats;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianApprox, GaussianGap};
use crate::moments::MomentSet;
use crate::price::PriceStats;
use crate::returns::ReturnStats;

fn degenerate(reason: &str) -> Value {
    json!({ "degenerate": reason })
}

/// A finite float as a JSON number, anything else as a degenerate marker.
pub fn num(x: f64) -> Value {
    match Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => degenerate("nan"),
        None if x > 0.0 => degenerate("+inf"),
        None => degenerate("-inf"),
    }
}

fn cv(x: Option<f64>) -> Value {
    x.map_or_else(|| degenerate("zero mean"), num)
}

fn obj<const N: usize>(entries: [(&str, Value); N]) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
}

fn rel_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn window(w: &WindowInfo) -> Value {
    obj([
        ("index", json!(w.index)),
        ("center", num(w.spec.center())),
        ("width", num(w.spec.width())),
        ("lo", num(w.spec.lo())),
        ("hi", num(w.spec.hi())),
        ("n_ticks", json!(w.n_ticks)),
    ])
}

fn moments(m: &MomentSet, weight: &str) -> Value {
    let arr = |xs: &[f64; 4]| Value::Array(xs.iter().copied().map(num).collect());
    let mut out = Map::new();
    out.insert("n_ticks".into(), json!(m.n_ticks));
    out.insert("value_moments".into(), arr(&m.value_moments));
    out.insert(format!("{weight}_moments"), arr(&m.volume_moments));
    out.insert(format!("cross_value_{weight}"), num(m.cross_cu));
    out.insert("value_volatility".into(), num(m.value_volatility));
    out.insert(format!("{weight}_volatility"), num(m.volume_volatility));
    out.insert(format!("corr_value_{weight}"), num(m.corr_cu));
    Value::Object(out)
}

fn price(p: &PriceStats) -> Value {
    obj([
        ("mean", num(p.mean)),
        ("second_moment", num(p.second_moment)),
        ("volatility", num(p.volatility)),
        ("cv_sq", cv(p.cv_sq)),
        ("weighted_price_m1", num(p.weighted_price_m1)),
        ("weighted_price_m2", num(p.weighted_price_m2)),
    ])
}

fn ret(r: &ReturnStats) -> Value {
    obj([
        ("mean", num(r.mean)),
        ("second_moment", num(r.second_moment)),
        ("volatility", num(r.volatility)),
        ("cv_sq", cv(r.cv_sq)),
    ])
}

/// Absolute and relative discrepancy between the two paths.
fn path_gap(direct: (f64, f64), closed: (f64, f64)) -> Value {
    obj([
        ("volatility_abs", num((direct.0 - closed.0).abs())),
        ("volatility_rel", num(rel_gap(direct.0, closed.0))),
        ("second_moment_abs", num((direct.1 - closed.1).abs())),
        ("second_moment_rel", num(rel_gap(direct.1, closed.1))),
    ])
}

fn price_paths(p: &Paths<PriceStats>) -> Value {
    obj([
        ("direct", price(&p.direct)),
        ("closed_form", price(&p.closed_form)),
        (
            "path_gap",
            path_gap(
                (p.direct.volatility, p.direct.second_moment),
                (p.closed_form.volatility, p.closed_form.second_moment),
            ),
        ),
    ])
}

fn aggregate(a: &AggregateStats) -> Value {
    obj([
        ("k", json!(a.k)),
        ("deal_mean", num(a.deal_mean)),
        ("deal_second", num(a.deal_second)),
        ("deal_volatility", num(a.deal_volatility())),
        ("total", num(a.total)),
        ("total_second", num(a.total_second)),
        ("agg_mean", num(a.agg_mean)),
        ("agg_volatility", num(a.agg_volatility)),
        ("agg_cv_sq", cv(a.agg_cv_sq)),
        ("deal_cv_sq", cv(a.deal_cv_sq)),
        (
            "cv_transfer_gap",
            match (a.agg_cv_sq, a.deal_cv_sq) {
                (Some(x), Some(c)) => num((x - c).abs()),
                _ => degenerate("zero mean"),
            },
        ),
    ])
}

fn composite(c: &CompositeStats) -> Value {
    let theta: Map<String, Value> = c.theta.iter().map(|(k, &v)| (k.clone(), num(v))).collect();
    let chi: Map<String, Value> = c
        .component_cv_sq
        .iter()
        .map(|(k, &v)| (k.clone(), cv(v)))
        .collect();
    let pairs: Vec<Value> = c
        .phi
        .iter()
        .map(|p| {
            obj([
                ("between", json!([p.first, p.second])),
                ("corr", num(p.corr)),
                ("phi", num(p.phi)),
                ("psi", cv(p.psi)),
            ])
        })
        .collect();
    obj([
        ("mean", num(c.mean)),
        ("volatility", num(c.volatility)),
        ("cv_sq", num(c.cv_sq)),
        ("decomposed_cv_sq", cv(c.decomposed_cv_sq)),
        ("normalization", num(c.normalization())),
        ("theta", Value::Object(theta)),
        ("component_cv_sq", Value::Object(chi)),
        ("pairs", Value::Array(pairs)),
    ])
}

fn gaussian(g: &GaussianApprox) -> Value {
    obj([
        ("mean", num(g.mean)),
        ("variance", num(g.variance)),
        ("point_mass", json!(g.is_degenerate())),
    ])
}

fn gap(g: &GaussianGap) -> Value {
    obj([
        ("n", json!(g.n)),
        ("ks_statistic", num(g.ks_statistic)),
        ("excess_skewness", num(g.excess_skewness)),
        ("excess_kurtosis", num(g.excess_kurtosis)),
    ])
}

/// The report as a JSON value with the documented schema.
pub fn report_json(r: &AnalysisReport) -> Value {
    let mut out = Map::new();
    out.insert("schema_version".into(), json!(REPORT_SCHEMA_VERSION));
    out.insert(
        "engine".into(),
        json!({ "name": "market-moments", "version": ENGINE_VERSION }),
    );
    if let Some(p) = &r.provenance {
        out.insert(
            "provenance".into(),
            json!({ "seed": p.seed, "generator": p.generator }),
        );
    }
    if let Some(w) = &r.window {
        out.insert("window".into(), window(w));
    }
    if let Some(m) = &r.moments {
        out.insert("moments".into(), moments(m, "volume"));
    }
    if let Some(p) = &r.price {
        out.insert("price".into(), price_paths(p));
    }
    if let Some(s) = &r.returns {
        let mut sec = Map::new();
        sec.insert("lag".into(), num(s.lag));
        sec.insert("resolved".into(), json!(s.resolved));
        sec.insert("unresolved".into(), json!(s.unresolved));
        match &s.outcome {
            ReturnOutcome::Computed { moments: m, stats } => {
                sec.insert("moments".into(), moments(m, "past_value"));
                sec.insert("direct".into(), ret(&stats.direct));
                sec.insert("closed_form".into(), ret(&stats.closed_form));
                sec.insert(
                    "path_gap".into(),
                    path_gap(
                        (stats.direct.volatility, stats.direct.second_moment),
                        (stats.closed_form.volatility, stats.closed_form.second_moment),
                    ),
                );
            }
            ReturnOutcome::Empty => {
                sec.insert("status".into(), degenerate("empty lagged window"));
            }
        }
        out.insert("returns".into(), Value::Object(sec));
    }
    if let Some(a) = &r.aggregate {
        out.insert("aggregate".into(), aggregate(a));
    }
    match &r.composite {
        Some(CompositeOutcome::Full(c)) => {
            out.insert("composite".into(), composite(c));
        }
        Some(CompositeOutcome::ZeroMean(m)) => {
            out.insert(
                "composite".into(),
                obj([
                    ("mean", num(m.mean)),
                    ("volatility", num(m.volatility)),
                    ("cv_sq", degenerate("zero mean")),
                ]),
            );
        }
        None => {}
    }
    if let Some(o) = &r.oracle {
        let analytic = match &r.composite {
            Some(CompositeOutcome::Full(c)) => c.volatility,
            Some(CompositeOutcome::ZeroMean(m)) => m.volatility,
            None => f64::NAN,
        };
        out.insert(
            "oracle".into(),
            obj([
                ("draws", json!(o.draws)),
                ("sample_mean", num(o.sample_mean)),
                ("sample_variance", num(o.sample_variance)),
                ("variance_std_error", num(o.variance_std_error)),
                ("z_score", num(o.z_score(analytic))),
            ]),
        );
    }
    if !r.gaussian.is_empty() {
        let g: Map<String, Value> = r.gaussian.iter().map(|(k, g)| (k.clone(), gaussian(g))).collect();
        out.insert("gaussian".into(), Value::Object(g));
    }
    if !r.gaussian_gap.is_empty() {
        let g: Map<String, Value> = r.gaussian_gap.iter().map(|(k, g)| (k.clone(), gap(g))).collect();
        out.insert("gaussian_gap".into(), Value::Object(g));
    }
    out.insert("degeneracies".into(), json!(r.degeneracies));
    Value::Object(out)
}

/// Canonical single-line JSON, newline-terminated.
pub fn to_canonical_string(r: &AnalysisReport) -> String {
    let mut s = serde_json::to_string(&report_json(r)).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// Writes one report to `path`.
pub fn write_report(report: &AnalysisReport, path: &Path) -> Result<()> {
    let mut f = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    f.write_all(to_canonical_string(report).as_bytes())
        .and_then(|_| f.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{analyze_window, AnalyzeOptions};
    use crate::stream::WindowStream;
    use crate::trade::TradeTick;

    fn two_tick_report() -> AnalysisReport {
        let ticks = [(0.25, 12.0, 3.0), (0.75, 2.0, 1.0)].map(|(t, c, u)| TradeTick::new(t, c, u));
        let job = WindowStream::new(ticks.into_iter(), 1.0, 0.0, None)
            .unwrap()
            .next()
            .unwrap()
            .unwrap();
        analyze_window(&job, AnalyzeOptions::default()).unwrap()
    }

    #[test]
    fn keys_sorted_and_stable() {
        let a = to_canonical_string(&two_tick_report());
        let b = to_canonical_string(&two_tick_report());
        assert_eq!(a, b);
        assert!(a.ends_with('\n') && !a[..a.len() - 1].contains('\n'));
        let v: Value = serde_json::from_str(&a).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["price"]["direct"]["mean"], 3.5);
    }

    #[test]
    fn non_finite_marked_degenerate() {
        assert_eq!(num(f64::NAN), json!({"degenerate": "nan"}));
        assert_eq!(num(f64::NEG_INFINITY), json!({"degenerate": "-inf"}));
        assert_eq!(cv(None), json!({"degenerate": "zero mean"}));
        assert_eq!(num(0.1), json!(0.1));
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -0.0] {
            let s = serde_json::to_string(&num(x)).unwrap();
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }
}
