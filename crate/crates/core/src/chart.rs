//! Declarative chart specifications with computation overlays.
//!
//! Every chart carries its data inline, so one fetch renders it. The JSON
//! shape (field order is fixed):
//!
//! ```json
//! {"chart_id": "...", "mark": "point",
//!  "x": {"field": "A", "type": "quantitative", "bin": false},
//!  "y": {"field": "B", "type": "quantitative", "bin": false},
//!  "color": {"field": "cluster", "type": "nominal", "bin": false},
//!  "overlays": [{"type": "regression_line", "coefficients": [1.0, 2.0]}],
//!  "data": [{"A": 1.0, "B": 3.0}]}
//! ```
//!
//! `color` is omitted when absent, and a `count` encoding has no `field`.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::analytics::{self, AnalyticsResult};
use crate::insight::ModuleKind;
use crate::tabular::{Dataset, TableError};

pub const MAX_INLINE_ROWS: usize = 10_000;
pub const SCATTER_SAMPLE_ROWS: usize = 2_000;
pub const HISTOGRAM_BINS: usize = 10;
pub const MAX_HEATMAP_AXIS: usize = 100;

pub const COUNT_KEY: &str = "count";
pub const CLUSTER_KEY: &str = "cluster";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Bar,
    Line,
    Point,
    Rect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelType {
    Quantitative,
    Nominal,
    Temporal,
    Count,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Encoding {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(rename = "type")]
    pub channel_type: ChannelType,
    #[serde(default)]
    pub bin: bool,
}

impl Encoding {
    pub fn quantitative(field: &str) -> Self {
        Encoding {
            field: Some(field.to_string()),
            channel_type: ChannelType::Quantitative,
            bin: false,
        }
    }

    pub fn binned(field: &str) -> Self {
        Encoding {
            bin: true,
            ..Encoding::quantitative(field)
        }
    }

    pub fn nominal(field: &str) -> Self {
        Encoding {
            field: Some(field.to_string()),
            channel_type: ChannelType::Nominal,
            bin: false,
        }
    }

    pub fn count() -> Self {
        Encoding {
            field: None,
            channel_type: ChannelType::Count,
            bin: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Overlay {
    /// Polynomial in x, constant term first.
    RegressionLine { coefficients: Vec<f64> },
    /// Cluster index per point of the full point set; `null` is noise.
    ClusterAssignment { labels: Vec<Option<usize>> },
    MeanRule { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartSpec {
    pub chart_id: String,
    pub mark: Mark,
    pub x: Encoding,
    pub y: Encoding,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Encoding>,
    #[serde(default)]
    pub overlays: Vec<Overlay>,
    #[serde(default)]
    pub data: Vec<Map<String, Json>>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChartError {
    #[error("no {kind} chart for a {result} result")]
    KindMismatch { kind: ModuleKind, result: &'static str },
    #[error("field `{field}` has {distinct} distinct values; heatmap axes are capped at {MAX_HEATMAP_AXIS}")]
    UnrenderableCardinality { field: String, distinct: usize },
    #[error(transparent)]
    Data(#[from] TableError),
    #[error("expected {expected} field name(s), got {got}")]
    FieldCount { expected: usize, got: usize },
}

/// Builds the chart for one module result.
///
/// `seed` drives the scatterplot subsample; overlays always describe the
/// full data.
pub fn chart_for(
    chart_id: &str,
    kind: ModuleKind,
    fields: &[String],
    result: &AnalyticsResult<f64>,
    dataset: &Dataset,
    seed: u64,
) -> Result<ChartSpec, ChartError> {
    use AnalyticsResult as R;
    let want = |n: usize| {
        if fields.len() == n {
            Ok(())
        } else {
            Err(ChartError::FieldCount {
                expected: n,
                got: fields.len(),
            })
        }
    };
    let spec = match (kind, result) {
        (ModuleKind::MeanVariance | ModuleKind::Range, R::Summary { stats, .. })
        | (ModuleKind::MeanVariance, R::MeanVariance(stats)) => {
            want(1)?;
            let mut spec = histogram(chart_id, &fields[0], dataset, Mark::Bar)?;
            spec.overlays.push(Overlay::MeanRule { value: stats.mean });
            spec
        }
        (ModuleKind::Range, R::Range(_)) => {
            want(1)?;
            histogram(chart_id, &fields[0], dataset, Mark::Line)?
        }
        (ModuleKind::FreqCounts, R::FreqCounts(fc)) => {
            want(1)?;
            let a = &fields[0];
            let data = fc
                .counts
                .iter()
                .map(|(cat, n)| row(&[(a, json!(cat)), (COUNT_KEY, json!(n))]))
                .collect();
            ChartSpec {
                chart_id: chart_id.to_string(),
                mark: Mark::Bar,
                x: Encoding::nominal(a),
                y: Encoding::count(),
                color: None,
                overlays: Vec::new(),
                data,
            }
        }
        (ModuleKind::FreqComb, R::FreqComb(fc)) => {
            want(2)?;
            let (a, b) = (&fields[0], &fields[1]);
            for (field, distinct) in [
                (a, fc.matrix.keys().map(|k| &k.0).collect::<BTreeSet<_>>().len()),
                (b, fc.matrix.keys().map(|k| &k.1).collect::<BTreeSet<_>>().len()),
            ] {
                if distinct > MAX_HEATMAP_AXIS {
                    return Err(ChartError::UnrenderableCardinality {
                        field: field.clone(),
                        distinct,
                    });
                }
            }
            let data = fc
                .matrix
                .iter()
                .map(|((x, y), n)| row(&[(a, json!(x)), (b, json!(y)), (COUNT_KEY, json!(n))]))
                .collect();
            ChartSpec {
                chart_id: chart_id.to_string(),
                mark: Mark::Rect,
                x: Encoding::nominal(a),
                y: Encoding::nominal(b),
                color: Some(Encoding::count()),
                overlays: Vec::new(),
                data,
            }
        }
        (ModuleKind::Correlation, R::Correlation(_)) => {
            want(2)?;
            let pairs = dataset.pair_columns(&fields[0], &fields[1])?;
            let mut spec = scatter(chart_id, fields, &pairs, None, seed);
            if let Ok(fit) = analytics::linreg(&pairs) {
                spec.overlays.push(Overlay::RegressionLine {
                    coefficients: fit.coefficients,
                });
            }
            spec
        }
        (ModuleKind::Linreg | ModuleKind::Polyreg, R::Regression(r)) => {
            want(2)?;
            let pairs = dataset.pair_columns(&fields[0], &fields[1])?;
            let mut spec = scatter(chart_id, fields, &pairs, None, seed);
            spec.overlays.push(Overlay::RegressionLine {
                coefficients: r.coefficients.clone(),
            });
            spec
        }
        (ModuleKind::Kmeans, R::KMeans(km)) => {
            want(2)?;
            let pairs = dataset.pair_columns(&fields[0], &fields[1])?;
            let labels: Vec<Option<usize>> = km.assignment.iter().map(|&c| Some(c)).collect();
            clustered(chart_id, fields, &pairs, labels, seed)
        }
        (ModuleKind::Dbscan, R::Dbscan(d)) => {
            want(2)?;
            let pairs = dataset.pair_columns(&fields[0], &fields[1])?;
            clustered(chart_id, fields, &pairs, d.assignment.clone(), seed)
        }
        _ => {
            return Err(ChartError::KindMismatch {
                kind,
                result: result.variant_name(),
            })
        }
    };
    Ok(spec)
}

fn row(cells: &[(&str, Json)]) -> Map<String, Json> {
    cells.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn histogram(chart_id: &str, field: &str, dataset: &Dataset, mark: Mark) -> Result<ChartSpec, ChartError> {
    let xs = dataset.numeric_column(field)?;
    let end_key = format!("{field}_end");
    let data = histogram_bins(&xs)
        .into_iter()
        .map(|(lo, hi, n)| row(&[(field, json!(lo)), (&end_key, json!(hi)), (COUNT_KEY, json!(n))]))
        .collect();
    Ok(ChartSpec {
        chart_id: chart_id.to_string(),
        mark,
        x: Encoding::binned(field),
        y: Encoding::count(),
        color: None,
        overlays: Vec::new(),
        data,
    })
}

/// Equal-width bins as `(start, end, count)`. The maximum falls in the last
/// bin; a constant column gets a single bin.
pub fn histogram_bins(xs: &[f64]) -> Vec<(f64, f64, usize)> {
    let Some((lo, hi)) = xs
        .iter()
        .fold(None, |acc: Option<(f64, f64)>, &x| match acc {
            None => Some((x, x)),
            Some((l, h)) => Some((l.min(x), h.max(x))),
        })
    else {
        return Vec::new();
    };
    if hi == lo {
        return vec![(lo, hi, xs.len())];
    }
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut counts = [0usize; HISTOGRAM_BINS];
    for &x in xs {
        let i = (((x - lo) / width).floor() as usize).min(HISTOGRAM_BINS - 1);
        counts[i] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let start = lo + width * i as f64;
            let end = if i + 1 == HISTOGRAM_BINS { hi } else { lo + width * (i + 1) as f64 };
            (start, end, n)
        })
        .collect()
}

/// Row indices kept in a scatterplot: all of them up to the cap, otherwise a
/// seeded uniform sample in ascending order.
pub fn scatter_sample(n: usize, seed: u64) -> Vec<usize> {
    if n <= SCATTER_SAMPLE_ROWS {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, n, SCATTER_SAMPLE_ROWS).into_vec();
    picked.sort_unstable();
    picked
}

fn scatter(
    chart_id: &str,
    fields: &[String],
    pairs: &[(f64, f64)],
    labels: Option<&[Option<usize>]>,
    seed: u64,
) -> ChartSpec {
    let (a, b) = (&fields[0], &fields[1]);
    let data = scatter_sample(pairs.len(), seed)
        .into_iter()
        .map(|i| {
            let (x, y) = pairs[i];
            let mut r = row(&[(a, json!(x)), (b, json!(y))]);
            if let Some(labels) = labels {
                r.insert(CLUSTER_KEY.to_string(), json!(labels[i]));
            }
            r
        })
        .collect();
    ChartSpec {
        chart_id: chart_id.to_string(),
        mark: Mark::Point,
        x: Encoding::quantitative(a),
        y: Encoding::quantitative(b),
        color: None,
        overlays: Vec::new(),
        data,
    }
}

fn clustered(
    chart_id: &str,
    fields: &[String],
    pairs: &[(f64, f64)],
    labels: Vec<Option<usize>>,
    seed: u64,
) -> ChartSpec {
    let mut spec = scatter(chart_id, fields, pairs, Some(&labels), seed);
    spec.color = Some(Encoding::nominal(CLUSTER_KEY));
    spec.overlays.push(Overlay::ClusterAssignment { labels });
    spec
}

/// Checks every structural rule of a [`ChartSpec`]; returns the list of
/// violations, empty when the spec is well formed.
pub fn validate(spec: &ChartSpec) -> Vec<String> {
    let mut out = Vec::new();
    if spec.chart_id.is_empty() {
        out.push("chart_id is empty".to_string());
    }
    if spec.data.len() > MAX_INLINE_ROWS {
        out.push(format!(
            "{} inline rows exceed the cap of {MAX_INLINE_ROWS}",
            spec.data.len()
        ));
    }

    let channels = [("x", Some(&spec.x)), ("y", Some(&spec.y)), ("color", spec.color.as_ref())];
    for (name, enc) in channels {
        let Some(enc) = enc else { continue };
        match (enc.channel_type, &enc.field) {
            (ChannelType::Count, Some(f)) => out.push(format!("{name}: count channel has source field `{f}`")),
            (ChannelType::Count, None) => {}
            (_, None) => out.push(format!("{name}: missing field")),
            (_, Some(f)) => {
                if let Some(i) = spec.data.iter().position(|r| !r.contains_key(f)) {
                    out.push(format!("{name}: field `{f}` absent from data row {i}"));
                }
            }
        }
        if enc.bin && enc.channel_type != ChannelType::Quantitative {
            out.push(format!("{name}: only quantitative channels can be binned"));
        }
    }

    if spec.mark == Mark::Rect {
        for (name, enc) in [("x", &spec.x), ("y", &spec.y)] {
            if !matches!(enc.channel_type, ChannelType::Nominal | ChannelType::Temporal) {
                out.push(format!("rect: {name} must be categorical"));
            }
        }
        if !matches!(&spec.color, Some(c) if c.channel_type == ChannelType::Count) {
            out.push("rect: color must encode count".to_string());
        }
    }

    for o in &spec.overlays {
        match o {
            Overlay::RegressionLine { coefficients } if coefficients.is_empty() => {
                out.push("regression_line has no coefficients".to_string())
            }
            Overlay::RegressionLine { coefficients } if coefficients.iter().any(|c| !c.is_finite()) => {
                out.push("regression_line has non-finite coefficients".to_string())
            }
            Overlay::MeanRule { value } if !value.is_finite() => out.push("mean_rule is not finite".to_string()),
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{parse_table, TableFormat};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn heatmap() -> ChartSpec {
        ChartSpec {
            chart_id: "c1".into(),
            mark: Mark::Rect,
            x: Encoding::nominal("a"),
            y: Encoding::nominal("b"),
            color: Some(Encoding::count()),
            overlays: vec![],
            data: vec![row(&[("a", json!("x")), ("b", json!("y")), (COUNT_KEY, json!(3))])],
        }
    }

    #[test]
    fn well_formed_heatmap() {
        assert!(validate(&heatmap()).is_empty());
    }

    #[test]
    fn rect_needs_categorical_axes() {
        let mut spec = heatmap();
        spec.x = Encoding::quantitative("a");
        let v = validate(&spec);
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].contains("rect: x"));
    }

    #[test]
    fn row_cap() {
        let mut spec = heatmap();
        spec.data = vec![spec.data[0].clone(); MAX_INLINE_ROWS + 1];
        assert!(validate(&spec).iter().any(|v| v.contains("exceed")));
    }

    #[test]
    fn count_channel_must_not_name_a_field() {
        let mut spec = heatmap();
        spec.color = Some(Encoding {
            field: Some("count".into()),
            channel_type: ChannelType::Count,
            bin: false,
        });
        assert!(!validate(&spec).is_empty());
    }

    #[test]
    fn json_shape_is_stable() {
        let text = serde_json::to_string(&heatmap()).unwrap();
        assert_eq!(
            text,
            r#"{"chart_id":"c1","mark":"rect","x":{"field":"a","type":"nominal","bin":false},"y":{"field":"b","type":"nominal","bin":false},"color":{"type":"count","bin":false},"overlays":[],"data":[{"a":"x","b":"y","count":3}]}"#
        );
        let overlay = serde_json::to_string(&Overlay::RegressionLine { coefficients: vec![1.0, 2.0] }).unwrap();
        assert_eq!(overlay, r#"{"type":"regression_line","coefficients":[1.0,2.0]}"#);
    }

    #[test]
    fn histogram_counts_sum_to_n() {
        let xs: Vec<f64> = (0..97).map(|i| (i as f64).sqrt()).collect();
        let bins = histogram_bins(&xs);
        assert_eq!(bins.len(), HISTOGRAM_BINS);
        assert_eq!(bins.iter().map(|b| b.2).sum::<usize>(), 97);
        assert_eq!(bins.last().unwrap().1, xs[96]);
        assert_eq!(histogram_bins(&[2.0, 2.0]), vec![(2.0, 2.0, 2)]);
        assert!(histogram_bins(&[]).is_empty());
    }

    #[test]
    fn scatter_sample_is_seeded_and_capped() {
        assert_eq!(scatter_sample(5, 1), vec![0, 1, 2, 3, 4]);
        let a = scatter_sample(10_000, 7);
        assert_eq!(a.len(), SCATTER_SAMPLE_ROWS);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(a, scatter_sample(10_000, 7));
        assert_ne!(a, scatter_sample(10_000, 8));
    }

    #[test]
    fn charts_from_results() {
        let d = parse_table(b"a,b,c,d\n1,2,x,p\n2,4,x,q\n3,7,y,p\n4,8,x,p\n", TableFormat::Csv).unwrap();
        let fields = names(&["a", "b"]);

        let corr = AnalyticsResult::Correlation(analytics::pearson(&d.pair_columns("a", "b").unwrap()).unwrap());
        let spec = chart_for("c", ModuleKind::Correlation, &fields, &corr, &d, 0).unwrap();
        assert_eq!(spec.mark, Mark::Point);
        assert!(matches!(spec.overlays[0], Overlay::RegressionLine { .. }));
        assert!(validate(&spec).is_empty());

        let km = AnalyticsResult::KMeans(analytics::kmeans(&[[1.0, 2.0], [2.0, 4.0], [3.0, 7.0], [4.0, 8.0]], 3, 1).unwrap());
        let spec = chart_for("c", ModuleKind::Kmeans, &fields, &km, &d, 0).unwrap();
        let classes: BTreeSet<_> = spec.data.iter().map(|r| r[CLUSTER_KEY].to_string()).collect();
        assert_eq!(classes.len(), 3);
        assert!(validate(&spec).is_empty());

        let (x, y) = d.category_pairs("c", "d").unwrap();
        let fc = AnalyticsResult::FreqComb(analytics::freq_comb(&x, &y).unwrap());
        let spec = chart_for("c", ModuleKind::FreqComb, &names(&["c", "d"]), &fc, &d, 0).unwrap();
        assert_eq!(spec.mark, Mark::Rect);
        assert!(validate(&spec).is_empty());

        let s = analytics::summary(&d.numeric_column("a").unwrap()).unwrap();
        let spec = chart_for("c", ModuleKind::MeanVariance, &names(&["a"]), &s, &d, 0).unwrap();
        assert_eq!(spec.data.iter().map(|r| r[COUNT_KEY].as_u64().unwrap()).sum::<u64>(), 4);
        assert!(matches!(spec.overlays[0], Overlay::MeanRule { value } if value == 2.5));
        assert!(validate(&spec).is_empty());

        assert!(matches!(
            chart_for("c", ModuleKind::Dbscan, &fields, &corr, &d, 0),
            Err(ChartError::KindMismatch { .. })
        ));
    }

    #[test]
    fn heatmap_axis_cap() {
        let mut text = String::from("a,b\n");
        for i in 0..150 {
            text.push_str(&format!("k{i},v\n"));
        }
        let d = parse_table(text.as_bytes(), TableFormat::Csv).unwrap();
        let (x, y) = d.category_pairs("a", "b").unwrap();
        let fc = AnalyticsResult::FreqComb(analytics::freq_comb(&x, &y).unwrap());
        assert!(matches!(
            chart_for("c", ModuleKind::FreqComb, &names(&["a", "b"]), &fc, &d, 0),
            Err(ChartError::UnrenderableCardinality { distinct: 150, .. })
        ));
    }
}
