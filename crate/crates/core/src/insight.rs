//! Feed items: title, natural-language description and score for each
//! analytics result.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytics::AnalyticsResult;

/// Longest title, in characters.
pub const MAX_TITLE_CHARS: usize = 80;

/// Score given to single-field descriptive items.
pub const DESCRIPTIVE_SCORE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModuleKind {
    MeanVariance,
    Range,
    FreqCounts,
    FreqComb,
    Correlation,
    Kmeans,
    Dbscan,
    Linreg,
    Polyreg,
    UserPinned,
}

impl ModuleKind {
    /// Every computational module (everything except pinned items).
    pub const MODULES: [ModuleKind; 9] = [
        ModuleKind::MeanVariance,
        ModuleKind::Range,
        ModuleKind::FreqCounts,
        ModuleKind::FreqComb,
        ModuleKind::Correlation,
        ModuleKind::Kmeans,
        ModuleKind::Dbscan,
        ModuleKind::Linreg,
        ModuleKind::Polyreg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModuleKind::MeanVariance => "mean_variance",
            ModuleKind::Range => "range",
            ModuleKind::FreqCounts => "freq_counts",
            ModuleKind::FreqComb => "freq_comb",
            ModuleKind::Correlation => "correlation",
            ModuleKind::Kmeans => "kmeans",
            ModuleKind::Dbscan => "dbscan",
            ModuleKind::Linreg => "linreg",
            ModuleKind::Polyreg => "polyreg",
            ModuleKind::UserPinned => "user_pinned",
        }
    }

    /// Human label, as shown in a filter menu.
    pub fn label(self) -> &'static str {
        match self {
            ModuleKind::MeanVariance => "Mean/Variance",
            ModuleKind::Range => "Range",
            ModuleKind::FreqCounts => "Frequency Count",
            ModuleKind::FreqComb => "Frequency Combination",
            ModuleKind::Correlation => "Correlation",
            ModuleKind::Kmeans => "K-means",
            ModuleKind::Dbscan => "DBSCAN",
            ModuleKind::Linreg => "Linear Regression",
            ModuleKind::Polyreg => "Polynomial Regression",
            ModuleKind::UserPinned => "Pinned",
        }
    }
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown module kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for ModuleKind {
    type Err = UnknownKind;

    /// Accepts the snake_case name or the display label, ignoring case.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        ModuleKind::MODULES
            .iter()
            .chain(std::iter::once(&ModuleKind::UserPinned))
            .copied()
            .find(|k| k.as_str().eq_ignore_ascii_case(t) || k.label().eq_ignore_ascii_case(t))
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Auto,
    User,
}

/// One feed item. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Insight {
    pub id: String,
    pub kind: ModuleKind,
    pub fields: Vec<String>,
    pub title: String,
    pub description: String,
    /// In [0, 1].
    pub score: f64,
    pub chart_id: String,
    /// Logical feed clock, assigned when the item is added to a feed.
    pub created_at: u64,
    pub origin: Origin,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InsightError {
    #[error("{kind} insight cannot be built from a {result} result")]
    KindMismatch { kind: ModuleKind, result: &'static str },
    #[error("expected {expected} field name(s), got {got}")]
    FieldCount { expected: usize, got: usize },
}

impl Insight {
    /// Builds an automatically generated item from a module result.
    pub fn from_result(
        id: impl Into<String>,
        kind: ModuleKind,
        fields: Vec<String>,
        result: &AnalyticsResult<f64>,
        chart_id: impl Into<String>,
    ) -> Result<Self, InsightError> {
        Ok(Insight {
            id: id.into(),
            kind,
            title: render_title(kind, &fields, result)?,
            description: render_description(kind, &fields, result)?,
            score: score_insight(kind, result)?,
            fields,
            chart_id: chart_id.into(),
            created_at: 0,
            origin: Origin::Auto,
        })
    }

    /// A user-pinned view. Pinned items score 0.
    pub fn pinned(id: impl Into<String>, title: &str, fields: Vec<String>, chart_id: impl Into<String>) -> Self {
        let title = truncate_title(title.trim().to_string());
        let description = if fields.is_empty() {
            "Pinned view.".to_string()
        } else {
            format!(
                "Pinned view of {}.",
                fields.iter().map(|f| humanize(f)).collect::<Vec<_>>().join(" and ")
            )
        };
        Insight {
            id: id.into(),
            kind: ModuleKind::UserPinned,
            fields,
            title,
            description,
            score: 0.0,
            chart_id: chart_id.into(),
            created_at: 0,
            origin: Origin::User,
        }
    }

    pub fn touches_any<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> bool {
        names.into_iter().any(|n| self.fields.iter().any(|f| f == n))
    }
}

/// Formats a reported value: integers above 100, two decimals from 1 to
/// 100, two significant digits below 1. Trailing zeros are dropped.
pub fn format_value(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let a = v.abs();
    let decimals = if a >= 100.0 {
        0
    } else if a >= 1.0 || a == 0.0 {
        2
    } else {
        // two significant digits
        (1 - a.log10().floor() as i32).max(2) as usize
    };
    let mut s = format!("{v:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn format_percent(fraction: f64) -> String {
    format!("{}%", format_value(fraction * 100.0))
}

/// Field names read better in prose with spaces.
pub fn humanize(name: &str) -> String {
    name.replace('_', " ")
}

fn truncate_title(title: String) -> String {
    if title.chars().count() <= MAX_TITLE_CHARS {
        return title;
    }
    let mut t: String = title.chars().take(MAX_TITLE_CHARS - 1).collect();
    t.push('…');
    t
}

fn mismatch(kind: ModuleKind, result: &AnalyticsResult<f64>) -> InsightError {
    InsightError::KindMismatch {
        kind,
        result: result.variant_name(),
    }
}

fn field_args(fields: &[String], expected: usize) -> Result<(&str, &str), InsightError> {
    if fields.len() != expected {
        return Err(InsightError::FieldCount {
            expected,
            got: fields.len(),
        });
    }
    Ok((fields[0].as_str(), fields.get(1).map_or("", String::as_str)))
}

/// The compact, collapsed-state title.
pub fn render_title(
    kind: ModuleKind,
    fields: &[String],
    result: &AnalyticsResult<f64>,
) -> Result<String, InsightError> {
    use AnalyticsResult as R;
    let f = format_value;
    let title = match (kind, result) {
        (ModuleKind::MeanVariance | ModuleKind::Range, R::Summary { stats, range }) => {
            let (a, _) = field_args(fields, 1)?;
            format!("{a}: {}–{}, mean {}", f(range.min), f(range.max), f(stats.mean))
        }
        (ModuleKind::MeanVariance, R::MeanVariance(mv)) => {
            let (a, _) = field_args(fields, 1)?;
            format!("{a}: mean {}, variance {}", f(mv.mean), f(mv.variance))
        }
        (ModuleKind::Range, R::Range(r)) => {
            let (a, _) = field_args(fields, 1)?;
            format!("{a}: {}–{}", f(r.min), f(r.max))
        }
        (ModuleKind::FreqCounts, R::FreqCounts(fc)) => {
            let (a, _) = field_args(fields, 1)?;
            format!("Most frequent {a}: {}", fc.most)
        }
        (ModuleKind::FreqComb, R::FreqComb(fc)) => {
            let (a, b) = field_args(fields, 2)?;
            format!("Top combination: {a} = {}, {b} = {}", fc.argmax.0, fc.argmax.1)
        }
        (ModuleKind::Correlation, R::Correlation(c)) => {
            let (a, b) = field_args(fields, 2)?;
            format!("ρ = {} for {a} and {b}", f(c.rho))
        }
        (ModuleKind::Kmeans, R::KMeans(km)) => {
            let (a, b) = field_args(fields, 2)?;
            format!("{} clusters in {a} × {b}", km.k)
        }
        (ModuleKind::Dbscan, R::Dbscan(d)) => {
            let (a, b) = field_args(fields, 2)?;
            format!("DBSCAN (minPts {}): {} clusters in {a} × {b}", d.min_pts, d.cluster_count)
        }
        (ModuleKind::Linreg, R::Regression(r)) if r.degree == 1 => {
            let (a, b) = field_args(fields, 2)?;
            format!("Linear fit of {b} on {a}, RMSE {}", f(r.rmse))
        }
        (ModuleKind::Polyreg, R::Regression(r)) if r.degree >= 2 => {
            let (a, b) = field_args(fields, 2)?;
            format!("Degree-{} fit of {b} on {a}, RMSE {}", r.degree, f(r.rmse))
        }
        _ => return Err(mismatch(kind, result)),
    };
    Ok(truncate_title(title))
}

/// One-sentence description in the style of the module's template.
pub fn render_description(
    kind: ModuleKind,
    fields: &[String],
    result: &AnalyticsResult<f64>,
) -> Result<String, InsightError> {
    use AnalyticsResult as R;
    let f = format_value;
    let names: Vec<String> = fields.iter().map(|n| humanize(n)).collect();
    let text = match (kind, result) {
        (ModuleKind::MeanVariance | ModuleKind::Range, R::Summary { stats, range }) => {
            field_args(fields, 1)?;
            format!("{} averages {} (range {}–{}).", names[0], f(stats.mean), f(range.min), f(range.max))
        }
        (ModuleKind::MeanVariance, R::MeanVariance(mv)) => {
            field_args(fields, 1)?;
            format!(
                "Attribute {} has mean of {} with variance of {}.",
                names[0],
                f(mv.mean),
                f(mv.variance)
            )
        }
        (ModuleKind::Range, R::Range(r)) => {
            field_args(fields, 1)?;
            format!("Range ({}, {}) was found in attribute {}.", f(r.min), f(r.max), names[0])
        }
        (ModuleKind::FreqCounts, R::FreqCounts(fc)) => {
            field_args(fields, 1)?;
            format!(
                "{} was the most frequent sub-category in {} ({} of {}), and {} the least frequent ({}).",
                fc.most,
                names[0],
                fc.most_count(),
                fc.total,
                fc.least,
                fc.least_count()
            )
        }
        (ModuleKind::FreqComb, R::FreqComb(fc)) => {
            field_args(fields, 2)?;
            format!(
                "Most frequent combination was found between {} in attribute {}, and {} in attribute {}.",
                fc.argmax.0, names[0], fc.argmax.1, names[1]
            )
        }
        (ModuleKind::Correlation, R::Correlation(c)) => {
            field_args(fields, 2)?;
            format!(
                "Correlation of {} was found between attributes {} and {}.",
                f(c.rho),
                names[0],
                names[1]
            )
        }
        (ModuleKind::Kmeans, R::KMeans(km)) => {
            field_args(fields, 2)?;
            format!(
                "K-means with {} clusters between {} and {} has average error {}.",
                km.k,
                names[0],
                names[1],
                f(km.avg_error)
            )
        }
        (ModuleKind::Dbscan, R::Dbscan(d)) => {
            field_args(fields, 2)?;
            let mut s = format!(
                "DBSCAN between {} and {} with minPts = {} estimated {} clusters.",
                names[0], names[1], d.min_pts, d.cluster_count
            );
            if d.noise_count() > 0 {
                s.push_str(&format!(" {} of points were labeled noise.", format_percent(d.noise_fraction())));
            }
            s
        }
        (ModuleKind::Linreg, R::Regression(r)) if r.degree == 1 => {
            field_args(fields, 2)?;
            format!(
                "Linear regression between {} and {} has estimate error of {}.",
                names[0],
                names[1],
                f(r.rmse)
            )
        }
        (ModuleKind::Polyreg, R::Regression(r)) if r.degree >= 2 => {
            field_args(fields, 2)?;
            format!(
                "Polynomial regression of degree {} between {} and {} has estimate error of {}.",
                r.degree,
                names[0],
                names[1],
                f(r.rmse)
            )
        }
        _ => return Err(mismatch(kind, result)),
    };
    Ok(text)
}

/// Interestingness in [0, 1], comparable across modules.
pub fn score_insight(kind: ModuleKind, result: &AnalyticsResult<f64>) -> Result<f64, InsightError> {
    use AnalyticsResult as R;
    let raw = match (kind, result) {
        (ModuleKind::MeanVariance | ModuleKind::Range, R::Summary { .. })
        | (ModuleKind::MeanVariance, R::MeanVariance(_))
        | (ModuleKind::Range, R::Range(_)) => DESCRIPTIVE_SCORE,
        (ModuleKind::FreqCounts, R::FreqCounts(fc)) => {
            (fc.most_count() - fc.least_count()) as f64 / fc.total as f64
        }
        (ModuleKind::FreqComb, R::FreqComb(fc)) => fc.max_count() as f64 / fc.total as f64,
        (ModuleKind::Correlation, R::Correlation(c)) => c.rho.abs(),
        (ModuleKind::Kmeans, R::KMeans(km)) => km.explained(),
        (ModuleKind::Dbscan, R::Dbscan(d)) => {
            if d.cluster_count >= 1 {
                1.0 - d.noise_fraction()
            } else {
                0.0
            }
        }
        (ModuleKind::Linreg, R::Regression(r)) if r.degree == 1 => r.r_squared,
        (ModuleKind::Polyreg, R::Regression(r)) if r.degree >= 2 => r.r_squared,
        _ => return Err(mismatch(kind, result)),
    };
    Ok(if raw.is_nan() { 0.0 } else { raw.clamp(0.0, 1.0) })
}
