//! The computational modules: pure functions from column data to an
//! [`AnalyticsResult`].
//!
//! Every kernel is generic over [`Scalar`]. Kernels never scale their input;
//! the engine min-max scales point sets before the clustering kernels.

mod correlation;
mod dbscan;
mod descriptive;
mod frequency;
mod kmeans;
mod regression;

use thiserror::Error;

use crate::scalar::{Point, Scalar};

pub use correlation::{pearson, Correlation};
pub use dbscan::{dbscan, Dbscan};
pub use descriptive::{mean_variance, min_max, MeanVariance, Range};
pub use frequency::{freq_comb, freq_counts, FreqComb, FreqCounts};
pub use kmeans::{kmeans, KMeans, KMEANS_MAX_ITERATIONS};
pub use regression::{linreg, polyreg, Regression};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("too few values: need at least {needed}, got {got}")]
    TooFewValues { needed: usize, got: usize },
    #[error("zero variance")]
    ZeroVariance,
    #[error("input lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("singular least-squares system")]
    SingularSystem,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl AnalyticsError {
    /// Degenerate-data outcomes that mean "nothing to report" rather than a
    /// module failure.
    pub fn is_skip(&self) -> bool {
        matches!(
            self,
            AnalyticsError::TooFewValues { .. } | AnalyticsError::ZeroVariance | AnalyticsError::SingularSystem
        )
    }
}

pub(crate) fn require(got: usize, needed: usize) -> Result<(), AnalyticsError> {
    if got < needed {
        Err(AnalyticsError::TooFewValues { needed, got })
    } else {
        Ok(())
    }
}

/// Output of one module run.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticsResult<T> {
    MeanVariance(MeanVariance<T>),
    Range(Range<T>),
    /// Mean/variance and range of one field, reported as a single item.
    Summary { stats: MeanVariance<T>, range: Range<T> },
    FreqCounts(FreqCounts),
    FreqComb(FreqComb),
    Correlation(Correlation<T>),
    KMeans(KMeans<T>),
    Dbscan(Dbscan<T>),
    Regression(Regression<T>),
}

impl<T> AnalyticsResult<T> {
    pub fn variant_name(&self) -> &'static str {
        match self {
            AnalyticsResult::MeanVariance(_) => "mean_variance",
            AnalyticsResult::Range(_) => "range",
            AnalyticsResult::Summary { .. } => "summary",
            AnalyticsResult::FreqCounts(_) => "freq_counts",
            AnalyticsResult::FreqComb(_) => "freq_comb",
            AnalyticsResult::Correlation(_) => "correlation",
            AnalyticsResult::KMeans(_) => "kmeans",
            AnalyticsResult::Dbscan(_) => "dbscan",
            AnalyticsResult::Regression(_) => "regression",
        }
    }
}

/// Mean and range together for one numerical column.
pub fn summary<T: Scalar>(xs: &[T]) -> Result<AnalyticsResult<T>, AnalyticsError> {
    Ok(AnalyticsResult::Summary {
        stats: mean_variance(xs)?,
        range: min_max(xs)?,
    })
}

/// Maps each axis independently onto [0, 1]. A constant axis maps to 0.
pub fn min_max_scale<T: Scalar>(points: &[Point<T>]) -> Vec<Point<T>> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut lo = points[0];
    let mut hi = points[0];
    for p in points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    points
        .iter()
        .map(|p| {
            let mut q = [T::zero(); 2];
            for d in 0..2 {
                let span = hi[d] - lo[d];
                q[d] = if span > T::zero() { (p[d] - lo[d]) / span } else { T::zero() };
            }
            q
        })
        .collect()
}

pub(crate) fn sq_dist<T: Scalar>(a: &Point<T>, b: &Point<T>) -> T {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    dx * dx + dy * dy
}
