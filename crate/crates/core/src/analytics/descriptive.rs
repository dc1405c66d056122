use super::{require, AnalyticsError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanVariance<T> {
    pub mean: T,
    /// Sample variance (n − 1 denominator).
    pub variance: T,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range<T> {
    pub min: T,
    pub max: T,
}

/// Two-pass mean and sample variance.
pub fn mean_variance<T: Scalar>(xs: &[T]) -> Result<MeanVariance<T>, AnalyticsError> {
    require(xs.len(), 2)?;
    let n = T::from_usize_lossy(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    let ss: T = xs.iter().map(|&x| (x - mean) * (x - mean)).sum();
    Ok(MeanVariance {
        mean,
        variance: ss / (n - T::one()),
        n: xs.len(),
    })
}

pub fn min_max<T: Scalar>(xs: &[T]) -> Result<Range<T>, AnalyticsError> {
    require(xs.len(), 1)?;
    let (min, max) = xs
        .iter()
        .fold((xs[0], xs[0]), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    Ok(Range { min, max })
}
