use super::{require, AnalyticsError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation<T> {
    /// Pearson coefficient, clamped to [-1, 1].
    pub rho: T,
    pub n: usize,
}

/// Pearson product-moment correlation, two-pass.
pub fn pearson<T: Scalar>(pairs: &[(T, T)]) -> Result<Correlation<T>, AnalyticsError> {
    require(pairs.len(), 3)?;
    let n = T::from_usize_lossy(pairs.len());
    let (sx, sy) = pairs
        .iter()
        .fold((T::zero(), T::zero()), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for &(x, y) in pairs {
        let dx = x - mx;
        let dy = y - my;
        sxy = sxy + dx * dy;
        sxx = sxx + dx * dx;
        syy = syy + dy * dy;
    }
    if sxx == T::zero() || syy == T::zero() {
        return Err(AnalyticsError::ZeroVariance);
    }
    let rho = sxy / (sxx * syy).sqrt();
    Ok(Correlation {
        rho: rho.max(-T::one()).min(T::one()),
        n: pairs.len(),
    })
}
