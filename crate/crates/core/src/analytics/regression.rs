use super::{require, AnalyticsError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Regression<T> {
    pub degree: usize,
    /// Polynomial coefficients, constant term first.
    pub coefficients: Vec<T>,
    /// sqrt(Σ residual² / n)
    pub rmse: T,
    /// 1 − SS_res / SS_tot; zero when y is constant.
    pub r_squared: T,
    pub n: usize,
}

impl<T: Scalar> Regression<T> {
    pub fn predict(&self, x: T) -> T {
        self.coefficients
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * x + c)
    }
}

/// Ordinary least squares line; coefficients are `[intercept, slope]`.
pub fn linreg<T: Scalar>(pairs: &[(T, T)]) -> Result<Regression<T>, AnalyticsError> {
    require(pairs.len(), 3)?;
    let n = T::from_usize_lossy(pairs.len());
    let mx = pairs.iter().map(|p| p.0).sum::<T>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<T>() / n;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for &(x, y) in pairs {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if sxx == T::zero() {
        return Err(AnalyticsError::ZeroVariance);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(finish(pairs, 1, vec![intercept, slope], |x| intercept + slope * x))
}

/// Least-squares polynomial of the given degree, solved by Householder QR on
/// a Vandermonde matrix in standardized x, then expanded back to powers of
/// the raw x. Needs at least `degree + 1` points with as many distinct x
/// values; with exactly that many the fit interpolates.
pub fn polyreg<T: Scalar>(pairs: &[(T, T)], degree: usize) -> Result<Regression<T>, AnalyticsError> {
    if degree == 0 {
        return Err(AnalyticsError::InvalidParameter("degree must be at least 1".into()));
    }
    require(pairs.len(), degree + 1)?;

    let n = T::from_usize_lossy(pairs.len());
    let center = pairs.iter().map(|p| p.0).sum::<T>() / n;
    let scale = pairs
        .iter()
        .map(|p| (p.0 - center).abs())
        .fold(T::zero(), T::max);
    if scale == T::zero() {
        return Err(AnalyticsError::SingularSystem);
    }

    let cols = degree + 1;
    let mut a: Vec<Vec<T>> = pairs
        .iter()
        .map(|&(x, _)| {
            let t = (x - center) / scale;
            let mut row = Vec::with_capacity(cols);
            let mut v = T::one();
            for _ in 0..cols {
                row.push(v);
                v = v * t;
            }
            row
        })
        .collect();
    let mut b: Vec<T> = pairs.iter().map(|p| p.1).collect();
    let std_coeffs = householder_least_squares(&mut a, &mut b, cols)?;

    let eval_std = |x: T| {
        let t = (x - center) / scale;
        std_coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + c)
    };
    let coefficients = expand_shifted(&std_coeffs, center, scale);
    Ok(finish(pairs, degree, coefficients, eval_std))
}

fn finish<T: Scalar>(
    pairs: &[(T, T)],
    degree: usize,
    coefficients: Vec<T>,
    fitted: impl Fn(T) -> T,
) -> Regression<T> {
    let n = T::from_usize_lossy(pairs.len());
    let my = pairs.iter().map(|p| p.1).sum::<T>() / n;
    let ss_res: T = pairs
        .iter()
        .map(|&(x, y)| {
            let r = y - fitted(x);
            r * r
        })
        .sum();
    let ss_tot: T = pairs.iter().map(|&(_, y)| (y - my) * (y - my)).sum();
    let r_squared = if ss_tot > T::zero() {
        (T::one() - ss_res / ss_tot).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    Regression {
        degree,
        coefficients,
        rmse: (ss_res / n).sqrt(),
        r_squared,
        n: pairs.len(),
    }
}

/// Minimizes ‖A c − b‖ for a full-column-rank `m × cols` matrix (rows of
/// `a`). Both inputs are overwritten.
fn householder_least_squares<T: Scalar>(
    a: &mut [Vec<T>],
    b: &mut [T],
    cols: usize,
) -> Result<Vec<T>, AnalyticsError> {
    let m = a.len();
    let mut diag = vec![T::zero(); cols];
    for j in 0..cols {
        let norm = (j..m).map(|i| a[i][j] * a[i][j]).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(AnalyticsError::SingularSystem);
        }
        let alpha = if a[j][j] > T::zero() { -norm } else { norm };
        // v = x − alpha·e1, stored in place of column j
        a[j][j] = a[j][j] - alpha;
        let vtv = (j..m).map(|i| a[i][j] * a[i][j]).sum::<T>();
        let two = T::one() + T::one();
        for c in (j + 1)..cols {
            let dot = (j..m).map(|i| a[i][j] * a[i][c]).sum::<T>();
            let f = two * dot / vtv;
            for i in j..m {
                a[i][c] = a[i][c] - f * a[i][j];
            }
        }
        let dot = (j..m).map(|i| a[i][j] * b[i]).sum::<T>();
        let f = two * dot / vtv;
        for i in j..m {
            b[i] = b[i] - f * a[i][j];
        }
        diag[j] = alpha;
    }

    let largest = diag.iter().fold(T::zero(), |acc, d| acc.max(d.abs()));
    let tol = largest * T::epsilon() * T::from_usize_lossy(m.max(cols)) * T::from_f64_lossy(16.0);
    if diag.iter().any(|d| d.abs() <= tol) {
        return Err(AnalyticsError::SingularSystem);
    }

    let mut coeffs = vec![T::zero(); cols];
    for j in (0..cols).rev() {
        let mut s = b[j];
        for c in (j + 1)..cols {
            s = s - a[j][c] * coeffs[c];
        }
        coeffs[j] = s / diag[j];
    }
    Ok(coeffs)
}

/// Rewrites Σ bⱼ ((x − c)/s)ʲ as Σ aⱼ xʲ.
fn expand_shifted<T: Scalar>(std_coeffs: &[T], center: T, scale: T) -> Vec<T> {
    let d = std_coeffs.len();
    let mut out = vec![T::zero(); d];
    // poly holds the coefficients of ((x − c)/s)^j, updated by one factor per step
    let mut poly = vec![T::zero(); d];
    poly[0] = T::one();
    for (j, &b) in std_coeffs.iter().enumerate() {
        if j > 0 {
            let mut next = vec![T::zero(); d];
            for i in 0..j {
                next[i + 1] = next[i + 1] + poly[i] / scale;
                next[i] = next[i] - poly[i] * center / scale;
            }
            poly = next;
        }
        for i in 0..=j {
            out[i] = out[i] + b * poly[i];
        }
    }
    out
}
