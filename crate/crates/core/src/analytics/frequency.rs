use std::collections::BTreeMap;

use super::{require, AnalyticsError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqCounts {
    pub counts: BTreeMap<String, usize>,
    pub most: String,
    pub least: String,
    pub total: usize,
}

impl FreqCounts {
    pub fn most_count(&self) -> usize {
        self.counts[&self.most]
    }

    pub fn least_count(&self) -> usize {
        self.counts[&self.least]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqComb {
    pub matrix: BTreeMap<(String, String), usize>,
    pub argmax: (String, String),
    pub total: usize,
}

impl FreqComb {
    pub fn max_count(&self) -> usize {
        self.matrix[&self.argmax]
    }
}

/// Category counts. Ties for most and least frequent go to the
/// lexicographically smallest category.
pub fn freq_counts<S: AsRef<str>>(cats: &[S]) -> Result<FreqCounts, AnalyticsError> {
    require(cats.len(), 1)?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for c in cats {
        *counts.entry(c.as_ref().to_string()).or_default() += 1;
    }
    let mut most: Option<(&String, usize)> = None;
    let mut least: Option<(&String, usize)> = None;
    // ascending key order, strict comparisons: first key wins a tie
    for (k, &n) in &counts {
        if most.is_none_or(|(_, m)| n > m) {
            most = Some((k, n));
        }
        if least.is_none_or(|(_, m)| n < m) {
            least = Some((k, n));
        }
    }
    let most = most.expect("non-empty").0.clone();
    let least = least.expect("non-empty").0.clone();
    Ok(FreqCounts {
        counts,
        most,
        least,
        total: cats.len(),
    })
}

/// Co-occurrence counts of two row-aligned category columns.
pub fn freq_comb<A: AsRef<str>, B: AsRef<str>>(a: &[A], b: &[B]) -> Result<FreqComb, AnalyticsError> {
    if a.len() != b.len() {
        return Err(AnalyticsError::LengthMismatch(a.len(), b.len()));
    }
    require(a.len(), 1)?;
    let mut matrix: BTreeMap<(String, String), usize> = BTreeMap::new();
    for (x, y) in a.iter().zip(b) {
        *matrix
            .entry((x.as_ref().to_string(), y.as_ref().to_string()))
            .or_default() += 1;
    }
    let mut best: Option<(&(String, String), usize)> = None;
    for (k, &n) in &matrix {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((k, n));
        }
    }
    let argmax = best.expect("non-empty").0.clone();
    Ok(FreqComb {
        matrix,
        argmax,
        total: a.len(),
    })
}
