use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{require, sq_dist, AnalyticsError};
use crate::scalar::{Point, Scalar};

pub const KMEANS_MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans<T> {
    pub k: usize,
    pub centroids: Vec<Point<T>>,
    /// Cluster index per input point; always `< k`.
    pub assignment: Vec<usize>,
    /// Mean Euclidean distance from each point to its centroid.
    pub avg_error: T,
    /// Final sum of squared distances to assigned centroids.
    pub inertia: T,
    /// Sum of squared distances to the overall mean (the k = 1 inertia).
    pub total_inertia: T,
    pub iterations: usize,
    /// Lloyd objective after each assignment step, ending with the final
    /// inertia.
    pub objective_trace: Vec<T>,
}

impl<T: Scalar> KMeans<T> {
    /// Fraction of the total inertia removed by the clustering, in [0, 1].
    pub fn explained(&self) -> T {
        if self.total_inertia <= T::zero() {
            return T::zero();
        }
        (T::one() - self.inertia / self.total_inertia).max(T::zero()).min(T::one())
    }
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// Stops when an update leaves every assignment unchanged or after
/// [`KMEANS_MAX_ITERATIONS`] updates. Empty clusters keep their previous
/// centroid. Output is a pure function of `(points, k, seed)`.
pub fn kmeans<T: Scalar>(points: &[Point<T>], k: usize, seed: u64) -> Result<KMeans<T>, AnalyticsError> {
    if k == 0 {
        return Err(AnalyticsError::InvalidParameter("k must be at least 1".into()));
    }
    require(points.len(), k)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_seeds(points, k, &mut rng);
    let mut assignment = assign(points, &centroids);
    let mut trace = Vec::new();
    let mut iterations = 0;

    while iterations < KMEANS_MAX_ITERATIONS {
        trace.push(inertia(points, &centroids, &assignment));
        centroids = update(points, &assignment, &centroids);
        iterations += 1;
        let next = assign(points, &centroids);
        if next == assignment {
            break;
        }
        assignment = next;
    }
    let final_inertia = inertia(points, &centroids, &assignment);
    trace.push(final_inertia);

    let n = T::from_usize_lossy(points.len());
    let avg_error = points
        .iter()
        .zip(&assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]).sqrt())
        .sum::<T>()
        / n;

    let mean = centroid_of(points.iter());
    let total_inertia = points.iter().map(|p| sq_dist(p, &mean)).sum();

    Ok(KMeans {
        k,
        centroids,
        assignment,
        avg_error,
        inertia: final_inertia,
        total_inertia,
        iterations,
        objective_trace: trace,
    })
}

fn plus_plus_seeds<T: Scalar>(points: &[Point<T>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Point<T>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![points[first]];
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| sq_dist(p, &points[first]).to_f64_lossy())
        .collect();

    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 && total.is_finite() {
            let mut target = rng.random::<f64>() * total;
            let mut idx = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                if target < w {
                    idx = Some(i);
                    break;
                }
                target -= w;
            }
            // rounding can run off the end; take the last positive weight
            idx.unwrap_or_else(|| d2.iter().rposition(|&w| w > 0.0).expect("total > 0"))
        } else {
            // every remaining point coincides with a centroid
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centroids.push(points[pick]);
        for (w, p) in d2.iter_mut().zip(points) {
            *w = w.min(sq_dist(p, &points[pick]).to_f64_lossy());
        }
    }
    centroids
}

fn assign<T: Scalar>(points: &[Point<T>], centroids: &[Point<T>]) -> Vec<usize> {
    points
        .iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = sq_dist(p, &centroids[0]);
            for (j, c) in centroids.iter().enumerate().skip(1) {
                let d = sq_dist(p, c);
                if d < best_d {
                    best = j;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

fn update<T: Scalar>(points: &[Point<T>], assignment: &[usize], previous: &[Point<T>]) -> Vec<Point<T>> {
    let k = previous.len();
    let mut sums = vec![[T::zero(); 2]; k];
    let mut counts = vec![0usize; k];
    for (p, &c) in points.iter().zip(assignment) {
        sums[c][0] = sums[c][0] + p[0];
        sums[c][1] = sums[c][1] + p[1];
        counts[c] += 1;
    }
    (0..k)
        .map(|j| {
            if counts[j] == 0 {
                previous[j]
            } else {
                let m = T::from_usize_lossy(counts[j]);
                [sums[j][0] / m, sums[j][1] / m]
            }
        })
        .collect()
}

fn inertia<T: Scalar>(points: &[Point<T>], centroids: &[Point<T>], assignment: &[usize]) -> T {
    points
        .iter()
        .zip(assignment)
        .map(|(p, &c)| sq_dist(p, &centroids[c]))
        .sum()
}

fn centroid_of<'a, T: Scalar>(points: impl Iterator<Item = &'a Point<T>>) -> Point<T> {
    let mut sum = [T::zero(); 2];
    let mut n = 0usize;
    for p in points {
        sum[0] = sum[0] + p[0];
        sum[1] = sum[1] + p[1];
        n += 1;
    }
    let m = T::from_usize_lossy(n.max(1));
    [sum[0] / m, sum[1] / m]
}
