use std::collections::{HashMap, VecDeque};

use super::{require, sq_dist, AnalyticsError};
use crate::scalar::{Point, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Dbscan<T> {
    pub eps: T,
    pub min_pts: usize,
    pub cluster_count: usize,
    /// Cluster index per input point, `None` for noise.
    pub assignment: Vec<Option<usize>>,
}

impl<T> Dbscan<T> {
    pub fn noise_count(&self) -> usize {
        self.assignment.iter().filter(|a| a.is_none()).count()
    }

    pub fn noise_fraction(&self) -> f64 {
        if self.assignment.is_empty() {
            return 0.0;
        }
        self.noise_count() as f64 / self.assignment.len() as f64
    }
}

/// Density-based clustering.
///
/// A core point has at least `min_pts` points (itself included) within
/// distance `eps`. Points are scanned in input order; a border point
/// reachable from several clusters joins the first one expanded.
pub fn dbscan<T: Scalar>(points: &[Point<T>], eps: T, min_pts: usize) -> Result<Dbscan<T>, AnalyticsError> {
    if !(eps > T::zero()) || !eps.is_finite() {
        return Err(AnalyticsError::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if min_pts == 0 {
        return Err(AnalyticsError::InvalidParameter("min_pts must be at least 1".into()));
    }
    require(points.len(), min_pts)?;

    let index = NeighborIndex::new(points, eps);
    let n = points.len();
    let mut assignment: Vec<Option<usize>> = vec![None; n];
    let mut visited = vec![false; n];
    let mut cluster_count = 0;
    let mut queue = VecDeque::new();

    for p in 0..n {
        if visited[p] {
            continue;
        }
        visited[p] = true;
        let neighbors = index.region(p);
        if neighbors.len() < min_pts {
            continue;
        }
        let cluster = cluster_count;
        cluster_count += 1;
        assignment[p] = Some(cluster);
        queue.extend(neighbors);
        while let Some(q) = queue.pop_front() {
            if assignment[q].is_none() {
                assignment[q] = Some(cluster);
            }
            if visited[q] {
                continue;
            }
            visited[q] = true;
            let nq = index.region(q);
            if nq.len() >= min_pts {
                queue.extend(nq);
            }
        }
    }

    Ok(Dbscan {
        eps,
        min_pts,
        cluster_count,
        assignment,
    })
}

/// Uniform grid with cell side `eps`: every neighbor of a point lies in the
/// 3×3 block of cells around it. Falls back to a linear scan when the cell
/// coordinates do not fit in an `i64`.
struct NeighborIndex<'a, T> {
    points: &'a [Point<T>],
    eps: T,
    eps2: T,
    grid: Option<HashMap<(i64, i64), Vec<usize>>>,
}

impl<'a, T: Scalar> NeighborIndex<'a, T> {
    fn new(points: &'a [Point<T>], eps: T) -> Self {
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        let mut ok = true;
        for (i, p) in points.iter().enumerate() {
            match Self::cell_of(p, eps) {
                Some(c) => grid.entry(c).or_default().push(i),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        NeighborIndex {
            points,
            eps,
            eps2: eps * eps,
            grid: ok.then_some(grid),
        }
    }

    fn cell_of(p: &Point<T>, eps: T) -> Option<(i64, i64)> {
        let cx = (p[0] / eps).floor().to_i64()?;
        let cy = (p[1] / eps).floor().to_i64()?;
        // keep room for the ±1 neighbor offsets
        const LIMIT: i64 = i64::MAX / 2;
        ((-LIMIT..LIMIT).contains(&cx) && (-LIMIT..LIMIT).contains(&cy)).then_some((cx, cy))
    }

    /// Indices within `eps` of point `i`, ascending, including `i`.
    fn region(&self, i: usize) -> Vec<usize> {
        let p = &self.points[i];
        let mut out = Vec::new();
        match &self.grid {
            Some(grid) => {
                let (cx, cy) = Self::cell_of(p, self.eps).expect("indexed");
                for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(bucket) = grid.get(&(cx + dx, cy + dy)) {
                            out.extend(
                                bucket
                                    .iter()
                                    .copied()
                                    .filter(|&j| sq_dist(p, &self.points[j]) <= self.eps2),
                            );
                        }
                    }
                }
                out.sort_unstable();
            }
            None => out.extend((0..self.points.len()).filter(|&j| sq_dist(p, &self.points[j]) <= self.eps2)),
        }
        out
    }
}
