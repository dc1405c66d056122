//! Independent reference implementations used by the integration tests.
//! Numeric oracles work in exact rational arithmetic; the combinatorial ones
//! are brute force.
#![allow(dead_code)]

use std::collections::BTreeMap;

use insight_core::tabular::{DatasetMeta, Field, FieldKind};
use insight_core::ModuleKind;
use num::traits::Float;
use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;

pub fn f(x: &Q) -> f64 {
    x.to_f64().expect("representable")
}

/// `|a − b| ≤ tol · max(1, |b|)`
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

pub const REL_TOL: f64 = 1e-9;

/// Random dyadic value k / 1024 with |k| ≤ 10⁵; exact in f64.
pub fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-100_000i64..=100_000) as f64 / 1024.0
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pairs(rng: &mut ChaCha8Rng, min_len: usize, max_len: usize) -> Vec<(f64, f64)> {
    let n = rng.random_range(min_len..=max_len);
    (0..n).map(|_| (dyadic(rng), dyadic(rng))).collect()
}

/// Values as integers over a shared power-of-two denominator.
struct Scaled {
    vals: Vec<BigInt>,
    denom: BigInt,
}

fn scaled(xs: &[f64]) -> Scaled {
    let parts: Vec<(u64, i16, i8)> = xs.iter().map(|x| x.integer_decode()).collect();
    let shift = parts.iter().map(|&(_, e, _)| -(e as i32)).max().unwrap_or(0).max(0);
    let vals = parts
        .iter()
        .map(|&(m, e, sign)| {
            let v = BigInt::from(m) << ((e as i32 + shift) as usize);
            if sign < 0 { -v } else { v }
        })
        .collect();
    Scaled {
        vals,
        denom: BigInt::one() << shift as usize,
    }
}

fn big_n(len: usize) -> BigInt {
    BigInt::from(len)
}

/// n·ΣXY − ΣX·ΣY over the scaled integers.
fn co_moment(a: &Scaled, b: &Scaled) -> BigInt {
    let n = big_n(a.vals.len());
    let sab: BigInt = a.vals.iter().zip(&b.vals).map(|(x, y)| x * y).sum();
    let sa: BigInt = a.vals.iter().sum();
    let sb: BigInt = b.vals.iter().sum();
    n * sab - sa * sb
}

/// `(mean, sample variance)`, or `None` below two values.
pub fn mean_variance(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.len() < 2 {
        return None;
    }
    let s = scaled(xs);
    let n = big_n(xs.len());
    let sum: BigInt = s.vals.iter().sum();
    let mean = Q::new(sum, &n * &s.denom);
    // Σ(x − mean)² = (nΣX² − (ΣX)²) / (n·d²)
    let var = Q::new(co_moment(&s, &s), &n * (&n - 1) * &s.denom * &s.denom);
    Some((f(&mean), f(&var)))
}

/// Pearson ρ; `None` when either side is constant or n < 3.
pub fn pearson(pairs: &[(f64, f64)]) -> Option<f64> {
    if pairs.len() < 3 {
        return None;
    }
    let xs = scaled(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let ys = scaled(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let (sxx, syy, sxy) = (co_moment(&xs, &xs), co_moment(&ys, &ys), co_moment(&xs, &ys));
    if sxx.is_zero() || syy.is_zero() {
        return None;
    }
    // ρ² is rational and scale-free; only the final square root is inexact
    let r = f(&Q::new(&sxy * &sxy, sxx * syy)).sqrt();
    Some(if sxy.is_negative() { -r } else { r })
}

pub struct Fit {
    pub coefficients: Vec<f64>,
    pub rmse: f64,
    pub r_squared: f64,
}

/// Exact power sums in real units: Σxᵏ for k ≤ 2·degree, Σxᵏy for
/// k ≤ degree, Σy and Σy².
struct PowerSums {
    n: Q,
    x: Vec<Q>,
    xy: Vec<Q>,
    y: Q,
    yy: Q,
}

fn power_sums(pairs: &[(f64, f64)], degree: usize) -> PowerSums {
    let xs = scaled(&pairs.iter().map(|p| p.0).collect::<Vec<_>>());
    let ys = scaled(&pairs.iter().map(|p| p.1).collect::<Vec<_>>());
    let mut sx = vec![BigInt::zero(); 2 * degree + 1];
    let mut sxy = vec![BigInt::zero(); degree + 1];
    for (x, y) in xs.vals.iter().zip(&ys.vals) {
        let mut p = BigInt::one();
        for (k, acc) in sx.iter_mut().enumerate() {
            if k < sxy.len() {
                sxy[k] += &p * y;
            }
            *acc += &p;
            p *= x;
        }
    }
    let dpow = |k: usize| num::pow(xs.denom.clone(), k);
    PowerSums {
        n: Q::from_integer(big_n(pairs.len())),
        x: sx.into_iter().enumerate().map(|(k, v)| Q::new(v, dpow(k))).collect(),
        xy: sxy.into_iter().enumerate().map(|(k, v)| Q::new(v, dpow(k) * &ys.denom)).collect(),
        y: Q::new(ys.vals.iter().sum(), ys.denom.clone()),
        yy: Q::new(ys.vals.iter().map(|v| v * v).sum(), &ys.denom * &ys.denom),
    }
}

/// Residual statistics from power sums:
/// SS_res = Σy² − 2·Σₖ cₖ·Σxᵏy + Σⱼₖ cⱼcₖ·Σxʲ⁺ᵏ.
fn fit_stats(s: &PowerSums, coeffs: &[Q]) -> Fit {
    let mut ss_res = s.yy.clone();
    for (k, c) in coeffs.iter().enumerate() {
        ss_res -= Q::from_integer(2.into()) * c * &s.xy[k];
        for (j, d) in coeffs.iter().enumerate() {
            ss_res += c * d * &s.x[j + k];
        }
    }
    let ss_tot = &s.yy - &s.y * &s.y / &s.n;
    let r_squared = if ss_tot.is_zero() {
        0.0
    } else {
        f(&(Q::one() - &ss_res / &ss_tot)).clamp(0.0, 1.0)
    };
    Fit {
        coefficients: coeffs.iter().map(f).collect(),
        rmse: f(&(ss_res / &s.n)).sqrt(),
        r_squared,
    }
}

/// Closed-form least-squares line; `None` for constant x or n < 3.
pub fn linreg(pairs: &[(f64, f64)]) -> Option<Fit> {
    if pairs.len() < 3 {
        return None;
    }
    let s = power_sums(pairs, 1);
    let sxx = &s.n * &s.x[2] - &s.x[1] * &s.x[1];
    if sxx.is_zero() {
        return None;
    }
    let slope = (&s.n * &s.xy[1] - &s.x[1] * &s.y) / sxx;
    let intercept = (&s.y - &slope * &s.x[1]) / &s.n;
    Some(fit_stats(&s, &[intercept, slope]))
}

/// Solves the normal equations (VᵀV) c = Vᵀy exactly by Gauss-Jordan
/// elimination; `None` when singular.
pub fn polyreg(pairs: &[(f64, f64)], degree: usize) -> Option<Fit> {
    let cols = degree + 1;
    if pairs.len() < cols {
        return None;
    }
    let s = power_sums(pairs, degree);
    let mut m: Vec<Vec<Q>> = (0..cols)
        .map(|i| {
            let mut row: Vec<Q> = (0..cols).map(|j| s.x[i + j].clone()).collect();
            row.push(s.xy[i].clone());
            row
        })
        .collect();
    for c in 0..cols {
        let pivot = (c..cols).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, pivot);
        for r in 0..cols {
            if r != c && !m[r][c].is_zero() {
                let factor = &m[r][c] / &m[c][c];
                for k in c..=cols {
                    let delta = &factor * &m[c][k];
                    m[r][k] -= delta;
                }
            }
        }
    }
    let coeffs: Vec<Q> = (0..cols).map(|i| &m[i][cols] / &m[i][i]).collect();
    Some(fit_stats(&s, &coeffs))
}

/// Quadratic DBSCAN: cores by neighbor count, clusters as connected
/// components of cores numbered by their smallest core index, border points
/// to the lowest-numbered cluster among neighboring cores.
pub fn dbscan(points: &[[f64; 2]], eps: f64, min_pts: usize) -> (usize, Vec<Option<usize>>) {
    let n = points.len();
    let near = |i: usize, j: usize| {
        let dx = points[i][0] - points[j][0];
        let dy = points[i][1] - points[j][1];
        dx * dx + dy * dy <= eps * eps
    };
    let core: Vec<bool> = (0..n).map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_pts).collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..i {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    // component root → cluster id, assigned by first (smallest) core index
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut labels = vec![None; n];
    for i in 0..n {
        if core[i] {
            let root = find(&mut parent, i);
            let next = ids.len();
            labels[i] = Some(*ids.entry(root).or_insert(next));
        }
    }
    for i in 0..n {
        if !core[i] {
            labels[i] = (0..n).filter(|&j| core[j] && near(i, j)).filter_map(|j| labels[j]).min();
        }
    }
    (ids.len(), labels)
}

/// Canonical key of an enumerated task.
pub type TaskKey = (ModuleKind, Vec<String>, String);

/// Every `(kind, fields, params)` a schema admits, by checking each
/// candidate field subset against the applicability rules directly.
pub fn enumerate(meta: &DatasetMeta) -> Vec<TaskKey> {
    let cap = 100f64.min(meta.row_count as f64 / 2.0);
    let numeric = |f: &Field| f.kind == FieldKind::Numerical;
    let category = |f: &Field| {
        (f.kind == FieldKind::Categorical || f.kind == FieldKind::Temporal || (f.kind == FieldKind::Numerical && f.discrete))
            && f.distinct_count as f64 <= cap
    };
    let plain_category = |f: &Field| category(f) && f.kind != FieldKind::Temporal;
    let mut out = Vec::new();
    let fs = &meta.fields;
    for a in fs {
        if numeric(a) {
            out.push((ModuleKind::MeanVariance, vec![a.name.clone()], String::new()));
        }
        if category(a) {
            out.push((ModuleKind::FreqCounts, vec![a.name.clone()], String::new()));
        }
    }
    for i in 0..fs.len() {
        for j in 0..fs.len() {
            if i >= j {
                continue;
            }
            let pair = vec![fs[i].name.clone(), fs[j].name.clone()];
            if plain_category(&fs[i]) && plain_category(&fs[j]) {
                out.push((ModuleKind::FreqComb, pair.clone(), String::new()));
            }
            if numeric(&fs[i]) && numeric(&fs[j]) {
                out.push((ModuleKind::Correlation, pair.clone(), String::new()));
                for k in [3, 5, 7] {
                    out.push((ModuleKind::Kmeans, pair.clone(), format!("k={k}")));
                }
                for (m, e) in [(4, 0.05), (8, 0.1)] {
                    out.push((ModuleKind::Dbscan, pair.clone(), format!("min_pts={m},eps={e}")));
                }
                out.push((ModuleKind::Linreg, pair.clone(), String::new()));
                for d in [2, 3] {
                    out.push((ModuleKind::Polyreg, pair.clone(), format!("degree={d}")));
                }
            }
        }
    }
    out.sort();
    out
}

/// Random schema with `0..=6` numerical and `0..=6` categorical fields in
/// shuffled order. Some numerical fields are discrete, some categorical ones
/// temporal, and distinct counts straddle the cardinality cap.
pub fn random_schema(rng: &mut ChaCha8Rng) -> DatasetMeta {
    let row_count = rng.random_range(1..=500);
    let mut fields = Vec::new();
    for i in 0..rng.random_range(0..=6) {
        let discrete = rng.random_bool(0.3);
        let distinct = if discrete { rng.random_range(1..=10) } else { rng.random_range(1..=row_count) };
        fields.push(
            Field::new(format!("n{i}"), FieldKind::Numerical)
                .with_distinct(distinct)
                .with_discrete(discrete),
        );
    }
    for i in 0..rng.random_range(0..=6) {
        let kind = if rng.random_bool(0.2) { FieldKind::Temporal } else { FieldKind::Categorical };
        let distinct = rng.random_range(1..=(row_count.max(2) * 2).min(300));
        fields.push(Field::new(format!("c{i}"), kind).with_distinct(distinct));
    }
    // Fisher–Yates
    for i in (1..fields.len()).rev() {
        let j = rng.random_range(0..=i);
        fields.swap(i, j);
    }
    DatasetMeta { row_count, fields }
}

/// Three σ = 0.01 Gaussian blobs at the corners of a unit triangle, with
/// the generating blob of each point.
pub fn planted_blobs(per_blob: usize, seed: u64) -> (Vec<[f64; 2]>, Vec<usize>) {
    let corners = [[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
    let mut r = rng(seed);
    let mut gauss = || {
        // Box–Muller
        let u: f64 = 1.0 - r.random::<f64>();
        let v: f64 = r.random();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    };
    let mut points = Vec::new();
    let mut truth = Vec::new();
    for (c, corner) in corners.iter().enumerate() {
        for _ in 0..per_blob {
            points.push([corner[0] + 0.01 * gauss(), corner[1] + 0.01 * gauss()]);
            truth.push(c);
        }
    }
    (points, truth)
}

/// Same partition up to relabeling.
pub fn same_partition(a: &[usize], b: &[usize]) -> bool {
    let mut fwd = std::collections::HashMap::new();
    let mut back = std::collections::HashMap::new();
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| *fwd.entry(x).or_insert(y) == y && *back.entry(y).or_insert(x) == x)
}
