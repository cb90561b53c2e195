//! Lloyd's k-means with k-means++ seeding.

use rand::Rng;

use super::{FeatureError, Result};
use crate::rng::{stream_rng, StreamRng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub max_iter: usize,
    /// Independent k-means++ starts; the lowest-inertia run is kept.
    pub restarts: usize,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            max_iter: 300,
            restarts: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    /// `k` rows of `dim` values.
    pub centroids: Vec<Vec<f64>>,
    /// Cluster index for each point.
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Inertia after every centroid update of the kept run.
    pub inertia_history: Vec<f64>,
    pub iterations: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Clusters `points` (row-major, `dim` values per point) with the default config.
pub fn kmeans(points: &[f64], dim: usize, k: usize, seed: u64) -> Result<KMeansResult> {
    kmeans_with(
        points,
        dim,
        k,
        &mut stream_rng(seed, 0),
        &KMeansConfig::default(),
    )
}

pub fn kmeans_with(
    points: &[f64],
    dim: usize,
    k: usize,
    rng: &mut StreamRng,
    config: &KMeansConfig,
) -> Result<KMeansResult> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(FeatureError::DimensionMismatch {
            expected: dim,
            actual: points.len(),
        });
    }
    if k == 0 {
        return Err(FeatureError::InvalidParameter(
            "k must be at least 1".into(),
        ));
    }
    let rows: Vec<&[f64]> = points.chunks_exact(dim).collect();
    if rows.len() < k {
        return Err(FeatureError::TooFewPoints {
            points: rows.len(),
            k,
        });
    }
    let mut best: Option<KMeansResult> = None;
    for _ in 0..config.restarts.max(1) {
        let init = plus_plus_init(&rows, k, rng);
        let run = lloyd(&rows, init, config.max_iter);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one run"))
}

fn plus_plus_init(rows: &[&[f64]], k: usize, rng: &mut StreamRng) -> Vec<Vec<f64>> {
    let n = rows.len();
    let mut centroids = vec![rows[rng.random_range(0..n)].to_vec()];
    let mut nearest: Vec<f64> = rows.iter().map(|r| sq_dist(r, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = nearest.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = n - 1;
            for (i, d) in nearest.iter().enumerate() {
                acc += d;
                if acc > target && *d > 0.0 {
                    chosen = i;
                    break;
                }
            }
            // rounding can leave `chosen` on a zero-weight tail point
            if nearest[chosen] == 0.0 {
                chosen = nearest.iter().rposition(|&d| d > 0.0).unwrap_or(chosen);
            }
            chosen
        } else {
            // fewer distinct points than k; the repair step separates duplicates
            rng.random_range(0..n)
        };
        let c = rows[pick].to_vec();
        for (d, r) in nearest.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, &c));
        }
        centroids.push(c);
    }
    centroids
}

fn inertia(rows: &[&[f64]], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    rows.iter()
        .zip(assignments)
        .map(|(r, &a)| sq_dist(r, &centroids[a]))
        .sum()
}

/// Assigns each point to its nearest centroid, keeping the current cluster
/// on ties. Returns whether any assignment changed.
fn assign(rows: &[&[f64]], centroids: &[Vec<f64>], assignments: &mut [usize]) -> bool {
    let mut changed = false;
    for (r, a) in rows.iter().zip(assignments.iter_mut()) {
        let (mut best, mut best_d) = match centroids.get(*a) {
            Some(c) => (*a, sq_dist(r, c)),
            None => (usize::MAX, f64::INFINITY),
        };
        for (j, c) in centroids.iter().enumerate() {
            let d = sq_dist(r, c);
            if d < best_d {
                best = j;
                best_d = d;
            }
        }
        if best != *a {
            *a = best;
            changed = true;
        }
    }
    changed
}

/// Gives every empty cluster the point farthest from its own centroid,
/// taken from a cluster that can spare one. Returns whether anything moved.
fn repair_empty(rows: &[&[f64]], centroids: &mut [Vec<f64>], assignments: &mut [usize]) -> bool {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &a in assignments.iter() {
        counts[a] += 1;
    }
    let mut moved = false;
    while let Some(empty) = counts.iter().position(|&c| c == 0) {
        let donor = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| counts[assignments[*i]] > 1)
            .map(|(i, r)| (i, sq_dist(r, &centroids[assignments[i]])))
            .fold(None, |best: Option<(usize, f64)>, (i, d)| match best {
                Some((_, bd)) if bd >= d => best,
                _ => Some((i, d)),
            })
            .map(|(i, _)| i)
            .expect("n >= k guarantees a cluster with a spare point");
        counts[assignments[donor]] -= 1;
        counts[empty] += 1;
        assignments[donor] = empty;
        centroids[empty] = rows[donor].to_vec();
        moved = true;
    }
    moved
}

fn update_means(rows: &[&[f64]], assignments: &[usize], centroids: &mut [Vec<f64>]) {
    let dim = rows[0].len();
    let mut sums = vec![vec![0.0; dim]; centroids.len()];
    let mut counts = vec![0usize; centroids.len()];
    for (r, &a) in rows.iter().zip(assignments) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(r.iter()) {
            *s += x;
        }
    }
    for ((c, s), &n) in centroids.iter_mut().zip(sums).zip(&counts) {
        if n > 0 {
            *c = s.into_iter().map(|v| v / n as f64).collect();
        }
    }
}

fn lloyd(rows: &[&[f64]], mut centroids: Vec<Vec<f64>>, max_iter: usize) -> KMeansResult {
    let mut assignments = vec![usize::MAX; rows.len()];
    let mut history = Vec::new();
    let mut iterations = 0;
    for _ in 0..max_iter.max(1) {
        let changed = assign(rows, &centroids, &mut assignments);
        let repaired = repair_empty(rows, &mut centroids, &mut assignments);
        if !changed && !repaired {
            break;
        }
        update_means(rows, &assignments, &mut centroids);
        history.push(inertia(rows, &centroids, &assignments));
        iterations += 1;
    }
    KMeansResult {
        inertia: inertia(rows, &centroids, &assignments),
        centroids,
        assignments,
        inertia_history: history,
        iterations,
    }
}
