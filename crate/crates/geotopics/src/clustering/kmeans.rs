//! Lloyd's algorithm with K-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sq_dist;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const DEFAULT_KMEANS_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    /// C x D centroid matrix; every point is nearest its assigned centroid.
    pub centroids: Matrix,
    pub assignments: Vec<usize>,
    /// Total within-cluster sum of squared distances for the returned pair.
    pub inertia: f64,
    pub iterations_run: usize,
    /// Inertia after each assignment phase; non-increasing.
    pub inertia_trace: Vec<f64>,
}

/// K-means++ seeding: first center uniform, then squared-distance-weighted
/// draws. Sequential and fully determined by the RNG.
fn seed_centroids(points: &Matrix, c: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = points.rows();
    let d = points.cols();
    let mut centroids = Matrix::zeros(c, d);

    let first = rng.random_range(0..n);
    centroids.row_mut(0).copy_from_slice(points.row(first));

    let mut min_d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(points.row(i), centroids.row(0)))
        .collect();
    for k in 1..c {
        let total: f64 = min_d2.iter().sum();
        let chosen = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut idx = n - 1;
            for (i, &w) in min_d2.iter().enumerate() {
                acc += w;
                if acc > target {
                    idx = i;
                    break;
                }
            }
            idx
        } else {
            // all remaining mass at distance zero: any point will do
            rng.random_range(0..n)
        };
        centroids.row_mut(k).copy_from_slice(points.row(chosen));
        for (i, m) in min_d2.iter_mut().enumerate() {
            let d2 = sq_dist(points.row(i), centroids.row(k));
            if d2 < *m {
                *m = d2;
            }
        }
    }
    centroids
}

fn assign_all(points: &Matrix, centroids: &Matrix) -> (Vec<usize>, Vec<f64>) {
    let pairs: Vec<(usize, f64)> = (0..points.rows())
        .into_par_iter()
        .map(|i| {
            let p = points.row(i);
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for k in 0..centroids.rows() {
                let d2 = sq_dist(p, centroids.row(k));
                if d2 < best_d {
                    best_d = d2;
                    best = k;
                }
            }
            (best, best_d)
        })
        .collect();
    pairs.into_iter().unzip()
}

/// K-means clustering, deterministic per (seed, point order). Runs Lloyd
/// iterations until assignments stop changing or `max_iters`; empty clusters
/// are repaired by reseeding at the point farthest from its own centroid.
pub fn kmeans(points: &Matrix, c: usize, max_iters: usize, seed: u64) -> Result<KMeansResult> {
    let n = points.rows();
    if c == 0 {
        return Err(Error::InvalidArgument("cluster count must be positive".into()));
    }
    if n < c {
        return Err(Error::InvalidArgument(format!(
            "cannot split {n} points into {c} clusters"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(points, c, &mut rng);
    let mut assignments: Vec<usize> = Vec::new();
    let mut inertia = 0.0;
    let mut trace = Vec::new();
    let mut iterations = 0;

    for _ in 0..max_iters.max(1) {
        iterations += 1;
        let (mut assign, mut dists) = assign_all(points, &centroids);

        // Repair: move each empty centroid onto the point farthest from its
        // own centroid (only stealing from clusters that keep a member), and
        // adopt that point. Strictly decreases inertia.
        loop {
            let mut counts = vec![0usize; c];
            for &a in &assign {
                counts[a] += 1;
            }
            let Some(empty) = counts.iter().position(|&cnt| cnt == 0) else {
                break;
            };
            let farthest = (0..n)
                .filter(|&i| counts[assign[i]] > 1)
                .max_by(|&a, &b| dists[a].partial_cmp(&dists[b]).unwrap())
                .expect("a multi-member cluster exists while another is empty");
            centroids.row_mut(empty).copy_from_slice(points.row(farthest));
            assign[farthest] = empty;
            dists[farthest] = 0.0;
        }

        inertia = dists.iter().sum();
        trace.push(inertia);

        if assign == assignments {
            break;
        }
        assignments = assign;

        // Update step: centroids become member means.
        let d = points.cols();
        let mut sums = vec![0.0; c * d];
        let mut counts = vec![0usize; c];
        for (i, &a) in assignments.iter().enumerate() {
            counts[a] += 1;
            for (s, &x) in sums[a * d..(a + 1) * d].iter_mut().zip(points.row(i)) {
                *s += x;
            }
        }
        for k in 0..c {
            if counts[k] > 0 {
                let row = centroids.row_mut(k);
                for (cell, &s) in row.iter_mut().zip(&sums[k * d..(k + 1) * d]) {
                    *cell = s / counts[k] as f64;
                }
            }
        }
    }

    Ok(KMeansResult {
        centroids,
        assignments,
        inertia,
        iterations_run: iterations,
        inertia_trace: trace,
    })
}
