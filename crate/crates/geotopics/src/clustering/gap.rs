//! Model selection for the cluster count: the elbow curve and the gap
//! statistic against uniform reference draws over the data's bounding box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kmeans, wk, KMeansResult, DEFAULT_KMEANS_MAX_ITERS};
use crate::error::{Error, Result};
use crate::math::derive_seed;
use crate::matrix::Matrix;

pub const DEFAULT_REFERENCE_SETS: usize = 10;

const KMEANS_RESTARTS: u64 = 10;
const STREAM_REFERENCE_DRAW: u64 = 0xC1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub candidate_cs: Vec<usize>,
    /// log W_k of the observed data per candidate C.
    pub log_wk: Vec<f64>,
    /// Mean and population standard deviation of log W_k over the
    /// reference sets, per candidate C.
    pub ref_log_wk_mean: Vec<f64>,
    pub ref_log_wk_sd: Vec<f64>,
    /// gap[i] = ref_log_wk_mean[i] - log_wk[i], exactly.
    pub gap: Vec<f64>,
    /// Candidate with the greatest gap; ties go to the smaller C.
    pub optimal_c: usize,
    /// Smallest C satisfying Gap(C) >= Gap(C') - s(C') for the next larger
    /// candidate C', with s = sd * sqrt(1 + 1/B). None when no candidate
    /// qualifies or there is no successor to compare against.
    pub optimal_c_se: Option<usize>,
}

impl GapReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("C,log_wk,ref_mean,ref_sd,gap\n");
        for (i, &c) in self.candidate_cs.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c, self.log_wk[i], self.ref_log_wk_mean[i], self.ref_log_wk_sd[i], self.gap[i]
            ));
        }
        out
    }
}

fn validate_candidates(points: &Matrix, c_values: &[usize]) -> Result<()> {
    if c_values.is_empty() {
        return Err(Error::InvalidArgument(
            "no candidate cluster counts given".to_string(),
        ));
    }
    let n = points.rows();
    for &c in c_values {
        if c == 0 || c > n {
            return Err(Error::InvalidArgument(format!(
                "candidate C={c} outside valid range 1..={n}"
            )));
        }
    }
    Ok(())
}

/// Best of several restarts by inertia; ties go to the lowest restart
/// index, so the outcome is independent of scheduling. `set` distinguishes
/// the observed data (0) from reference draws (1..=B) in seed derivation.
fn best_kmeans(points: &Matrix, c: usize, base_seed: u64, set: u64) -> Result<KMeansResult> {
    let runs: Vec<Result<KMeansResult>> = (0..KMEANS_RESTARTS)
        .into_par_iter()
        .map(|r| {
            let seed = derive_seed(base_seed, (set << 32) | ((c as u64) << 8) | r);
            kmeans(points, c, DEFAULT_KMEANS_MAX_ITERS, seed)
        })
        .collect();
    let mut best: Option<KMeansResult> = None;
    for run in runs {
        let run = run?;
        let better = best.as_ref().is_none_or(|b| run.inertia < b.inertia);
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// log W_k per candidate C from the best of 10 seeded K-means restarts.
pub fn elbow_curve(points: &Matrix, c_values: &[usize], seed: u64) -> Result<Vec<(usize, f64)>> {
    validate_candidates(points, c_values)?;
    c_values
        .iter()
        .map(|&c| {
            let run = best_kmeans(points, c, seed, 0)?;
            Ok((c, wk(points, &run.assignments, c)?.log_wk))
        })
        .collect()
}

fn draw_references(points: &Matrix, count: usize, seed: u64) -> Vec<Matrix> {
    let (n, d) = (points.rows(), points.cols());
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for i in 0..n {
        for (j, &x) in points.row(i).iter().enumerate() {
            lo[j] = lo[j].min(x);
            hi[j] = hi[j].max(x);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut m = Matrix::zeros(n, d);
            for i in 0..n {
                let row = m.row_mut(i);
                for j in 0..d {
                    row[j] = lo[j] + rng.random::<f64>() * (hi[j] - lo[j]);
                }
            }
            m
        })
        .collect()
}

/// NaN-proof ordering key for gap comparisons.
fn gap_key(g: f64) -> f64 {
    if g.is_nan() {
        f64::NEG_INFINITY
    } else {
        g
    }
}

pub fn gap_statistic(
    points: &Matrix,
    c_values: &[usize],
    reference_sets: usize,
    seed: u64,
) -> Result<GapReport> {
    validate_candidates(points, c_values)?;
    if reference_sets == 0 {
        return Err(Error::InvalidArgument(
            "gap statistic needs at least one reference set".to_string(),
        ));
    }
    // One pool of reference draws, shared across every candidate C.
    let refs = draw_references(
        points,
        reference_sets,
        derive_seed(seed, STREAM_REFERENCE_DRAW),
    );

    let mut log_wk = Vec::with_capacity(c_values.len());
    let mut ref_mean = Vec::with_capacity(c_values.len());
    let mut ref_sd = Vec::with_capacity(c_values.len());
    let mut gap = Vec::with_capacity(c_values.len());
    for &c in c_values {
        let observed = best_kmeans(points, c, seed, 0)?;
        let lw = wk(points, &observed.assignments, c)?.log_wk;

        let mut ref_lws = Vec::with_capacity(reference_sets);
        for (b, reference) in refs.iter().enumerate() {
            let run = best_kmeans(reference, c, seed, (b + 1) as u64)?;
            ref_lws.push(wk(reference, &run.assignments, c)?.log_wk);
        }
        let mean = ref_lws.iter().sum::<f64>() / reference_sets as f64;
        let var = ref_lws.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>()
            / reference_sets as f64;

        log_wk.push(lw);
        ref_mean.push(mean);
        ref_sd.push(var.sqrt());
        gap.push(mean - lw);
    }

    let mut best = 0;
    for i in 1..c_values.len() {
        let better = gap_key(gap[i]) > gap_key(gap[best])
            || (gap_key(gap[i]) == gap_key(gap[best]) && c_values[i] < c_values[best]);
        if better {
            best = i;
        }
    }

    let se_factor = (1.0 + 1.0 / reference_sets as f64).sqrt();
    let mut order: Vec<usize> = (0..c_values.len()).collect();
    order.sort_by_key(|&i| c_values[i]);
    let mut optimal_c_se = None;
    for w in order.windows(2) {
        let (i, j) = (w[0], w[1]);
        if gap[i] >= gap[j] - ref_sd[j] * se_factor {
            optimal_c_se = Some(c_values[i]);
            break;
        }
    }

    Ok(GapReport {
        candidate_cs: c_values.to_vec(),
        log_wk,
        ref_log_wk_mean: ref_mean,
        ref_log_wk_sd: ref_sd,
        gap,
        optimal_c: c_values[best],
        optimal_c_se,
    })
}
