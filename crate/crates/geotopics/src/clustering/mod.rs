//! Clustering of feature vectors: K-means, a Gaussian mixture with a
//! structured covariance, and cluster-count selection via the elbow curve
//! and the gap statistic.

mod gap;
mod gmm;
mod kmeans;

pub use gap::{elbow_curve, gap_statistic, GapReport, DEFAULT_REFERENCE_SETS};
pub use gmm::{gmm_em, GaussianComponent, GmmResult, DEFAULT_GMM_MAX_ITERS, DEFAULT_GMM_TOL, VARIANCE_FLOOR};
pub use kmeans::{kmeans, KMeansResult, DEFAULT_KMEANS_MAX_ITERS};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Within-cluster dispersion and its log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WkValue {
    pub wk: f64,
    /// ln(wk); negative infinity when every cluster is a single point.
    pub log_wk: f64,
}

/// Normalized intra-cluster dispersion:
/// W_k = sum_r (1/(2 n_r)) * D_r, with D_r the sum of pairwise squared
/// distances inside cluster r. Computed in the algebraically identical
/// per-cluster sum-of-squared-errors form. Empty clusters contribute zero.
pub fn wk(points: &Matrix, assignments: &[usize], c: usize) -> Result<WkValue> {
    if assignments.is_empty() || c == 0 {
        return Err(Error::InvalidArgument(
            "wk requires a non-empty clustering".into(),
        ));
    }
    if assignments.len() != points.rows() {
        return Err(Error::InvalidArgument(format!(
            "{} assignments for {} points",
            assignments.len(),
            points.rows()
        )));
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= c) {
        return Err(Error::InvalidArgument(format!(
            "assignment {bad} out of range for {c} clusters"
        )));
    }

    let d = points.cols();
    let mut sums = vec![0.0; c * d];
    let mut counts = vec![0usize; c];
    for (i, &a) in assignments.iter().enumerate() {
        counts[a] += 1;
        for (s, &x) in sums[a * d..(a + 1) * d].iter_mut().zip(points.row(i)) {
            *s += x;
        }
    }
    let mut centroids = sums;
    for (r, &n) in counts.iter().enumerate() {
        if n > 0 {
            for v in &mut centroids[r * d..(r + 1) * d] {
                *v /= n as f64;
            }
        }
    }

    let mut total = 0.0;
    for (i, &a) in assignments.iter().enumerate() {
        total += sq_dist(points.row(i), &centroids[a * d..(a + 1) * d]);
    }
    let log_wk = if total > 0.0 {
        total.ln()
    } else {
        f64::NEG_INFINITY
    };
    Ok(WkValue { wk: total, log_wk })
}


#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn singleton_clusters_have_zero_dispersion() {
        let points = Matrix::from_rows(vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![-1.0, 2.0]]);
        let v = wk(&points, &[0, 1, 2], 3).unwrap();
        assert_eq!(v.wk, 0.0);
        assert_eq!(v.log_wk, f64::NEG_INFINITY);
    }

    #[test]
    fn two_point_cluster_gives_half_squared_distance() {
        // d = 5, pairwise form: (1/(2*2)) * (2 * 25) = 12.5
        let points = Matrix::from_rows(vec![vec![0.0, 0.0], vec![3.0, 4.0]]);
        let v = wk(&points, &[0, 0], 1).unwrap();
        assert_abs_diff_eq!(v.wk, 12.5, epsilon = 1e-12);
    }

    /// Independent oracle: the pairwise definition evaluated directly.
    fn wk_pairwise(points: &Matrix, assignments: &[usize], c: usize) -> f64 {
        let mut total = 0.0;
        for r in 0..c {
            let members: Vec<usize> = (0..points.rows()).filter(|&i| assignments[i] == r).collect();
            if members.is_empty() {
                continue;
            }
            let mut d_r = 0.0;
            for &i in &members {
                for &j in &members {
                    d_r += sq_dist(points.row(i), points.row(j));
                }
            }
            total += d_r / (2.0 * members.len() as f64);
        }
        total
    }

    #[test]
    fn sse_form_matches_pairwise_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for trial in 0..20 {
            let n = 30;
            let c = 4;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..3).map(|_| rng.random::<f64>() * 10.0).collect())
                .collect();
            let points = Matrix::from_rows(rows);
            let assignments: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
            let v = wk(&points, &assignments, c).unwrap();
            let oracle = wk_pairwise(&points, &assignments, c);
            assert!(
                (v.wk - oracle).abs() <= 1e-9 * oracle.max(1.0),
                "trial {trial}: {} vs {oracle}",
                v.wk
            );
        }
    }

    #[test]
    fn wk_rejects_bad_input() {
        let points = Matrix::from_rows(vec![vec![0.0]]);
        assert!(wk(&points, &[], 1).is_err());
        assert!(wk(&points, &[2], 2).is_err());
        assert!(wk(&points, &[0, 0], 1).is_err());
    }
}
