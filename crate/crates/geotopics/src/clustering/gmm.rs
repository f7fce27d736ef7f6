//! Gaussian mixture fitting by expectation-maximization with a structured
//! covariance: a full 2x2 block over (x, y) plus independent per-topic
//! variances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{kmeans, DEFAULT_KMEANS_MAX_ITERS};
use crate::error::{Error, Result};
use crate::math::{derive_seed, log_sum_exp};
use crate::matrix::Matrix;

pub const DEFAULT_GMM_MAX_ITERS: usize = 200;
pub const DEFAULT_GMM_TOL: f64 = 1e-6;
/// Smallest admissible variance along any axis; keeps every component's
/// density bounded and its covariance invertible.
pub const VARIANCE_FLOOR: f64 = 1e-6;

const STREAM_GMM_INIT: u64 = 0xB1;
const RESP_EPS: f64 = 1e-10;

/// One mixture component. The covariance is block-diagonal: `spatial_cov`
/// over the first two dimensions, `topic_var` over the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub spatial_cov: [[f64; 2]; 2],
    pub topic_var: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmResult {
    pub components: Vec<GaussianComponent>,
    /// N x C posterior component probabilities; rows sum to 1.
    pub responsibilities: Matrix,
    /// Total data log-likelihood per EM iteration; non-decreasing.
    pub log_likelihood_trace: Vec<f64>,
    /// Hard assignment: argmax responsibility per point.
    pub assignments: Vec<usize>,
    pub iterations_run: usize,
}

/// Eigenvalues of a symmetric 2x2 matrix, largest first.
pub(crate) fn symmetric_eigenvalues(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
    let half_tr = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    (half_tr + disc, half_tr - disc)
}

/// Clamps the eigenvalues of a symmetric 2x2 matrix to at least `floor`,
/// preserving the eigenvectors. Returns the input untouched when it already
/// satisfies the floor, so no reconstruction noise enters the common case.
fn floor_spatial(m: [[f64; 2]; 2], floor: f64) -> [[f64; 2]; 2] {
    let (l1, l2) = symmetric_eigenvalues(&m);
    if l2 >= floor {
        return m;
    }
    let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
    if b == 0.0 {
        return [[a.max(floor), 0.0], [0.0, c.max(floor)]];
    }
    // principal eigenvector (b, l1 - a), normalized; the second is its
    // perpendicular
    let (vx, vy) = (b, l1 - a);
    let norm = (vx * vx + vy * vy).sqrt();
    let (ux, uy) = (vx / norm, vy / norm);
    let (c1, c2) = (l1.max(floor), l2.max(floor));
    [
        [c1 * ux * ux + c2 * uy * uy, c1 * ux * uy - c2 * uy * ux],
        [c1 * ux * uy - c2 * uy * ux, c1 * uy * uy + c2 * ux * ux],
    ]
}

struct ComponentDensity {
    log_weight: f64,
    mean: Vec<f64>,
    // inverse of the 2x2 spatial block
    inv: [[f64; 2]; 2],
    // -0.5 * (D ln 2pi + ln det Sigma)
    log_norm: f64,
    inv_topic_var: Vec<f64>,
}

impl ComponentDensity {
    fn new(c: &GaussianComponent) -> ComponentDensity {
        let [[a, b], [_, d2]] = c.spatial_cov;
        let det = a * d2 - b * b;
        let inv = [[d2 / det, -b / det], [-b / det, a / det]];
        let dim = c.mean.len() as f64;
        let mut log_det = det.ln();
        for &v in &c.topic_var {
            log_det += v.ln();
        }
        ComponentDensity {
            log_weight: c.weight.ln(),
            mean: c.mean.clone(),
            inv,
            log_norm: -0.5 * (dim * (2.0 * std::f64::consts::PI).ln() + log_det),
            inv_topic_var: c.topic_var.iter().map(|&v| 1.0 / v).collect(),
        }
    }

    fn log_weighted_pdf(&self, x: &[f64]) -> f64 {
        let dx = x[0] - self.mean[0];
        let dy = x[1] - self.mean[1];
        let mut quad =
            self.inv[0][0] * dx * dx + 2.0 * self.inv[0][1] * dx * dy + self.inv[1][1] * dy * dy;
        for (j, &iv) in self.inv_topic_var.iter().enumerate() {
            let dt = x[j + 2] - self.mean[j + 2];
            quad += dt * dt * iv;
        }
        self.log_weight + self.log_norm - 0.5 * quad
    }
}

/// Weighted mean and block moments for one component.
fn weighted_moments(
    points: &Matrix,
    resp_col: impl Fn(usize) -> f64,
    n_c: f64,
) -> (Vec<f64>, [[f64; 2]; 2], Vec<f64>) {
    let d = points.cols();
    let mut mean = vec![0.0; d];
    for i in 0..points.rows() {
        let r = resp_col(i);
        for (m, &x) in mean.iter_mut().zip(points.row(i)) {
            *m += r * x;
        }
    }
    for m in &mut mean {
        *m /= n_c;
    }

    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    let mut topic = vec![0.0; d - 2];
    for i in 0..points.rows() {
        let r = resp_col(i);
        let row = points.row(i);
        let dx = row[0] - mean[0];
        let dy = row[1] - mean[1];
        sxx += r * dx * dx;
        sxy += r * dx * dy;
        syy += r * dy * dy;
        for (t, (&x, &m)) in topic.iter_mut().zip(row[2..].iter().zip(&mean[2..])) {
            *t += r * (x - m) * (x - m);
        }
    }
    let spatial = [[sxx / n_c, sxy / n_c], [sxy / n_c, syy / n_c]];
    for t in &mut topic {
        *t /= n_c;
    }
    (mean, spatial, topic)
}

fn floored_component(
    weight: f64,
    mean: Vec<f64>,
    spatial: [[f64; 2]; 2],
    topic: Vec<f64>,
) -> GaussianComponent {
    GaussianComponent {
        weight,
        mean,
        spatial_cov: floor_spatial(spatial, VARIANCE_FLOOR),
        topic_var: topic.into_iter().map(|v| v.max(VARIANCE_FLOOR)).collect(),
    }
}

/// Fits a C-component Gaussian mixture by EM, initialized from a K-means
/// run. Stops when the log-likelihood gain falls below `tol` or after
/// `max_iters` iterations. The returned responsibilities are consistent
/// with the returned components (the final E-step is not followed by an
/// M-step). Deterministic per (seed, point order).
pub fn gmm_em(
    points: &Matrix,
    c: usize,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<GmmResult> {
    let n = points.rows();
    let d = points.cols();
    if d < 2 {
        return Err(Error::InvalidArgument(format!(
            "mixture needs at least the 2 spatial dimensions, got {d}"
        )));
    }
    if c == 0 || n < c {
        return Err(Error::InvalidArgument(format!(
            "cannot fit {c} components to {n} points"
        )));
    }

    let km = kmeans(points, c, DEFAULT_KMEANS_MAX_ITERS, derive_seed(seed, STREAM_GMM_INIT))?;
    let mut components: Vec<GaussianComponent> = (0..c)
        .map(|k| {
            let members: Vec<usize> = (0..n).filter(|&i| km.assignments[i] == k).collect();
            let n_k = members.len() as f64;
            let indicator = |i: usize| if km.assignments[i] == k { 1.0 } else { 0.0 };
            let (mean, spatial, topic) = weighted_moments(points, indicator, n_k);
            floored_component(n_k / n as f64, mean, spatial, topic)
        })
        .collect();

    let mut responsibilities = Matrix::zeros(n, c);
    let mut trace: Vec<f64> = Vec::new();
    let mut iterations = 0;

    for iter in 0..max_iters.max(1) {
        iterations += 1;
        let densities: Vec<ComponentDensity> = components.iter().map(ComponentDensity::new).collect();

        let per_point: Vec<(Vec<f64>, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let x = points.row(i);
                let logs: Vec<f64> = densities.iter().map(|d| d.log_weighted_pdf(x)).collect();
                let lse = log_sum_exp(&logs);
                let resp: Vec<f64> = logs.iter().map(|&l| (l - lse).exp()).collect();
                (resp, lse)
            })
            .collect();

        let mut ll = 0.0;
        for (i, (resp, lse)) in per_point.iter().enumerate() {
            responsibilities.row_mut(i).copy_from_slice(resp);
            ll += lse;
        }
        if !ll.is_finite() {
            return Err(Error::Numerical(format!(
                "log-likelihood became non-finite at EM iteration {iter}"
            )));
        }
        let converged = trace.last().is_some_and(|&prev| ll - prev < tol);
        trace.push(ll);
        if converged || iter + 1 == max_iters.max(1) {
            break;
        }

        // M-step: weighted moments per component, floors applied. A
        // component with vanishing responsibility keeps its parameters.
        for k in 0..c {
            let n_k: f64 = (0..n).map(|i| responsibilities.get(i, k)).sum();
            components[k].weight = n_k / n as f64;
            if n_k < RESP_EPS {
                continue;
            }
            let (mean, spatial, topic) =
                weighted_moments(points, |i| responsibilities.get(i, k), n_k);
            components[k] = floored_component(n_k / n as f64, mean, spatial, topic);
        }
    }

    let assignments: Vec<usize> = (0..n)
        .map(|i| {
            let row = responsibilities.row(i);
            let mut best = 0;
            for k in 1..c {
                if row[k] > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect();

    Ok(GmmResult {
        components,
        responsibilities,
        log_likelihood_trace: trace,
        assignments,
        iterations_run: iterations,
    })
}
