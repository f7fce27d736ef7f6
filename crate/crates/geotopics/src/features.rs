//! The clustering embedding: local-miles projection, topic-weight
//! normalization, and the scale factor S that balances topical against
//! spatial distance.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Business;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Miles per degree of latitude (and of longitude at the equator).
pub const MILES_PER_DEGREE: f64 = 69.172;

/// Position in miles east/north of a city origin. Sane values for a single
/// city stay well inside |x|, |y| < 500.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub x: f64,
    pub y: f64,
}

/// Equirectangular projection centered on `origin` (latitude, longitude):
/// x = (lon - lon0) * cos(lat0) * 69.172, y = (lat - lat0) * 69.172.
/// At city scale the distortion against great-circle distance is < 0.1%.
pub fn project(lat: f64, lon: f64, origin: (f64, f64)) -> ProjectedPoint {
    let (lat0, lon0) = origin;
    ProjectedPoint {
        x: (lon - lon0) * lat0.to_radians().cos() * MILES_PER_DEGREE,
        y: (lat - lat0) * MILES_PER_DEGREE,
    }
}

/// Inverse of [`project`] for the same origin.
pub fn unproject(point: ProjectedPoint, origin: (f64, f64)) -> (f64, f64) {
    let (lat0, lon0) = origin;
    let lat = point.y / MILES_PER_DEGREE + lat0;
    let lon = point.x / (lat0.to_radians().cos() * MILES_PER_DEGREE) + lon0;
    (lat, lon)
}

/// Projection origin for a set of restaurants: their coordinate centroid.
pub fn city_origin(businesses: &[Business]) -> (f64, f64) {
    let n = businesses.len() as f64;
    let lat = businesses.iter().map(|b| b.latitude).sum::<f64>() / n;
    let lon = businesses.iter().map(|b| b.longitude).sum::<f64>() / n;
    (lat, lon)
}

/// Per-topic absolute weight differences between two restaurants, used to
/// derive the minimum scale at which topics can outweigh distance.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicProfile {
    pub deltas: Vec<f64>,
}

impl TopicProfile {
    /// Two restaurants with fully disjoint single-topic weights.
    pub fn all_or_none() -> Self {
        TopicProfile {
            deltas: vec![1.0, 1.0],
        }
    }

    /// One dominating topic (weight at least 0.5) on each side plus ten
    /// differing sub-topics of 0.1 each.
    pub fn dominant_with_subtopics() -> Self {
        let mut deltas = vec![0.5, 0.5];
        deltas.extend(std::iter::repeat(0.1).take(10));
        TopicProfile { deltas }
    }
}

/// The scale S at which a topic-twin at `d_far` miles becomes as close, in
/// the embedded space, as a topically-disjoint neighbor at `d_near` miles:
/// S = sqrt((d_far^2 - d_near^2) / sum(deltas^2)). Above this S the
/// clustering prefers the topical match.
pub fn compute_min_scale(d_near: f64, d_far: f64, profile: &TopicProfile) -> Result<f64> {
    if !(d_near >= 0.0) || !d_far.is_finite() || d_far < d_near {
        return Err(Error::InvalidArgument(format!(
            "need 0 <= d_near <= d_far, got d_near={d_near} d_far={d_far}"
        )));
    }
    if profile.deltas.iter().any(|&d| d < 0.0) {
        return Err(Error::InvalidArgument(
            "topic profile deltas must be non-negative".into(),
        ));
    }
    let delta_sq: f64 = profile.deltas.iter().map(|d| d * d).sum();
    if delta_sq == 0.0 {
        return Err(Error::InvalidArgument(
            "zero topic difference: scale threshold would divide by zero".into(),
        ));
    }
    Ok(((d_far * d_far - d_near * d_near) / delta_sq).sqrt())
}

/// One restaurant's clustering embedding: projected position plus its
/// normalized topic weights (stored unscaled) and the scale S to apply.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub restaurant_id: String,
    pub position: ProjectedPoint,
    pub topics: Vec<f64>,
    pub scale: f64,
}

impl FeatureVector {
    /// The (K+2)-dimensional point: [x, y, S*t_0, ..., S*t_{K-1}].
    pub fn embedding(&self) -> Vec<f64> {
        build_vector(self.position, &self.topics, self.scale)
            .expect("stored scale already validated")
    }
}

/// Concatenates position with S-scaled topic weights. S = 0 is allowed and
/// collapses the embedding to pure location.
pub fn build_vector(position: ProjectedPoint, topics: &[f64], scale: f64) -> Result<Vec<f64>> {
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scale must be a non-negative finite number, got {scale}"
        )));
    }
    let mut v = Vec::with_capacity(topics.len() + 2);
    v.push(position.x);
    v.push(position.y);
    v.extend(topics.iter().map(|&t| scale * t));
    Ok(v)
}

/// Step one of the weight normalization: divide each column by its sum so
/// every topic distributes one unit of mass across restaurants. All-zero
/// columns stay zero.
pub fn column_normalize(m: &Matrix) -> Matrix {
    let (n, k) = (m.rows(), m.cols());
    let mut col_sums = vec![0.0; k];
    for row in m.iter_rows() {
        for (s, &v) in col_sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    let mut out = Matrix::zeros(n, k);
    for r in 0..n {
        let src = m.row(r);
        let dst = out.row_mut(r);
        for c in 0..k {
            dst[c] = if col_sums[c] > 0.0 { src[c] / col_sums[c] } else { 0.0 };
        }
    }
    out
}

/// Column-then-row normalized topic weights. Rows that were entirely zero
/// cannot be rescaled and are reported in `zero_rows`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTopics {
    pub matrix: Matrix,
    pub zero_rows: Vec<usize>,
}

/// Normalizes topic weights down columns (flattening topics that are
/// uniformly present everywhere) and then rescales each row back to a unit
/// sum.
pub fn vertical_normalize(m: &Matrix) -> NormalizedTopics {
    let mut out = column_normalize(m);
    let mut zero_rows = Vec::new();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            for v in row {
                *v /= total;
            }
        } else {
            zero_rows.push(r);
        }
    }
    NormalizedTopics {
        matrix: out,
        zero_rows,
    }
}

/// Writes features as CSV with header `id,x,y,t0..t{K-1}`. Topic weights are
/// stored unscaled; the scale is applied when reading.
pub fn write_features_csv(path: &Path, features: &[FeatureVector]) -> Result<()> {
    let k = features.first().map_or(0, |f| f.topics.len());
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);

    let mut header = String::from("id,x,y");
    for t in 0..k {
        header.push_str(&format!(",t{t}"));
    }
    writeln!(w, "{header}").map_err(io_err)?;
    for f in features {
        write!(w, "{},{},{}", f.restaurant_id, f.position.x, f.position.y).map_err(io_err)?;
        for t in &f.topics {
            write!(w, ",{t}").map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Reads a CSV written by [`write_features_csv`], applying `scale` to every
/// vector.
pub fn read_features_csv(path: &Path, scale: f64) -> Result<Vec<FeatureVector>> {
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "scale must be a non-negative finite number, got {scale}"
        )));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed(format!("{}: empty feature file", path.display())))?
        .map_err(|e| Error::io(path, e))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "id" || cols[1] != "x" || cols[2] != "y" {
        return Err(Error::Malformed(format!(
            "{}: expected header id,x,y,t0.., got {header:?}",
            path.display()
        )));
    }
    for (i, c) in cols[3..].iter().enumerate() {
        if *c != format!("t{i}") {
            return Err(Error::Malformed(format!(
                "{}: unexpected topic column {c:?} at position {i}",
                path.display()
            )));
        }
    }
    let k = cols.len() - 3;

    let mut features = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != k + 3 {
            return Err(Error::Malformed(format!(
                "{}: line {} has {} fields, expected {}",
                path.display(),
                lineno + 2,
                fields.len(),
                k + 3
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| {
                Error::Malformed(format!(
                    "{}: line {} has non-numeric field {s:?}",
                    path.display(),
                    lineno + 2
                ))
            })
        };
        let x = parse(fields[1])?;
        let y = parse(fields[2])?;
        let topics = fields[3..].iter().map(|s| parse(s)).collect::<Result<Vec<f64>>>()?;
        features.push(FeatureVector {
            restaurant_id: fields[0].to_string(),
            position: ProjectedPoint { x, y },
            topics,
            scale,
        });
    }
    Ok(features)
}
