//! Cluster labeling: mean topic vectors, top-2 label text, spatial anchors,
//! and label orientation along the dominant axis of a Gaussian component.

use serde::{Deserialize, Serialize};

use crate::clustering::GaussianComponent;
use crate::error::{Error, Result};
use crate::features::{unproject, FeatureVector, ProjectedPoint};

/// Labels for the bundled 50-topic model, one line per `topic_id,label`.
const BUILTIN_LABELS_CSV: &str = include_str!("../data/topic_labels.csv");

/// Eigenvalue gap below which a covariance is treated as isotropic.
const ISOTROPY_GAP: f64 = 1e-9;

/// Maps every topic id in [0, K) to a non-empty human-readable label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicLabelTable {
    labels: Vec<String>,
}

impl TopicLabelTable {
    /// The hand-assigned labels shipped with the default 50-topic model.
    pub fn builtin() -> TopicLabelTable {
        Self::from_csv_str(BUILTIN_LABELS_CSV).expect("bundled label table parses")
    }

    /// Neutral "topic-N" labels for a model whose topics have no curated
    /// names.
    pub fn fallback(num_topics: usize) -> TopicLabelTable {
        TopicLabelTable {
            labels: (0..num_topics).map(|t| format!("topic-{t}")).collect(),
        }
    }

    /// Builtin table when the topic count matches it, neutral fallback
    /// otherwise.
    pub fn for_topics(num_topics: usize) -> TopicLabelTable {
        let builtin = Self::builtin();
        if builtin.len() == num_topics {
            builtin
        } else {
            Self::fallback(num_topics)
        }
    }

    /// Parses `topic_id,label` lines (header required). Ids must form the
    /// contiguous range 0..K with no duplicates and no empty labels.
    pub fn from_csv_str(text: &str) -> Result<TopicLabelTable> {
        let mut lines = text.lines();
        match lines.next().map(str::trim) {
            Some("topic_id,label") => {}
            other => {
                return Err(Error::Malformed(format!(
                    "label table must start with 'topic_id,label', got {other:?}"
                )))
            }
        }
        let mut entries: Vec<(usize, String)> = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (id, label) = line.split_once(',').ok_or_else(|| {
                Error::Malformed(format!("label table line {}: missing comma", lineno + 2))
            })?;
            let id: usize = id.trim().parse().map_err(|_| {
                Error::Malformed(format!("label table line {}: bad topic id", lineno + 2))
            })?;
            let label = label.trim();
            if label.is_empty() {
                return Err(Error::Malformed(format!(
                    "label table line {}: empty label",
                    lineno + 2
                )));
            }
            entries.push((id, label.to_string()));
        }
        entries.sort_by_key(|&(id, _)| id);
        for (expect, &(id, _)) in entries.iter().enumerate() {
            if id != expect {
                return Err(Error::Malformed(format!(
                    "label table must cover topics 0..K contiguously; missing or duplicate id near {id}"
                )));
            }
        }
        if entries.is_empty() {
            return Err(Error::Malformed("label table has no entries".to_string()));
        }
        Ok(TopicLabelTable {
            labels: entries.into_iter().map(|(_, l)| l).collect(),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<TopicLabelTable> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv_str(&text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("topic_id,label\n");
        for (id, label) in self.labels.iter().enumerate() {
            out.push_str(&format!("{id},{label}\n"));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, topic_id: usize) -> Result<&str> {
        self.labels.get(topic_id).map(String::as_str).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "topic {topic_id} outside label table of {} entries",
                self.labels.len()
            ))
        })
    }
}

/// Top-2 topic selection over a mean topic vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Top2 {
    pub primary_topic: usize,
    pub secondary_topic: usize,
    pub primary_weight: f64,
    pub secondary_weight: f64,
    /// "Primary/Secondary" using the table's labels.
    pub label_text: String,
    /// Set when the secondary weight is zero (degenerate one-hot mean).
    pub low_confidence: bool,
}

/// Dominant spatial axis of a Gaussian component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    /// Major-axis angle in degrees, folded into (-90, 90].
    pub angle_degrees: f64,
    /// Set when the eigenvalue gap is below the isotropy threshold; the
    /// angle is then reported as 0.
    pub isotropic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterLabel {
    pub cluster_id: usize,
    pub member_count: usize,
    pub primary_topic: usize,
    pub secondary_topic: usize,
    pub primary_weight: f64,
    pub secondary_weight: f64,
    pub label_text: String,
    /// Spatial mean of the member positions, projected miles.
    pub anchor: ProjectedPoint,
    pub angle_degrees: f64,
    pub low_confidence: bool,
    pub isotropic: bool,
}

/// Unweighted arithmetic mean of the members' topic vectors.
pub fn mean_topic_vector(members: &[&FeatureVector]) -> Result<Vec<f64>> {
    let first = members.first().ok_or_else(|| {
        Error::InvalidArgument("cannot average an empty cluster".to_string())
    })?;
    let k = first.topics.len();
    let mut mean = vec![0.0; k];
    for m in members {
        if m.topics.len() != k {
            return Err(Error::InvalidArgument(format!(
                "member '{}' has {} topics, expected {k}",
                m.restaurant_id,
                m.topics.len()
            )));
        }
        for (acc, &t) in mean.iter_mut().zip(&m.topics) {
            *acc += t;
        }
    }
    for acc in &mut mean {
        *acc /= members.len() as f64;
    }
    Ok(mean)
}

/// The two largest entries of `mean`, ties broken by topic id ascending,
/// joined into "Label1/Label2".
pub fn top2(mean: &[f64], table: &TopicLabelTable) -> Result<Top2> {
    if mean.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "top-2 selection needs at least 2 topics, got {}",
            mean.len()
        )));
    }
    if table.len() != mean.len() {
        return Err(Error::InvalidArgument(format!(
            "label table covers {} topics but the mean vector has {}",
            table.len(),
            mean.len()
        )));
    }
    let mut primary = 0;
    for (t, &w) in mean.iter().enumerate().skip(1) {
        if w > mean[primary] {
            primary = t;
        }
    }
    let mut secondary = if primary == 0 { 1 } else { 0 };
    for (t, &w) in mean.iter().enumerate() {
        if t != primary && w > mean[secondary] {
            secondary = t;
        }
    }
    Ok(Top2 {
        primary_topic: primary,
        secondary_topic: secondary,
        primary_weight: mean[primary],
        secondary_weight: mean[secondary],
        label_text: format!("{}/{}", table.label(primary)?, table.label(secondary)?),
        low_confidence: mean[secondary] <= 0.0,
    })
}

/// Angle of the eigenvector belonging to the largest eigenvalue of the
/// spatial covariance, folded into (-90, 90].
pub fn orientation(component: &GaussianComponent) -> Result<Orientation> {
    let [[a, b], [b2, c]] = component.spatial_cov;
    let half_tr = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let (l1, l2) = (half_tr + disc, half_tr - disc);
    if !l1.is_finite() || !(l2 > 0.0) || (b - b2).abs() > 1e-12 * b.abs().max(1.0) {
        return Err(Error::Numerical(format!(
            "spatial covariance is not symmetric positive definite (eigenvalues {l1}, {l2})"
        )));
    }
    if l1 - l2 < ISOTROPY_GAP {
        return Ok(Orientation {
            angle_degrees: 0.0,
            isotropic: true,
        });
    }
    // 2x2 symmetric eigenvector angle in closed form; atan2 lands in
    // (-pi, pi], so the half-angle is already in (-90, 90]
    let angle = 0.5 * (2.0 * b).atan2(a - c).to_degrees();
    Ok(Orientation {
        angle_degrees: angle,
        isotropic: false,
    })
}

/// One label per non-empty cluster. K-means carries no covariance, so its
/// labels sit at angle 0; GMM labels align with each component's dominant
/// axis. The anchor is the spatial mean of the member positions.
pub fn label_clusters(
    vectors: &[FeatureVector],
    assignments: &[usize],
    num_clusters: usize,
    components: Option<&[GaussianComponent]>,
    table: &TopicLabelTable,
) -> Result<Vec<ClusterLabel>> {
    if vectors.len() != assignments.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature vectors but {} assignments",
            vectors.len(),
            assignments.len()
        )));
    }
    if let Some(comps) = components {
        if comps.len() != num_clusters {
            return Err(Error::InvalidArgument(format!(
                "{} mixture components for {num_clusters} clusters",
                comps.len()
            )));
        }
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= num_clusters) {
        return Err(Error::InvalidArgument(format!(
            "assignment {bad} outside 0..{num_clusters}"
        )));
    }

    let mut labels = Vec::new();
    for cluster in 0..num_clusters {
        let members: Vec<&FeatureVector> = vectors
            .iter()
            .zip(assignments)
            .filter(|&(_, &a)| a == cluster)
            .map(|(v, _)| v)
            .collect();
        if members.is_empty() {
            continue;
        }
        let mean = mean_topic_vector(&members)?;
        let top = top2(&mean, table)?;
        let n = members.len() as f64;
        let anchor = ProjectedPoint {
            x: members.iter().map(|m| m.position.x).sum::<f64>() / n,
            y: members.iter().map(|m| m.position.y).sum::<f64>() / n,
        };
        if !anchor.x.is_finite() || !anchor.y.is_finite() {
            return Err(Error::Numerical(format!(
                "cluster {cluster} anchor is not finite"
            )));
        }
        let axis = match components {
            Some(comps) => orientation(&comps[cluster])?,
            None => Orientation {
                angle_degrees: 0.0,
                isotropic: false,
            },
        };
        labels.push(ClusterLabel {
            cluster_id: cluster,
            member_count: members.len(),
            primary_topic: top.primary_topic,
            secondary_topic: top.secondary_topic,
            primary_weight: top.primary_weight,
            secondary_weight: top.secondary_weight,
            label_text: top.label_text,
            anchor,
            angle_degrees: axis.angle_degrees,
            low_confidence: top.low_confidence,
            isotropic: axis.isotropic,
        });
    }
    Ok(labels)
}

/// GeoJSON FeatureCollection of label anchors, unprojected back to
/// longitude/latitude around the given city origin.
pub fn labels_to_geojson(labels: &[ClusterLabel], origin: (f64, f64)) -> String {
    let features: Vec<serde_json::Value> = labels
        .iter()
        .map(|l| {
            let (lat, lon) = unproject(l.anchor, origin);
            serde_json::json!({
                "type": "Feature",
                "geometry": { "type": "Point", "coordinates": [lon, lat] },
                "properties": {
                    "cluster_id": l.cluster_id,
                    "label_text": l.label_text,
                    "angle_degrees": l.angle_degrees,
                    "member_count": l.member_count,
                    "primary_topic": l.primary_topic,
                    "primary_weight": l.primary_weight,
                    "secondary_topic": l.secondary_topic,
                    "secondary_weight": l.secondary_weight,
                    "low_confidence": l.low_confidence,
                    "isotropic": l.isotropic,
                }
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({
        "type": "FeatureCollection",
        "features": features,
    }))
    .expect("geojson serializes")
}
