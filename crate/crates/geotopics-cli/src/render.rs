//! GeoJSON and SVG export for cluster runs.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::json;

use geotopics::features::{unproject, FeatureVector};
use geotopics::labeling::{labels_to_geojson, ClusterLabel};

use crate::artifacts::RestaurantRecord;

/// Distinguishable fills for cluster ids; reused cyclically past 16.
pub const PALETTE: [&str; 16] = [
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4",
    "#46f0f0", "#f032e6", "#bcf60c", "#fabebe", "#008080", "#e6beff",
    "#9a6324", "#fffac8", "#800000", "#aaffc3",
];

pub fn cluster_color(cluster: usize) -> &'static str {
    PALETTE[cluster % PALETTE.len()]
}

/// One FeatureCollection holding every restaurant point (original lat/lon,
/// cluster id in properties) followed by one label anchor per non-empty
/// cluster. Projected miles appear only in properties.
pub fn clusters_geojson(
    features: &[FeatureVector],
    assignments: &[usize],
    labels: &[ClusterLabel],
    records: &BTreeMap<String, RestaurantRecord>,
    origin: (f64, f64),
    method: &str,
) -> String {
    let mut feats = Vec::with_capacity(features.len() + labels.len());
    for (f, &cluster) in features.iter().zip(assignments) {
        let (lat, lon, name) = match records.get(&f.restaurant_id) {
            Some(r) => (r.latitude, r.longitude, r.name.clone()),
            None => {
                let (lat, lon) = unproject(f.position, origin);
                (lat, lon, String::new())
            }
        };
        feats.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {
                "kind": "restaurant",
                "business_id": f.restaurant_id,
                "name": name,
                "cluster": cluster,
                "x_miles": f.position.x,
                "y_miles": f.position.y,
            },
        }));
    }

    let label_collection: serde_json::Value =
        serde_json::from_str(&labels_to_geojson(labels, origin))
            .expect("label geojson is valid json");
    if let Some(arr) = label_collection.get("features").and_then(|v| v.as_array()) {
        for feat in arr {
            let mut feat = feat.clone();
            if let Some(props) = feat.get_mut("properties").and_then(|p| p.as_object_mut()) {
                props.insert("kind".to_string(), json!("label"));
            }
            feats.push(feat);
        }
    }

    let collection = json!({
        "type": "FeatureCollection",
        "method": method,
        "features": feats,
    });
    let mut body = serde_json::to_string_pretty(&collection).expect("geojson serializes");
    body.push('\n');
    body
}

/// City map in projected mile coordinates: one dot per restaurant colored
/// by cluster, one rotated text label per cluster anchor. All numeric
/// output is fixed at six decimal places.
pub fn cluster_map_svg(
    features: &[FeatureVector],
    assignments: &[usize],
    labels: &[ClusterLabel],
) -> String {
    let xs = features.iter().map(|f| f.position.x);
    let ys = features.iter().map(|f| f.position.y);
    let min_x = xs.clone().fold(f64::INFINITY, f64::min);
    let max_x = xs.fold(f64::NEG_INFINITY, f64::max);
    let min_y = ys.clone().fold(f64::INFINITY, f64::min);
    let max_y = ys.fold(f64::NEG_INFINITY, f64::max);

    let pad = (0.1 * (max_x - min_x).max(max_y - min_y)).max(0.5);
    let (min_x, max_x) = (min_x - pad, max_x + pad);
    let (min_y, max_y) = (min_y - pad, max_y + pad);

    let width = 800.0;
    let scale = width / (max_x - min_x);
    let height = (max_y - min_y) * scale;
    let px = |x: f64| (x - min_x) * scale;
    let py = |y: f64| (max_y - y) * scale;

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.6} {height:.6}\" width=\"{width:.6}\" height=\"{height:.6}\">"
    );
    let _ = writeln!(
        svg,
        "<rect x=\"0\" y=\"0\" width=\"{width:.6}\" height=\"{height:.6}\" fill=\"#ffffff\"/>"
    );

    for (f, &cluster) in features.iter().zip(assignments) {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.8\"/>",
            px(f.position.x),
            py(f.position.y),
            cluster_color(cluster),
        );
    }

    // SVG rotation is clockwise in screen coordinates; the y-flip means a
    // counter-clockwise map angle renders as rotate(-angle).
    for label in labels {
        let x = px(label.anchor.x);
        let y = py(label.anchor.y);
        let _ = writeln!(
            svg,
            "<circle cx=\"{x:.6}\" cy=\"{y:.6}\" r=\"2\" fill=\"#111111\"/>"
        );
        let _ = writeln!(
            svg,
            "<text x=\"{x:.6}\" y=\"{y:.6}\" transform=\"rotate({:.6} {x:.6} {y:.6})\" \
             font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111111\">{}</text>",
            -label.angle_degrees,
            xml_escape(&label.label_text),
        );
    }

    svg.push_str("</svg>\n");
    svg
}

pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(ch),
        }
    }
    out
}
