//! `geotopics cluster`: scaled embedding, K-means and/or GMM, labels,
//! GeoJSON + SVG per method.

use std::fs;
use std::path::Path;
use std::time::Instant;

use serde_json::json;

use geotopics::clustering::{gap_statistic, gmm_em, kmeans};
use geotopics::clustering::{DEFAULT_GMM_MAX_ITERS, DEFAULT_GMM_TOL, DEFAULT_KMEANS_MAX_ITERS};
use geotopics::features::{read_features_csv, FeatureVector};
use geotopics::labeling::{label_clusters, ClusterLabel, TopicLabelTable};
use geotopics::topicmodel::MODEL_BIN;
use geotopics::{Error, Matrix, Result};

use crate::artifacts::{
    read_city, read_restaurants, write_text, CITY_FILE, FEATURES_FILE, GAP_REPORT_FILE,
    RESTAURANTS_FILE,
};
use crate::config::{require, ClustersChoice, PipelineConfig};
use crate::manifest::RunManifest;
use crate::render::{cluster_map_svg, clusters_geojson};

pub fn run(cfg: &PipelineConfig, config_file: Option<&Path>) -> Result<()> {
    let model_dir = require(&cfg.model, "model")?;
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| model_dir.join("cluster"));

    let mut manifest = RunManifest::new("cluster", cfg.snapshot());
    manifest.add_input(&model_dir.join(FEATURES_FILE))?;
    manifest.add_input(&model_dir.join(CITY_FILE))?;
    if let Some(p) = &cfg.labels {
        manifest.add_input(p)?;
    }
    if let Some(p) = config_file {
        manifest.add_input(p)?;
    }
    // The model binary is not re-read here, but its digest ties the cluster
    // run to the exact training artifact.
    if model_dir.join(MODEL_BIN).is_file() {
        manifest.add_input(&model_dir.join(MODEL_BIN))?;
    }

    let features = read_features_csv(&model_dir.join(FEATURES_FILE), cfg.scale)?;
    if features.is_empty() {
        return Err(Error::EmptyResult("feature file has no rows".into()));
    }
    let city = read_city(&model_dir.join(CITY_FILE))?;
    let records = read_restaurants(&model_dir.join(RESTAURANTS_FILE))?;
    let num_topics = features[0].topics.len();

    let points = Matrix::from_rows(features.iter().map(FeatureVector::embedding).collect());

    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;

    let num_clusters = match cfg.clusters {
        ClustersChoice::Fixed(c) => c,
        ClustersChoice::Auto => {
            let (lo, hi) = cfg
                .range
                .ok_or_else(|| Error::InvalidArgument("--clusters auto requires --range lo:hi".into()))?;
            let candidates: Vec<usize> = (lo..=hi).collect();
            let t_gap = Instant::now();
            let report = gap_statistic(&points, &candidates, cfg.refs, cfg.seed)?;
            manifest.timing("gap", t_gap);
            write_text(&out.join(GAP_REPORT_FILE), &report.to_csv())?;
            manifest.add_artifact(GAP_REPORT_FILE);
            manifest.note("optimal_c", report.optimal_c);
            if let Some(se) = report.optimal_c_se {
                manifest.note("optimal_c_se", se);
            }
            println!("gap statistic selected C={}", report.optimal_c);
            report.optimal_c
        }
    };

    let table = match &cfg.labels {
        Some(p) => TopicLabelTable::load(p)?,
        None => TopicLabelTable::for_topics(num_topics),
    };
    if table.len() != num_topics {
        return Err(Error::InvalidArgument(format!(
            "label table has {} labels but the model has {num_topics} topics",
            table.len()
        )));
    }

    if cfg.method.runs_kmeans() {
        let t = Instant::now();
        let result = kmeans(&points, num_clusters, DEFAULT_KMEANS_MAX_ITERS, cfg.seed)?;
        manifest.timing("kmeans", t);
        let labels = label_clusters(&features, &result.assignments, num_clusters, None, &table)?;
        let result_json = json!({
            "method": "kmeans",
            "clusters": num_clusters,
            "seed": cfg.seed,
            "scale": cfg.scale,
            "iterations_run": result.iterations_run,
            "inertia": result.inertia,
            "inertia_trace": result.inertia_trace,
            "assignments": assignment_map(&features, &result.assignments),
            "centroids": result.centroids.iter_rows().collect::<Vec<_>>(),
        });
        write_method_artifacts(
            &out,
            "kmeans",
            &features,
            &result.assignments,
            &labels,
            &records,
            city.origin(),
            &result_json,
            &mut manifest,
        )?;
        println!(
            "kmeans: C={num_clusters}, inertia {:.6} after {} iterations",
            result.inertia, result.iterations_run
        );
    }

    if cfg.method.runs_gmm() {
        let t = Instant::now();
        let result = gmm_em(
            &points,
            num_clusters,
            DEFAULT_GMM_MAX_ITERS,
            DEFAULT_GMM_TOL,
            cfg.seed,
        )?;
        manifest.timing("gmm", t);
        let labels = label_clusters(
            &features,
            &result.assignments,
            num_clusters,
            Some(&result.components),
            &table,
        )?;
        let log_likelihood = result.log_likelihood_trace.last().copied().unwrap_or(f64::NAN);
        let result_json = json!({
            "method": "gmm",
            "clusters": num_clusters,
            "seed": cfg.seed,
            "scale": cfg.scale,
            "iterations_run": result.iterations_run,
            "log_likelihood": log_likelihood,
            "log_likelihood_trace": result.log_likelihood_trace,
            "assignments": assignment_map(&features, &result.assignments),
            "components": result.components,
        });
        write_method_artifacts(
            &out,
            "gmm",
            &features,
            &result.assignments,
            &labels,
            &records,
            city.origin(),
            &result_json,
            &mut manifest,
        )?;
        println!(
            "gmm: C={num_clusters}, log-likelihood {log_likelihood:.6} after {} iterations",
            result.iterations_run
        );
    }

    manifest.note("restaurants", features.len());
    manifest.note("embedding_dims", 2 + num_topics);
    manifest.write(&out)?;
    Ok(())
}

fn assignment_map(
    features: &[FeatureVector],
    assignments: &[usize],
) -> std::collections::BTreeMap<String, usize> {
    features
        .iter()
        .zip(assignments)
        .map(|(f, &c)| (f.restaurant_id.clone(), c))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn write_method_artifacts(
    out: &Path,
    method: &str,
    features: &[FeatureVector],
    assignments: &[usize],
    labels: &[ClusterLabel],
    records: &std::collections::BTreeMap<String, crate::artifacts::RestaurantRecord>,
    origin: (f64, f64),
    result_json: &serde_json::Value,
    manifest: &mut RunManifest,
) -> Result<()> {
    let geojson_name = format!("{method}_clusters.geojson");
    let svg_name = format!("{method}_map.svg");
    let json_name = format!("{method}_result.json");

    let geojson = clusters_geojson(features, assignments, labels, records, origin, method);
    write_text(&out.join(&geojson_name), &geojson)?;

    let svg = cluster_map_svg(features, assignments, labels);
    write_text(&out.join(&svg_name), &svg)?;

    let body = serde_json::to_string_pretty(result_json)
        .map_err(|e| Error::Malformed(format!("{method} result: {e}")))?;
    write_text(&out.join(&json_name), &(body + "\n"))?;

    manifest.add_artifact(&geojson_name);
    manifest.add_artifact(&svg_name);
    manifest.add_artifact(&json_name);
    Ok(())
}
