//! `geotopics gap`: sweep cluster counts over the scaled embedding and
//! report the gap statistic per candidate.

use std::fs;
use std::path::Path;
use std::time::Instant;

use geotopics::clustering::gap_statistic;
use geotopics::features::{read_features_csv, FeatureVector};
use geotopics::{Error, Matrix, Result};

use crate::artifacts::{write_text, FEATURES_FILE, GAP_REPORT_FILE};
use crate::config::{require, PipelineConfig};
use crate::manifest::RunManifest;

pub fn run(cfg: &PipelineConfig, config_file: Option<&Path>) -> Result<()> {
    let model_dir = require(&cfg.model, "model")?;
    let (lo, hi) = cfg
        .range
        .ok_or_else(|| Error::InvalidArgument("gap requires --range lo:hi".into()))?;
    let out = cfg.out.clone().unwrap_or_else(|| model_dir.join("gap"));

    let mut manifest = RunManifest::new("gap", cfg.snapshot());
    manifest.add_input(&model_dir.join(FEATURES_FILE))?;
    if let Some(p) = config_file {
        manifest.add_input(p)?;
    }

    let features = read_features_csv(&model_dir.join(FEATURES_FILE), cfg.scale)?;
    if features.is_empty() {
        return Err(Error::EmptyResult("feature file has no rows".into()));
    }
    let points = Matrix::from_rows(features.iter().map(FeatureVector::embedding).collect());

    let candidates: Vec<usize> = (lo..=hi).collect();
    let t_gap = Instant::now();
    let report = gap_statistic(&points, &candidates, cfg.refs, cfg.seed)?;
    manifest.timing("gap", t_gap);

    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    write_text(&out.join(GAP_REPORT_FILE), &report.to_csv())?;
    manifest.add_artifact(GAP_REPORT_FILE);
    manifest.note("optimal_c", report.optimal_c);
    if let Some(se) = report.optimal_c_se {
        manifest.note("optimal_c_se", se);
    }
    manifest.note("restaurants", features.len());
    manifest.write(&out)?;

    println!("optimal C by greatest gap: {}", report.optimal_c);
    match report.optimal_c_se {
        Some(se) => println!("optimal C by the 1-SE rule: {se}"),
        None => println!("the 1-SE rule selected no C in this range"),
    }
    Ok(())
}
