//! `geotopics heatmap`: score a query distribution against every grid cell
//! of the city and render CSV + SVG.

use std::fs;
use std::path::Path;
use std::time::Instant;

use geotopics::corpus::{default_stopwords, load_stopwords, to_bow, BowDocument};
use geotopics::features::ProjectedPoint;
use geotopics::heatmap::{build_heatmap, to_csv, to_svg, Grid, NovelQuery, RestaurantTopics};
use geotopics::topicmodel::{TopicDistribution, TopicModel};
use geotopics::{Error, Result};

use crate::artifacts::{
    read_city, write_text, CITY_FILE, FEATURES_FILE, HEATMAP_CSV_FILE, HEATMAP_SVG_FILE,
};
use crate::config::{require, PipelineConfig};
use crate::manifest::RunManifest;

pub fn run(cfg: &PipelineConfig, config_file: Option<&Path>) -> Result<()> {
    let model_dir = require(&cfg.model, "model")?;
    let target = require(&cfg.target, "target")?;
    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| model_dir.join("heatmap"));

    let mut manifest = RunManifest::new("heatmap", cfg.snapshot());
    manifest.add_input(&model_dir.join(FEATURES_FILE))?;
    manifest.add_input(&model_dir.join(CITY_FILE))?;
    if let Some(p) = config_file {
        manifest.add_input(p)?;
    }

    // Heatmap similarity runs on the normalized simplexes themselves; the
    // clustering scale never enters.
    let features = geotopics::features::read_features_csv(&model_dir.join(FEATURES_FILE), 1.0)?;
    if features.is_empty() {
        return Err(Error::EmptyResult("feature file has no rows".into()));
    }
    let city = read_city(&model_dir.join(CITY_FILE))?;

    let (novel_topics, exclude_id, marker) = resolve_target(
        target,
        &features,
        &city.column_sums,
        model_dir,
        cfg,
        &mut manifest,
    )?;

    let positions: Vec<ProjectedPoint> = features.iter().map(|f| f.position).collect();
    let grid = Grid::fit(&positions, cfg.grid)?;

    let restaurants: Vec<RestaurantTopics> = features
        .iter()
        .map(|f| RestaurantTopics {
            id: f.restaurant_id.clone(),
            position: f.position,
            topics: f.topics.clone(),
        })
        .collect();
    let query = NovelQuery {
        topics: TopicDistribution {
            weights: novel_topics,
        },
        exclude_id: exclude_id.clone(),
    };

    let t_build = Instant::now();
    let map = build_heatmap(&grid, &query, &restaurants)?;
    manifest.timing("build", t_build);

    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    write_text(&out.join(HEATMAP_CSV_FILE), &to_csv(&map))?;
    write_text(&out.join(HEATMAP_SVG_FILE), &to_svg(&map, marker))?;
    manifest.add_artifact(HEATMAP_CSV_FILE);
    manifest.add_artifact(HEATMAP_SVG_FILE);

    manifest.note("grid_rows", map.grid.rows);
    manifest.note("grid_cols", map.grid.n);
    manifest.note("min_sim", map.min_sim);
    manifest.note("max_sim", map.max_sim);
    if let Some(id) = &exclude_id {
        manifest.note("excluded_restaurant", id);
    }
    manifest.write(&out)?;

    println!(
        "heatmap {}x{} cells, similarity range [{:.6}, {:.6}] -> {}",
        map.grid.rows,
        map.grid.n,
        map.min_sim,
        map.max_sim,
        out.display()
    );
    Ok(())
}

/// A target is either a restaurant id from the model or a path to a file
/// of review text. Ids win; a stray file that happens to share a
/// restaurant's name cannot shadow it.
#[allow(clippy::type_complexity)]
fn resolve_target(
    target: &str,
    features: &[geotopics::features::FeatureVector],
    column_sums: &[f64],
    model_dir: &Path,
    cfg: &PipelineConfig,
    manifest: &mut RunManifest,
) -> Result<(Vec<f64>, Option<String>, Option<ProjectedPoint>)> {
    if let Some(fv) = features.iter().find(|f| f.restaurant_id == target) {
        return Ok((
            fv.topics.clone(),
            Some(target.to_string()),
            Some(fv.position),
        ));
    }

    let path = Path::new(target);
    if !path.is_file() {
        return Err(Error::InvalidArgument(format!(
            "target '{target}' is neither a restaurant id in the model nor a readable file"
        )));
    }

    manifest.add_input(path)?;
    let model = TopicModel::load(model_dir)?;
    let stopwords = match &cfg.stopwords {
        Some(p) => load_stopwords(p)?,
        None => default_stopwords(),
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let tokens = geotopics::corpus::clean_text(&text, &stopwords);
    let counts = to_bow(&tokens, model.vocab());
    if counts.is_empty() {
        return Err(Error::EmptyResult(format!(
            "review file {} contains no in-vocabulary tokens",
            path.display()
        )));
    }
    let theta = model
        .infer(&BowDocument {
            restaurant_id: "novel-query".to_string(),
            counts,
        })
        .weights;

    // Project the raw distribution into the background-flattened space the
    // stored features live in: divide by the recorded column sums, then
    // renormalize the row.
    if theta.len() != column_sums.len() {
        return Err(Error::Malformed(format!(
            "model has {} topics but the city record has {} column sums",
            theta.len(),
            column_sums.len()
        )));
    }
    let mut scaled: Vec<f64> = theta
        .iter()
        .zip(column_sums)
        .map(|(&w, &s)| if s > 0.0 { w / s } else { 0.0 })
        .collect();
    let total: f64 = scaled.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::Numerical(
            "query distribution has no overlap with the corpus topics".into(),
        ));
    }
    for w in &mut scaled {
        *w /= total;
    }
    Ok((scaled, None, None))
}
