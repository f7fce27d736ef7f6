//! `geotopics train`: corpus build, LDA training, per-restaurant inference,
//! and the model directory every other subcommand reads.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use geotopics::corpus::{
    build_vocabulary, default_stopwords, load_businesses, load_reviews, load_stopwords,
    restaurant_documents, to_bow, tokenize_reviews, BowDocument,
};
use geotopics::features::{
    city_origin, project, vertical_normalize, write_features_csv, FeatureVector,
};
use geotopics::topicmodel::{LdaConfig, TopicModel};
use geotopics::{Error, Matrix, Result};

use crate::artifacts::{
    write_city, write_restaurants, write_text, CityInfo, RestaurantRecord, CITY_FILE,
    FEATURES_FILE, RESTAURANTS_FILE, TOPIC_WORDS_FILE,
};
use crate::config::{require, PipelineConfig};
use crate::manifest::RunManifest;

pub fn run(cfg: &PipelineConfig, config_file: Option<&Path>) -> Result<()> {
    let business_path = require(&cfg.business, "business")?;
    let review_path = require(&cfg.review, "review")?;
    let city = require(&cfg.city, "city")?;
    let out = require(&cfg.out, "out")?;

    let mut manifest = RunManifest::new("train", cfg.snapshot());
    manifest.add_input(business_path)?;
    manifest.add_input(review_path)?;
    if let Some(p) = &cfg.stopwords {
        manifest.add_input(p)?;
    }
    if let Some(p) = config_file {
        manifest.add_input(p)?;
    }

    let t_load = Instant::now();
    let business_load = load_businesses(business_path, Some(city))?;
    let businesses = business_load.businesses;
    let ids: HashSet<String> = businesses.iter().map(|b| b.id.clone()).collect();
    let review_load = load_reviews(review_path, &ids)?;
    let reviews = review_load.reviews;
    if reviews.is_empty() {
        return Err(Error::EmptyResult(format!(
            "no reviews reference the {} businesses of city '{city}'",
            businesses.len()
        )));
    }
    manifest.timing("load", t_load);

    let stopwords = match &cfg.stopwords {
        Some(p) => load_stopwords(p)?,
        None => default_stopwords(),
    };

    let t_tokenize = Instant::now();
    let tokenized = tokenize_reviews(&reviews, &stopwords);
    manifest.timing("tokenize", t_tokenize);

    let t_vocab = Instant::now();
    let token_lists: Vec<Vec<String>> = tokenized.iter().map(|t| t.tokens.clone()).collect();
    let vocab = build_vocabulary(&token_lists, cfg.vocab)?;
    drop(token_lists);
    manifest.timing("vocabulary", t_vocab);

    // Each review is one training document; restaurant-level documents are
    // only formed afterwards for inference.
    let corpus: Vec<BowDocument> = tokenized
        .iter()
        .filter_map(|t| {
            let counts = to_bow(&t.tokens, &vocab);
            (!counts.is_empty()).then(|| BowDocument {
                restaurant_id: t.business_id.clone(),
                counts,
            })
        })
        .collect();
    if corpus.is_empty() {
        return Err(Error::EmptyResult(
            "every review tokenized to nothing; corpus is empty".into(),
        ));
    }

    let lda = LdaConfig {
        alpha: cfg.alpha.unwrap_or(1.0 / cfg.topics as f64),
        beta: cfg.beta.unwrap_or(1.0 / cfg.topics as f64),
        minibatch_size: cfg.minibatch,
        kappa: cfg.kappa,
        tau0: cfg.tau0,
        passes: cfg.passes,
        seed: cfg.seed,
        ..LdaConfig::with_topics(cfg.topics)
    };

    let t_train = Instant::now();
    let model = TopicModel::train(&corpus, &vocab, &lda)?;
    manifest.timing("train", t_train);

    let t_infer = Instant::now();
    let docs = restaurant_documents(&businesses, &tokenized, &vocab);
    if docs.documents.is_empty() {
        return Err(Error::EmptyResult(
            "no restaurant had any in-vocabulary tokens".into(),
        ));
    }
    let inferred: Vec<Vec<f64>> = docs
        .documents
        .par_iter()
        .map(|d| model.infer(d).weights)
        .collect();
    manifest.timing("infer", t_infer);

    let raw = Matrix::from_rows(inferred);
    let column_sums: Vec<f64> = (0..raw.cols())
        .map(|j| raw.iter_rows().map(|r| r[j]).sum())
        .collect();
    let normalized = vertical_normalize(&raw);
    if !normalized.zero_rows.is_empty() {
        eprintln!(
            "warning: {} restaurants produced an all-zero normalized topic row",
            normalized.zero_rows.len()
        );
    }

    let origin = city_origin(&businesses);
    let by_id: HashMap<&str, &geotopics::corpus::Business> =
        businesses.iter().map(|b| (b.id.as_str(), b)).collect();
    let mut review_counts: HashMap<&str, usize> = HashMap::new();
    for r in &reviews {
        *review_counts.entry(r.business_id.as_str()).or_insert(0) += 1;
    }

    let mut features = Vec::with_capacity(docs.documents.len());
    let mut records = Vec::with_capacity(docs.documents.len());
    for (i, doc) in docs.documents.iter().enumerate() {
        let business = by_id[doc.restaurant_id.as_str()];
        features.push(FeatureVector {
            restaurant_id: doc.restaurant_id.clone(),
            position: project(business.latitude, business.longitude, origin),
            topics: normalized.matrix.row(i).to_vec(),
            scale: 1.0,
        });
        records.push(RestaurantRecord {
            business_id: business.id.clone(),
            name: business.name.clone(),
            latitude: business.latitude,
            longitude: business.longitude,
            review_count: review_counts.get(business.id.as_str()).copied().unwrap_or(0),
        });
    }

    let t_write = Instant::now();
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    model.save(out)?;
    write_features_csv(&out.join(FEATURES_FILE), &features)?;
    write_restaurants(&out.join(RESTAURANTS_FILE), &records)?;
    write_city(
        &out.join(CITY_FILE),
        &CityInfo {
            city: city.clone(),
            origin_lat: origin.0,
            origin_lon: origin.1,
            restaurants: features.len(),
            column_sums,
            excluded: docs.excluded.clone(),
        },
    )?;
    write_text(&out.join(TOPIC_WORDS_FILE), &topic_words_text(&model)?)?;
    manifest.timing("write", t_write);

    for name in [
        geotopics::topicmodel::MODEL_BIN,
        geotopics::topicmodel::MODEL_JSON,
        geotopics::topicmodel::VOCAB_FILE,
        FEATURES_FILE,
        RESTAURANTS_FILE,
        CITY_FILE,
        TOPIC_WORDS_FILE,
    ] {
        manifest.add_artifact(name);
    }
    manifest.note("topics", cfg.topics);
    manifest.note("vocabulary_size", vocab.len());
    manifest.note("training_documents", corpus.len());
    manifest.note("restaurants", features.len());
    manifest.note("restaurants_excluded", docs.excluded.len());
    manifest.note(
        "reviews_skipped_malformed",
        review_load.skipped_malformed,
    );
    manifest.note("reviews_skipped_empty", review_load.skipped_empty_text);
    manifest.note(
        "businesses_skipped_malformed",
        business_load.skipped_malformed,
    );
    manifest.write(out)?;

    println!(
        "trained {} topics on {} review documents ({} words, {} restaurants) -> {}",
        cfg.topics,
        corpus.len(),
        vocab.len(),
        features.len(),
        out.display()
    );
    Ok(())
}

fn topic_words_text(model: &TopicModel) -> Result<String> {
    let mut out = String::new();
    for t in 0..model.num_topics() {
        let words = model.top_words(t, 10)?;
        let _ = write!(out, "topic {t}:");
        for (word, _) in &words.entries {
            let _ = write!(out, " {word}");
        }
        out.push('\n');
    }
    Ok(out)
}
