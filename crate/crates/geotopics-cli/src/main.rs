//! `geotopics`: discover, label, and visualize culinary districts from
//! geo-tagged restaurant reviews.
//!
//! The pipeline is three subcommands connected by on-disk artifacts:
//! `train` builds a topic model directory from raw business/review files,
//! `cluster` groups restaurants in the scaled spatial-topical embedding,
//! and `heatmap` scores a query against every cell of a city grid. `gap`
//! sweeps cluster counts for model selection.

mod artifacts;
mod commands;
mod config;
mod manifest;
mod render;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geotopics::{Error, Result};

use config::{parse_config_file, parse_range, PipelineConfig};

#[derive(Parser)]
#[command(
    name = "geotopics",
    version,
    about = "Discovers culinary districts from geo-tagged restaurant reviews"
)]
struct Cli {
    /// Cap worker threads (default: machine parallelism). The
    /// GEOTOPICS_THREADS environment variable sets the same cap; the flag
    /// wins when both are given.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Flat key=value config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the review corpus and train the topic model.
    Train(TrainArgs),
    /// Cluster restaurants in the scaled topic embedding and label them.
    Cluster(ClusterArgs),
    /// Render a topic-similarity heatmap for a restaurant or a review file.
    Heatmap(HeatmapArgs),
    /// Sweep cluster counts and report the gap statistic.
    Gap(GapArgs),
    /// Regenerate the bundled synthetic fixture city.
    #[command(hide = true)]
    Fixture(FixtureArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Business JSONL file, one JSON object per line.
    #[arg(long, value_name = "PATH")]
    business: Option<PathBuf>,
    /// Review JSONL file, one JSON object per line.
    #[arg(long, value_name = "PATH")]
    review: Option<PathBuf>,
    /// City to keep (exact name, case-insensitive).
    #[arg(long, value_name = "NAME")]
    city: Option<String>,
    /// Number of topics K.
    #[arg(long, value_name = "K")]
    topics: Option<usize>,
    /// Vocabulary size target.
    #[arg(long, value_name = "V")]
    vocab: Option<usize>,
    /// RNG seed; reruns with the same seed reproduce the model bit for bit.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Model output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Stopword file, one word per line (default: bundled English list).
    #[arg(long, value_name = "PATH")]
    stopwords: Option<PathBuf>,
    /// Document-topic prior (default 1/K).
    #[arg(long, value_name = "X")]
    alpha: Option<f64>,
    /// Topic-word prior (default 1/K).
    #[arg(long, value_name = "X")]
    beta: Option<f64>,
    /// Full passes over the corpus.
    #[arg(long, value_name = "N")]
    passes: Option<usize>,
    /// Minibatch size for the online optimizer.
    #[arg(long, value_name = "N")]
    minibatch: Option<usize>,
    /// Learning-rate decay exponent, in (0.5, 1].
    #[arg(long, value_name = "X")]
    kappa: Option<f64>,
    /// Learning-rate offset.
    #[arg(long, value_name = "X")]
    tau0: Option<f64>,
}

#[derive(Args)]
struct ClusterArgs {
    /// Model directory produced by `train`.
    #[arg(long, value_name = "DIR")]
    model: Option<PathBuf>,
    /// Cluster count, or 'auto' to pick by gap statistic (needs --range).
    #[arg(long, value_name = "C|auto")]
    clusters: Option<String>,
    /// Topic-space scale S applied before clustering.
    #[arg(long, value_name = "S")]
    scale: Option<f64>,
    /// kmeans, gmm, or both.
    #[arg(long, value_name = "NAME")]
    method: Option<String>,
    /// Output directory (default: <model>/cluster).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Candidate range lo:hi for --clusters auto.
    #[arg(long, value_name = "LO:HI")]
    range: Option<String>,
    /// Reference sets for the gap statistic.
    #[arg(long, value_name = "B")]
    refs: Option<usize>,
    /// RNG seed for initialization and reference draws.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Topic label table CSV (default: bundled labels when K matches).
    #[arg(long, value_name = "PATH")]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct HeatmapArgs {
    /// Model directory produced by `train`.
    #[arg(long, value_name = "DIR")]
    model: Option<PathBuf>,
    /// Restaurant id, or path to a file of review text.
    #[arg(long, value_name = "ID|FILE")]
    target: Option<String>,
    /// Grid cells across the city's width.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    /// Output directory (default: <model>/heatmap).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Stopword file used when the target is a review file.
    #[arg(long, value_name = "PATH")]
    stopwords: Option<PathBuf>,
}

#[derive(Args)]
struct GapArgs {
    /// Model directory produced by `train`.
    #[arg(long, value_name = "DIR")]
    model: Option<PathBuf>,
    /// Candidate range lo:hi.
    #[arg(long, value_name = "LO:HI")]
    range: Option<String>,
    /// Reference sets drawn from the bounding box.
    #[arg(long, value_name = "B")]
    refs: Option<usize>,
    /// Topic-space scale S applied before clustering.
    #[arg(long, value_name = "S")]
    scale: Option<f64>,
    /// Output directory (default: <model>/gap).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// RNG seed for restarts and reference draws.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Args)]
struct FixtureArgs {
    /// Directory to write business.json, review.json, districts.csv.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 3 })
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let file_map = match &cli.config {
        Some(path) => parse_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut cfg = PipelineConfig::from_file_map(&file_map)?;

    let threads = match cli.threads {
        Some(n) => Some(n),
        None => env_threads()?.or(cfg.threads),
    };
    if let Some(n) = threads {
        cfg.threads = Some(n);
        init_thread_pool(n)?;
    }

    let config_file = cli.config.as_deref();
    match cli.command {
        Command::Train(args) => {
            apply_train(&mut cfg, args)?;
            cfg.validate()?;
            commands::train::run(&cfg, config_file)
        }
        Command::Cluster(args) => {
            apply_cluster(&mut cfg, args)?;
            cfg.validate()?;
            commands::cluster::run(&cfg, config_file)
        }
        Command::Heatmap(args) => {
            apply_heatmap(&mut cfg, args)?;
            cfg.validate()?;
            commands::heatmap::run(&cfg, config_file)
        }
        Command::Gap(args) => {
            apply_gap(&mut cfg, args)?;
            cfg.validate()?;
            commands::gap::run(&cfg, config_file)
        }
        Command::Fixture(args) => {
            let out = args
                .out
                .or_else(|| cfg.out.clone())
                .unwrap_or_else(|| PathBuf::from("fixtures/fixture-city"));
            commands::fixture::run(&out, args.seed.unwrap_or(cfg.seed))
        }
    }
}

fn apply_train(cfg: &mut PipelineConfig, a: TrainArgs) -> Result<()> {
    set(&mut cfg.business, a.business);
    set(&mut cfg.review, a.review);
    set(&mut cfg.city, a.city);
    set_val(&mut cfg.topics, a.topics);
    set_val(&mut cfg.vocab, a.vocab);
    set_val(&mut cfg.seed, a.seed);
    set(&mut cfg.out, a.out);
    set(&mut cfg.stopwords, a.stopwords);
    if a.alpha.is_some() {
        cfg.alpha = a.alpha;
    }
    if a.beta.is_some() {
        cfg.beta = a.beta;
    }
    set_val(&mut cfg.passes, a.passes);
    set_val(&mut cfg.minibatch, a.minibatch);
    set_val(&mut cfg.kappa, a.kappa);
    set_val(&mut cfg.tau0, a.tau0);
    Ok(())
}

fn apply_cluster(cfg: &mut PipelineConfig, a: ClusterArgs) -> Result<()> {
    set(&mut cfg.model, a.model);
    if let Some(c) = a.clusters {
        cfg.clusters = c.parse()?;
    }
    set_val(&mut cfg.scale, a.scale);
    if let Some(m) = a.method {
        cfg.method = m.parse()?;
    }
    set(&mut cfg.out, a.out);
    if let Some(r) = a.range {
        cfg.range = Some(parse_range(&r)?);
    }
    set_val(&mut cfg.refs, a.refs);
    set_val(&mut cfg.seed, a.seed);
    set(&mut cfg.labels, a.labels);
    Ok(())
}

fn apply_heatmap(cfg: &mut PipelineConfig, a: HeatmapArgs) -> Result<()> {
    set(&mut cfg.model, a.model);
    set(&mut cfg.target, a.target);
    set_val(&mut cfg.grid, a.grid);
    set(&mut cfg.out, a.out);
    set(&mut cfg.stopwords, a.stopwords);
    Ok(())
}

fn apply_gap(cfg: &mut PipelineConfig, a: GapArgs) -> Result<()> {
    set(&mut cfg.model, a.model);
    if let Some(r) = a.range {
        cfg.range = Some(parse_range(&r)?);
    }
    set_val(&mut cfg.refs, a.refs);
    set_val(&mut cfg.scale, a.scale);
    set(&mut cfg.out, a.out);
    set_val(&mut cfg.seed, a.seed);
    Ok(())
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn set_val<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn env_threads() -> Result<Option<usize>> {
    match std::env::var("GEOTOPICS_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!(
                    "GEOTOPICS_THREADS must be a positive integer, got '{v}'"
                ))
            })?;
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn init_thread_pool(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "thread count must be at least 1".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(format!("thread pool setup failed: {e}")))
}
