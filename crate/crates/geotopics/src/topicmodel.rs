//! LDA topic modeling: online variational Bayes training, per-document
//! inference, top-word extraction, and a generative sampler used as the
//! training oracle in tests.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{BowDocument, Vocabulary};
use crate::error::{Error, Result};
use crate::math::{derive_seed, digamma, ln_gamma};
use crate::matrix::Matrix;

// Seed streams so training initialization, per-document gamma draws, and
// inference each get independent deterministic randomness.
const STREAM_LAMBDA_INIT: u64 = 0xA1;
const STREAM_GAMMA_INIT: u64 = 0xA2;
const STREAM_INFER: u64 = 0xA3;

/// Inferred topic weights below this are zeroed and the rest renormalized;
/// reported distributions stay sparse.
pub const WEIGHT_TRUNCATION: f64 = 1e-4;

/// Hyperparameters and optimizer settings for training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaConfig {
    pub num_topics: usize,
    /// Symmetric document-topic prior.
    pub alpha: f64,
    /// Symmetric topic-word prior (eta).
    pub beta: f64,
    pub minibatch_size: usize,
    /// Learning-rate decay; must lie in (0.5, 1] for convergence.
    pub kappa: f64,
    /// Learning-rate offset; larger values downweight early minibatches.
    pub tau0: f64,
    pub passes: usize,
    pub e_step_max_iters: usize,
    pub e_step_tol: f64,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig::with_topics(50)
    }
}

impl LdaConfig {
    /// Canonical settings for a given topic count: symmetric 1/K priors,
    /// minibatch 256, kappa 0.7, tau0 1024, one pass.
    pub fn with_topics(k: usize) -> Self {
        LdaConfig {
            num_topics: k,
            alpha: 1.0 / k as f64,
            beta: 1.0 / k as f64,
            minibatch_size: 256,
            kappa: 0.7,
            tau0: 1024.0,
            passes: 1,
            e_step_max_iters: 100,
            e_step_tol: 1e-3,
            seed: 42,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_topics < 2 {
            return Err(Error::InvalidArgument(format!(
                "num_topics must be at least 2, got {}",
                self.num_topics
            )));
        }
        if !(self.alpha > 0.0) || !(self.beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha and beta must be positive, got alpha={} beta={}",
                self.alpha, self.beta
            )));
        }
        if !(self.kappa > 0.5 && self.kappa <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa must lie in (0.5, 1], got {}",
                self.kappa
            )));
        }
        if self.tau0 < 0.0 || !self.tau0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "tau0 must be non-negative, got {}",
                self.tau0
            )));
        }
        if self.minibatch_size == 0 || self.passes == 0 || self.e_step_max_iters == 0 {
            return Err(Error::InvalidArgument(
                "minibatch_size, passes, and e_step_max_iters must be positive".into(),
            ));
        }
        if !(self.e_step_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "e_step_tol must be positive, got {}",
                self.e_step_tol
            )));
        }
        Ok(())
    }
}

/// Topic weights for one document: a non-negative vector summing to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicDistribution {
    pub weights: Vec<f64>,
}

impl TopicDistribution {
    pub fn uniform(k: usize) -> Self {
        TopicDistribution {
            weights: vec![1.0 / k as f64; k],
        }
    }

    /// Index of the heaviest topic.
    pub fn dominant(&self) -> usize {
        self.weights
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// Top words of one topic, weight descending.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicWordList {
    pub topic_id: usize,
    pub entries: Vec<(String, f64)>,
}

/// A trained topic model: variational Dirichlet parameters over words
/// (lambda) for each topic, plus the vocabulary they are bound to.
#[derive(Debug, Clone)]
pub struct TopicModel {
    config: LdaConfig,
    vocab: Vocabulary,
    lambda: Matrix,
    update_count: u64,
    exp_elog_beta: Matrix,
}

#[derive(Serialize, Deserialize)]
struct ModelHeader {
    k: u64,
    vocab_size: u64,
    alpha: f64,
    beta: f64,
    seed: u64,
    update_count: u64,
}

const MODEL_MAGIC: &[u8; 4] = b"GTPM";
const MODEL_FORMAT_VERSION: u32 = 1;
pub const MODEL_BIN: &str = "model.bin";
pub const MODEL_JSON: &str = "model.json";
pub const VOCAB_FILE: &str = "vocabulary.txt";

/// E[log theta] for one Dirichlet parameter vector.
fn dirichlet_expectation(params: &[f64], out: &mut [f64]) {
    let total: f64 = params.iter().sum();
    let psi_total = digamma(total);
    for (o, &p) in out.iter_mut().zip(params) {
        *o = digamma(p) - psi_total;
    }
}

fn beta_expectations(lambda: &Matrix) -> Matrix {
    let (k, v) = (lambda.rows(), lambda.cols());
    let mut elog = Matrix::zeros(k, v);
    for r in 0..k {
        dirichlet_expectation(lambda.row(r), elog.row_mut(r));
    }
    elog.map(f64::exp)
}

fn compute_phinorm(ids: &[usize], exp_elog_theta: &[f64], exp_elog_beta: &Matrix) -> Vec<f64> {
    ids.iter()
        .map(|&id| {
            let mut s = 0.0;
            for (k, &t) in exp_elog_theta.iter().enumerate() {
                s += t * exp_elog_beta.get(k, id);
            }
            s + 1e-100
        })
        .collect()
}

/// Variational bound for one document at the current gamma, with the word
/// assignments (phi) at their optimum given gamma. Constant in lambda terms
/// are omitted; gamma-dependent terms are exact, so the bound is comparable
/// across E-step iterations.
fn doc_elbo(cts: &[f64], gamma: &[f64], elog_theta: &[f64], phinorm: &[f64], alpha: f64) -> f64 {
    let k = gamma.len() as f64;
    let mut score = 0.0;
    for (c, p) in cts.iter().zip(phinorm) {
        score += c * p.ln();
    }
    let gamma_total: f64 = gamma.iter().sum();
    for (g, e) in gamma.iter().zip(elog_theta) {
        score += (alpha - g) * e + ln_gamma(*g);
    }
    score -= ln_gamma(gamma_total);
    score + ln_gamma(k * alpha) - k * ln_gamma(alpha)
}

struct EStepOutcome {
    gamma: Vec<f64>,
    exp_elog_theta: Vec<f64>,
    phinorm: Vec<f64>,
    elbo_trace: Option<Vec<f64>>,
}

/// Coordinate-ascent gamma updates for one document, lambda held fixed.
/// Stops when the mean absolute gamma change drops below `tol`.
fn e_step_doc(
    ids: &[usize],
    cts: &[f64],
    exp_elog_beta: &Matrix,
    alpha: f64,
    max_iters: usize,
    tol: f64,
    gamma_init: &[f64],
    want_trace: bool,
) -> EStepOutcome {
    let k = exp_elog_beta.rows();
    let mut gamma = gamma_init.to_vec();
    let mut elog_theta = vec![0.0; k];
    dirichlet_expectation(&gamma, &mut elog_theta);
    let mut exp_elog_theta: Vec<f64> = elog_theta.iter().map(|e| e.exp()).collect();
    let mut phinorm = compute_phinorm(ids, &exp_elog_theta, exp_elog_beta);
    let mut trace = want_trace.then(Vec::new);
    if let Some(t) = trace.as_mut() {
        t.push(doc_elbo(cts, &gamma, &elog_theta, &phinorm, alpha));
    }

    let mut last = vec![0.0; k];
    for _ in 0..max_iters {
        last.copy_from_slice(&gamma);
        for (kk, g) in gamma.iter_mut().enumerate() {
            let row = exp_elog_beta.row(kk);
            let mut dot = 0.0;
            for (j, &id) in ids.iter().enumerate() {
                dot += cts[j] / phinorm[j] * row[id];
            }
            *g = alpha + exp_elog_theta[kk] * dot;
        }
        dirichlet_expectation(&gamma, &mut elog_theta);
        for (e, l) in exp_elog_theta.iter_mut().zip(&elog_theta) {
            *e = l.exp();
        }
        phinorm = compute_phinorm(ids, &exp_elog_theta, exp_elog_beta);
        if let Some(t) = trace.as_mut() {
            t.push(doc_elbo(cts, &gamma, &elog_theta, &phinorm, alpha));
        }
        let mean_change: f64 = gamma
            .iter()
            .zip(&last)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            / k as f64;
        if mean_change < tol {
            break;
        }
    }
    EStepOutcome {
        gamma,
        exp_elog_theta,
        phinorm,
        elbo_trace: trace,
    }
}

fn doc_ids_cts(doc: &BowDocument) -> (Vec<usize>, Vec<f64>) {
    let ids: Vec<usize> = doc.counts.keys().copied().collect();
    let cts: Vec<f64> = doc.counts.values().map(|&c| f64::from(c)).collect();
    (ids, cts)
}

impl TopicModel {
    /// Trains with online variational Bayes: per minibatch, a parallel
    /// E-step optimizes per-document gamma, then the M-step blends the
    /// minibatch's sufficient statistics into lambda at rate
    /// rho_t = (tau0 + t)^(-kappa). Deterministic for a fixed seed and
    /// document order regardless of thread count.
    pub fn train(corpus: &[BowDocument], vocab: &Vocabulary, cfg: &LdaConfig) -> Result<TopicModel> {
        cfg.validate()?;
        if corpus.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot train on an empty corpus".into(),
            ));
        }
        let v = vocab.len();
        if v == 0 {
            return Err(Error::InvalidArgument(
                "cannot train with an empty vocabulary".into(),
            ));
        }
        for doc in corpus {
            if let Some((&id, _)) = doc.counts.last_key_value() {
                if id >= v {
                    return Err(Error::InvalidArgument(format!(
                        "document {} references word id {id} outside vocabulary of size {v}",
                        doc.restaurant_id
                    )));
                }
            }
        }

        let k = cfg.num_topics;
        let d = corpus.len() as f64;

        let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, STREAM_LAMBDA_INIT));
        let lambda_dist = Gamma::new(100.0, 0.01).expect("valid gamma parameters");
        let mut lambda = Matrix::zeros(k, v);
        for cell in lambda.as_mut_slice() {
            *cell = lambda_dist.sample(&mut init_rng);
        }
        let mut exp_elog_beta = beta_expectations(&lambda);

        let mut gamma_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, STREAM_GAMMA_INIT));
        let gamma_dist = Gamma::new(100.0, 0.01).expect("valid gamma parameters");

        let mut update_count: u64 = 0;
        for _pass in 0..cfg.passes {
            for batch in corpus.chunks(cfg.minibatch_size) {
                // Gamma initializations are drawn sequentially so the result
                // does not depend on thread scheduling.
                let gamma_inits: Vec<Vec<f64>> = batch
                    .iter()
                    .map(|_| (0..k).map(|_| gamma_dist.sample(&mut gamma_rng)).collect())
                    .collect();

                let doc_stats: Vec<(Vec<usize>, Vec<f64>)> = batch
                    .par_iter()
                    .zip(gamma_inits.par_iter())
                    .map(|(doc, init)| {
                        let (ids, cts) = doc_ids_cts(doc);
                        let out = e_step_doc(
                            &ids,
                            &cts,
                            &exp_elog_beta,
                            cfg.alpha,
                            cfg.e_step_max_iters,
                            cfg.e_step_tol,
                            init,
                            false,
                        );
                        // Sufficient statistics contribution per word slot:
                        // exp(E[log theta_k]) * cts_j / phinorm_j.
                        let mut contrib = vec![0.0; k * ids.len()];
                        for kk in 0..k {
                            for j in 0..ids.len() {
                                contrib[kk * ids.len() + j] =
                                    out.exp_elog_theta[kk] * cts[j] / out.phinorm[j];
                            }
                        }
                        (ids, contrib)
                    })
                    .collect();

                // Merge in document order: float accumulation stays identical
                // under any parallelism.
                let mut sstats = Matrix::zeros(k, v);
                for (ids, contrib) in &doc_stats {
                    let n = ids.len();
                    for kk in 0..k {
                        let row = sstats.row_mut(kk);
                        for (j, &id) in ids.iter().enumerate() {
                            row[id] += contrib[kk * n + j];
                        }
                    }
                }

                let rho = (cfg.tau0 + update_count as f64).powf(-cfg.kappa).min(1.0);
                let scale = d / batch.len() as f64;
                for ((l, s), e) in lambda
                    .as_mut_slice()
                    .iter_mut()
                    .zip(sstats.as_slice())
                    .zip(exp_elog_beta.as_slice())
                {
                    let lambda_hat = cfg.beta + scale * s * e;
                    *l = (1.0 - rho) * *l + rho * lambda_hat;
                }
                exp_elog_beta = beta_expectations(&lambda);
                update_count += 1;
            }
        }

        Ok(TopicModel {
            config: cfg.clone(),
            vocab: vocab.clone(),
            lambda,
            update_count,
            exp_elog_beta,
        })
    }

    /// Builds a model from existing parameters, validating shapes and
    /// positivity. Used by persistence and test fixtures.
    pub fn from_parts(
        config: LdaConfig,
        vocab: Vocabulary,
        lambda: Matrix,
        update_count: u64,
    ) -> Result<TopicModel> {
        if lambda.rows() != config.num_topics || lambda.cols() != vocab.len() {
            return Err(Error::InvalidArgument(format!(
                "lambda shape {}x{} does not match K={} V={}",
                lambda.rows(),
                lambda.cols(),
                config.num_topics,
                vocab.len()
            )));
        }
        if !lambda.as_slice().iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument(
                "lambda entries must be positive and finite".into(),
            ));
        }
        let exp_elog_beta = beta_expectations(&lambda);
        Ok(TopicModel {
            config,
            vocab,
            lambda,
            update_count,
            exp_elog_beta,
        })
    }

    pub fn num_topics(&self) -> usize {
        self.config.num_topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn config(&self) -> &LdaConfig {
        &self.config
    }

    pub fn lambda(&self) -> &Matrix {
        &self.lambda
    }

    pub fn update_count(&self) -> u64 {
        self.update_count
    }

    /// Expected word distribution of one topic: normalize(lambda_k).
    pub fn phi_row(&self, topic_id: usize) -> Vec<f64> {
        let row = self.lambda.row(topic_id);
        let total: f64 = row.iter().sum();
        row.iter().map(|&x| x / total).collect()
    }

    /// Posterior topic weights for one document: the variational E-step with
    /// lambda fixed, then normalize(gamma - alpha) clipped at zero, with
    /// weights under [`WEIGHT_TRUNCATION`] zeroed and the rest renormalized.
    /// An empty document yields the uniform distribution.
    pub fn infer(&self, doc: &BowDocument) -> TopicDistribution {
        self.infer_inner(doc, false).0
    }

    /// [`TopicModel::infer`] plus the per-iteration variational bound, first
    /// entry at the initial gamma. The bound is non-decreasing along the
    /// trace.
    pub fn infer_with_trace(&self, doc: &BowDocument) -> (TopicDistribution, Vec<f64>) {
        let (dist, trace) = self.infer_inner(doc, true);
        (dist, trace.unwrap_or_default())
    }

    fn infer_inner(&self, doc: &BowDocument, want_trace: bool) -> (TopicDistribution, Option<Vec<f64>>) {
        let k = self.config.num_topics;
        let (ids, cts) = doc_ids_cts(doc);
        debug_assert!(ids.iter().all(|&id| id < self.vocab.len()));

        // A fresh derived-seed stream per call: inference for a given
        // (model, document) pair never depends on what was inferred before.
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.config.seed, STREAM_INFER));
        let gamma_dist = Gamma::new(100.0, 0.01).expect("valid gamma parameters");
        let gamma_init: Vec<f64> = (0..k).map(|_| gamma_dist.sample(&mut rng)).collect();

        let out = e_step_doc(
            &ids,
            &cts,
            &self.exp_elog_beta,
            self.config.alpha,
            self.config.e_step_max_iters,
            self.config.e_step_tol,
            &gamma_init,
            want_trace,
        );

        let mut weights: Vec<f64> = out
            .gamma
            .iter()
            .map(|&g| (g - self.config.alpha).max(0.0))
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return (TopicDistribution::uniform(k), out.elbo_trace);
        }
        for w in &mut weights {
            *w /= total;
        }
        for w in &mut weights {
            if *w < WEIGHT_TRUNCATION {
                *w = 0.0;
            }
        }
        let kept: f64 = weights.iter().sum();
        if kept <= 0.0 {
            return (TopicDistribution::uniform(k), out.elbo_trace);
        }
        for w in &mut weights {
            *w /= kept;
        }
        (TopicDistribution { weights }, out.elbo_trace)
    }

    /// The n heaviest words of a topic, weight descending, ties broken by
    /// word id ascending. n larger than the vocabulary clamps to all words.
    pub fn top_words(&self, topic_id: usize, n: usize) -> Result<TopicWordList> {
        if topic_id >= self.config.num_topics {
            return Err(Error::InvalidArgument(format!(
                "topic id {topic_id} out of range for K={}",
                self.config.num_topics
            )));
        }
        let phi = self.phi_row(topic_id);
        let mut order: Vec<usize> = (0..phi.len()).collect();
        order.sort_by(|&a, &b| phi[b].partial_cmp(&phi[a]).unwrap().then(a.cmp(&b)));
        let entries = order
            .into_iter()
            .take(n.min(phi.len()))
            .map(|id| (self.vocab.word(id).to_string(), phi[id]))
            .collect();
        Ok(TopicWordList { topic_id, entries })
    }

    /// Writes `model.bin` (magic + little-endian header + row-major lambda),
    /// `model.json` (the same header as JSON), and `vocabulary.txt` into a
    /// directory.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let header = ModelHeader {
            k: self.config.num_topics as u64,
            vocab_size: self.vocab.len() as u64,
            alpha: self.config.alpha,
            beta: self.config.beta,
            seed: self.config.seed,
            update_count: self.update_count,
        };

        let bin_path = dir.join(MODEL_BIN);
        let mut w = BufWriter::new(File::create(&bin_path).map_err(|e| Error::io(&bin_path, e))?);
        let io_err = |e| Error::io(&bin_path, e);
        w.write_all(MODEL_MAGIC).map_err(io_err)?;
        w.write_all(&MODEL_FORMAT_VERSION.to_le_bytes()).map_err(io_err)?;
        w.write_all(&header.k.to_le_bytes()).map_err(io_err)?;
        w.write_all(&header.vocab_size.to_le_bytes()).map_err(io_err)?;
        w.write_all(&header.alpha.to_le_bytes()).map_err(io_err)?;
        w.write_all(&header.beta.to_le_bytes()).map_err(io_err)?;
        w.write_all(&header.seed.to_le_bytes()).map_err(io_err)?;
        w.write_all(&header.update_count.to_le_bytes()).map_err(io_err)?;
        for &x in self.lambda.as_slice() {
            w.write_all(&x.to_le_bytes()).map_err(io_err)?;
        }
        w.flush().map_err(io_err)?;

        let json_path = dir.join(MODEL_JSON);
        let json = serde_json::to_string_pretty(&header)
            .map_err(|e| Error::Malformed(format!("header serialization failed: {e}")))?;
        std::fs::write(&json_path, json).map_err(|e| Error::io(&json_path, e))?;

        self.vocab.save(&dir.join(VOCAB_FILE))
    }

    /// Reads a model directory written by [`TopicModel::save`]. Optimizer
    /// settings not stored in the header come back as defaults; they do not
    /// affect inference beyond the E-step stopping rule.
    pub fn load(dir: &Path) -> Result<TopicModel> {
        let bin_path = dir.join(MODEL_BIN);
        let mut r = BufReader::new(File::open(&bin_path).map_err(|e| Error::io(&bin_path, e))?);
        let io_err = |e| Error::io(&bin_path, e);

        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(io_err)?;
        if &magic != MODEL_MAGIC {
            return Err(Error::Malformed(format!(
                "{} is not a model file (bad magic)",
                bin_path.display()
            )));
        }
        let mut u32buf = [0u8; 4];
        r.read_exact(&mut u32buf).map_err(io_err)?;
        let version = u32::from_le_bytes(u32buf);
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported model format version {version}"
            )));
        }
        let mut u64buf = [0u8; 8];
        let mut read_u64 = |r: &mut BufReader<File>| -> Result<u64> {
            r.read_exact(&mut u64buf).map_err(|e| Error::io(&bin_path, e))?;
            Ok(u64::from_le_bytes(u64buf))
        };
        let k = read_u64(&mut r)?;
        let vocab_size = read_u64(&mut r)?;
        let mut f64buf = [0u8; 8];
        r.read_exact(&mut f64buf).map_err(io_err)?;
        let alpha = f64::from_le_bytes(f64buf);
        r.read_exact(&mut f64buf).map_err(io_err)?;
        let beta = f64::from_le_bytes(f64buf);
        let seed = read_u64(&mut r)?;
        let update_count = read_u64(&mut r)?;

        let n = (k * vocab_size) as usize;
        let mut data = vec![0.0f64; n];
        for cell in &mut data {
            r.read_exact(&mut f64buf).map_err(io_err)?;
            *cell = f64::from_le_bytes(f64buf);
        }

        let vocab = Vocabulary::load(&dir.join(VOCAB_FILE))?;
        if vocab.len() != vocab_size as usize {
            return Err(Error::Malformed(format!(
                "vocabulary file has {} words but model header says {}",
                vocab.len(),
                vocab_size
            )));
        }

        let config = LdaConfig {
            num_topics: k as usize,
            alpha,
            beta,
            seed,
            ..LdaConfig::with_topics(k.max(2) as usize)
        };
        TopicModel::from_parts(config, vocab, Matrix::from_flat(k as usize, n / k.max(1) as usize, data), update_count)
    }
}

/// Samples documents from the LDA generative process: per document a topic
/// mixture theta ~ Dirichlet(alpha), then per token a topic z ~ theta and a
/// word w ~ phi_z. The oracle for training and inference tests.
pub fn generate_corpus(
    true_topics: &Matrix,
    alpha: f64,
    n_docs: usize,
    doc_len: usize,
    seed: u64,
) -> Result<Vec<BowDocument>> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let k = true_topics.rows();
    for r in 0..k {
        let row = true_topics.row(r);
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-9 || row.iter().any(|&x| x < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "topic row {r} is not a probability distribution (sum {total})"
            )));
        }
    }

    let word_cdfs: Vec<Vec<f64>> = (0..k)
        .map(|r| {
            let mut acc = 0.0;
            true_topics
                .row(r)
                .iter()
                .map(|&p| {
                    acc += p;
                    acc
                })
                .collect()
        })
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta_dist = Gamma::new(alpha, 1.0)
        .map_err(|e| Error::InvalidArgument(format!("bad Dirichlet parameter: {e}")))?;

    let mut docs = Vec::with_capacity(n_docs);
    for i in 0..n_docs {
        let theta = sample_simplex(&theta_dist, k, &mut rng);
        let mut theta_cdf = Vec::with_capacity(k);
        let mut acc = 0.0;
        for &t in &theta {
            acc += t;
            theta_cdf.push(acc);
        }

        let mut counts = std::collections::BTreeMap::new();
        for _ in 0..doc_len {
            let z = sample_cdf(&theta_cdf, &mut rng);
            let w = sample_cdf(&word_cdfs[z], &mut rng);
            *counts.entry(w).or_insert(0u32) += 1;
        }
        docs.push(BowDocument {
            restaurant_id: format!("synthetic-{i}"),
            counts,
        });
    }
    Ok(docs)
}

/// Normalized vector of Gamma draws; a Dirichlet sample. Retries the
/// astronomically rare all-zero draw, falling back to uniform.
fn sample_simplex(dist: &Gamma<f64>, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    for _ in 0..100 {
        let draws: Vec<f64> = (0..k).map(|_| dist.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 && total.is_finite() {
            return draws.iter().map(|d| d / total).collect();
        }
    }
    vec![1.0 / k as f64; k]
}

fn sample_cdf(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}
