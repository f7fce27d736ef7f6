//! Ingestion of review data: JSON-lines loading, text cleaning, vocabulary
//! construction, and bag-of-words document assembly.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;

use crate::error::{Error, Result};

/// Bundled default stop-word list (standard 318-word English list).
pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// A restaurant record: the unit of clustering.
#[derive(Debug, Clone, PartialEq)]
pub struct Business {
    pub id: String,
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub city: String,
}

/// One review attached to a business.
#[derive(Debug, Clone, PartialEq)]
pub struct Review {
    pub business_id: String,
    pub text: String,
    pub stars: Option<u8>,
    pub date: Option<String>,
}

/// Result of loading businesses: matching records plus a skip count for
/// malformed lines.
#[derive(Debug)]
pub struct BusinessLoad {
    pub businesses: Vec<Business>,
    pub skipped_malformed: usize,
}

/// Result of loading reviews. Empty-text reviews are excluded and counted
/// separately from unparseable lines.
#[derive(Debug)]
pub struct ReviewLoad {
    pub reviews: Vec<Review>,
    pub skipped_malformed: usize,
    pub skipped_empty_text: usize,
}

#[derive(Deserialize)]
struct BusinessLine {
    #[serde(alias = "id")]
    business_id: String,
    name: String,
    latitude: f64,
    longitude: f64,
    city: String,
}

#[derive(Deserialize)]
struct ReviewLine {
    business_id: String,
    text: String,
    stars: Option<u8>,
    date: Option<String>,
}

/// Loads businesses from a JSON-lines file, optionally keeping only one city
/// (case-insensitive exact match). Malformed lines (bad JSON, missing keys,
/// coordinates off the globe) are skipped and counted. File order is kept.
pub fn load_businesses(path: &Path, city_filter: Option<&str>) -> Result<BusinessLoad> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let filter_lower = city_filter.map(str::to_lowercase);

    let mut businesses = Vec::new();
    let mut skipped = 0usize;
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: BusinessLine = match serde_json::from_str(&line) {
            Ok(p) => p,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        if !(-90.0..=90.0).contains(&parsed.latitude)
            || !(-180.0..=180.0).contains(&parsed.longitude)
        {
            skipped += 1;
            continue;
        }
        if let Some(want) = &filter_lower {
            if parsed.city.to_lowercase() != *want {
                continue;
            }
        }
        businesses.push(Business {
            id: parsed.business_id,
            name: parsed.name,
            latitude: parsed.latitude,
            longitude: parsed.longitude,
            city: parsed.city,
        });
    }

    if businesses.is_empty() {
        let what = match city_filter {
            Some(c) => format!("no businesses matched city filter {c:?}"),
            None => format!("no valid businesses in {}", path.display()),
        };
        return Err(Error::EmptyResult(what));
    }
    Ok(BusinessLoad {
        businesses,
        skipped_malformed: skipped,
    })
}

/// Loads reviews and joins them against a set of known business ids,
/// preserving file order. Empty-text reviews are excluded and counted.
pub fn load_reviews(path: &Path, business_ids: &HashSet<String>) -> Result<ReviewLoad> {
    if business_ids.is_empty() {
        return Err(Error::InvalidArgument(
            "load_reviews requires a non-empty business id set".into(),
        ));
    }
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut reviews = Vec::new();
    let mut skipped_malformed = 0usize;
    let mut skipped_empty_text = 0usize;
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: ReviewLine = match serde_json::from_str(&line) {
            Ok(p) => p,
            Err(_) => {
                skipped_malformed += 1;
                continue;
            }
        };
        if !business_ids.contains(&parsed.business_id) {
            continue;
        }
        if parsed.text.trim().is_empty() {
            skipped_empty_text += 1;
            continue;
        }
        reviews.push(Review {
            business_id: parsed.business_id,
            text: parsed.text,
            stars: parsed.stars,
            date: parsed.date,
        });
    }
    Ok(ReviewLoad {
        reviews,
        skipped_malformed,
        skipped_empty_text,
    })
}

/// Parses a stop-word file: one lowercase word per line, `#` comment lines
/// and blank lines ignored.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

/// Loads a stop-word file from disk in the [`parse_stopwords`] format.
pub fn load_stopwords(path: &Path) -> Result<HashSet<String>> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::io(path, e))?;
    Ok(parse_stopwords(&text))
}

/// The bundled default stop-word set.
pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(DEFAULT_STOPWORDS)
}

/// Lower-cases and tokenizes raw text. Digits and punctuation separate
/// tokens; an apostrophe survives only between letters ("roberto's"), so
/// quoting apostrophes at token edges are stripped. Stop-words are dropped.
pub fn clean_text(raw: &str, stopwords: &HashSet<String>) -> Vec<String> {
    // Lower-case the whole string first: lowercasing can introduce combining
    // marks, and tokenizing afterwards keeps cleaning idempotent.
    let lowered = raw.to_lowercase();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let flush = |current: &mut String, tokens: &mut Vec<String>| {
        let trimmed = current.trim_matches('\'');
        if !trimmed.is_empty() && !stopwords.contains(trimmed) {
            tokens.push(trimmed.to_string());
        }
        current.clear();
    };
    for ch in lowered.chars() {
        if ch.is_alphabetic() || ch == '\'' {
            current.push(ch);
        } else {
            flush(&mut current, &mut tokens);
        }
    }
    flush(&mut current, &mut tokens);
    tokens
}

/// A vocabulary of ranked words. Word ids are positions in `words`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    words: Vec<String>,
    word_to_id: HashMap<String, usize>,
    doc_frequency: Vec<u32>,
}

impl Vocabulary {
    fn new(entries: Vec<(String, u32)>) -> Self {
        let mut words = Vec::with_capacity(entries.len());
        let mut doc_frequency = Vec::with_capacity(entries.len());
        let mut word_to_id = HashMap::with_capacity(entries.len());
        for (word, df) in entries {
            word_to_id.insert(word.clone(), words.len());
            words.push(word);
            doc_frequency.push(df);
        }
        Vocabulary {
            words,
            word_to_id,
            doc_frequency,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id_of(&self, word: &str) -> Option<usize> {
        self.word_to_id.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn doc_frequency(&self, id: usize) -> u32 {
        self.doc_frequency[id]
    }

    /// Writes one word per line; the line number is the word id.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = String::with_capacity(self.words.len() * 8);
        for w in &self.words {
            out.push_str(w);
            out.push('\n');
        }
        File::create(path)
            .and_then(|mut f| f.write_all(out.as_bytes()))
            .map_err(|e| Error::io(path, e))
    }

    /// Reads a vocabulary saved by [`Vocabulary::save`]. Document
    /// frequencies are not persisted and load as zero.
    pub fn load(path: &Path) -> Result<Self> {
        let mut text = String::new();
        File::open(path)
            .and_then(|mut f| f.read_to_string(&mut text))
            .map_err(|e| Error::io(path, e))?;
        let entries: Vec<(String, u32)> = text
            .lines()
            .filter(|l| !l.is_empty())
            .map(|l| (l.to_string(), 0))
            .collect();
        let vocab = Vocabulary::new(entries);
        if vocab.word_to_id.len() != vocab.words.len() {
            return Err(Error::Malformed(format!(
                "duplicate words in vocabulary file {}",
                path.display()
            )));
        }
        Ok(vocab)
    }
}

/// Builds a vocabulary from cleaned documents: words are ranked by document
/// frequency (descending, ties broken lexicographically) and the band of
/// `target_size` words centered on the median rank is kept. The band drops
/// ceil((V - target) / 2) words from the most-frequent end and the remainder
/// from the least-frequent end; if V <= target everything is kept.
pub fn build_vocabulary(docs: &[Vec<String>], target_size: usize) -> Result<Vocabulary> {
    if target_size == 0 {
        return Err(Error::InvalidArgument(
            "vocabulary target size must be positive".into(),
        ));
    }
    if docs.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot build a vocabulary from zero documents".into(),
        ));
    }

    let mut df: HashMap<&str, u32> = HashMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.iter().map(String::as_str).collect();
        for word in distinct {
            *df.entry(word).or_insert(0) += 1;
        }
    }

    let mut ranked: Vec<(&str, u32)> = df.into_iter().collect();
    ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let v = ranked.len();
    let band = if v <= target_size {
        &ranked[..]
    } else {
        let drop_top = (v - target_size).div_ceil(2);
        &ranked[drop_top..drop_top + target_size]
    };
    Ok(Vocabulary::new(
        band.iter().map(|&(w, f)| (w.to_string(), f)).collect(),
    ))
}

/// A sparse bag-of-words document bound to a vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct BowDocument {
    pub restaurant_id: String,
    pub counts: BTreeMap<usize, u32>,
}

impl BowDocument {
    pub fn total_tokens(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }
}

/// Counts in-vocabulary tokens; out-of-vocabulary tokens are dropped.
pub fn to_bow(tokens: &[String], vocab: &Vocabulary) -> BTreeMap<usize, u32> {
    let mut counts = BTreeMap::new();
    for token in tokens {
        if let Some(id) = vocab.id_of(token) {
            *counts.entry(id).or_insert(0) += 1;
        }
    }
    counts
}

/// A review reduced to its cleaned tokens, still tagged with its business.
#[derive(Debug, Clone)]
pub struct TokenizedReview {
    pub business_id: String,
    pub tokens: Vec<String>,
}

/// Cleans every review in parallel, preserving input order.
pub fn tokenize_reviews(reviews: &[Review], stopwords: &HashSet<String>) -> Vec<TokenizedReview> {
    reviews
        .par_iter()
        .map(|r| TokenizedReview {
            business_id: r.business_id.clone(),
            tokens: clean_text(&r.text, stopwords),
        })
        .collect()
}

/// Per-restaurant documents plus the ids that produced no usable tokens.
#[derive(Debug)]
pub struct RestaurantDocuments {
    pub documents: Vec<BowDocument>,
    pub excluded: Vec<String>,
}

/// Concatenates each restaurant's review tokens into one document and
/// converts it to bag-of-words. Restaurants with zero in-vocabulary tokens
/// (including restaurants with no reviews at all) are excluded and listed.
/// Output follows the business order.
pub fn restaurant_documents(
    businesses: &[Business],
    reviews: &[TokenizedReview],
    vocab: &Vocabulary,
) -> RestaurantDocuments {
    let mut grouped: HashMap<&str, BTreeMap<usize, u32>> = HashMap::new();
    for review in reviews {
        let counts = grouped.entry(review.business_id.as_str()).or_default();
        for token in &review.tokens {
            if let Some(id) = vocab.id_of(token) {
                *counts.entry(id).or_insert(0) += 1;
            }
        }
    }

    let mut documents = Vec::new();
    let mut excluded = Vec::new();
    for business in businesses {
        match grouped.remove(business.id.as_str()) {
            Some(counts) if !counts.is_empty() => documents.push(BowDocument {
                restaurant_id: business.id.clone(),
                counts,
            }),
            _ => excluded.push(business.id.clone()),
        }
    }
    RestaurantDocuments {
        documents,
        excluded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn write_lines(dir: &Path, name: &str, lines: &[&str]) -> std::path::PathBuf {
        let path = dir.join(name);
        let mut f = File::create(&path).unwrap();
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        path
    }

    fn biz_line(id: &str, city: &str) -> String {
        format!(
            r#"{{"business_id":"{id}","name":"n-{id}","latitude":36.1,"longitude":-115.2,"city":"{city}","categories":"Restaurants"}}"#
        )
    }

    #[test]
    fn city_filter_is_case_insensitive_exact() {
        let dir = tempfile::tempdir().unwrap();
        let lines: Vec<String> = vec![
            biz_line("a", "Las Vegas"),
            biz_line("b", "LAS VEGAS"),
            biz_line("c", "las vegas"),
            biz_line("d", "Phoenix"),
            biz_line("e", "North Las Vegas"),
        ];
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let path = write_lines(dir.path(), "business.json", &refs);

        let load = load_businesses(&path, Some("Las Vegas")).unwrap();
        assert_eq!(
            load.businesses.iter().map(|b| b.id.as_str()).collect::<Vec<_>>(),
            ["a", "b", "c"]
        );
        assert_eq!(load.skipped_malformed, 0);

        let all = load_businesses(&path, None).unwrap();
        assert_eq!(all.businesses.len(), 5);
    }

    #[test]
    fn malformed_business_lines_are_counted_and_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let ok = biz_line("a", "Las Vegas");
        let missing_lat = r#"{"business_id":"b","name":"n","longitude":-115.2,"city":"Las Vegas"}"#;
        let bad_lat = r#"{"business_id":"c","name":"n","latitude":999,"longitude":-115.2,"city":"Las Vegas"}"#;
        let not_json = "not json at all";
        let ok2 = biz_line("e", "Las Vegas");
        let path = write_lines(
            dir.path(),
            "business.json",
            &[&ok, missing_lat, bad_lat, not_json, &ok2],
        );

        let load = load_businesses(&path, None).unwrap();
        assert_eq!(load.businesses.len(), 2);
        assert_eq!(load.skipped_malformed, 3);
    }

    #[test]
    fn zero_matches_is_an_empty_result_error() {
        let dir = tempfile::tempdir().unwrap();
        let line = biz_line("a", "Phoenix");
        let path = write_lines(dir.path(), "business.json", &[&line]);
        let err = load_businesses(&path, Some("Las Vegas")).unwrap_err();
        assert!(matches!(err, Error::EmptyResult(_)), "got {err:?}");
    }

    #[test]
    fn missing_file_is_io_error_with_path() {
        let err = load_businesses(Path::new("/nonexistent/business.json"), None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("/nonexistent/business.json"), "got {msg}");
    }

    #[test]
    fn reviews_join_against_known_ids_and_drop_empty_text() {
        let dir = tempfile::tempdir().unwrap();
        let mut lines = Vec::new();
        for i in 0..10 {
            let id = if i < 6 { "known" } else { "unknown" };
            lines.push(format!(
                r#"{{"business_id":"{id}","text":"review {i}","stars":4,"date":"2015-01-0{}"}}"#,
                i % 9 + 1
            ));
        }
        lines.push(r#"{"business_id":"known","text":"   "}"#.to_string());
        lines.push(r#"{"business_id":"known"}"#.to_string());
        let refs: Vec<&str> = lines.iter().map(String::as_str).collect();
        let path = write_lines(dir.path(), "review.json", &refs);

        let ids: HashSet<String> = ["known".to_string()].into_iter().collect();
        let load = load_reviews(&path, &ids).unwrap();
        assert_eq!(load.reviews.len(), 6);
        assert_eq!(load.skipped_empty_text, 1);
        assert_eq!(load.skipped_malformed, 1);
        assert!(load.reviews.iter().all(|r| r.business_id == "known"));
    }

    #[test]
    fn empty_review_file_loads_as_empty_list() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_lines(dir.path(), "review.json", &[]);
        let ids: HashSet<String> = ["x".to_string()].into_iter().collect();
        let load = load_reviews(&path, &ids).unwrap();
        assert!(load.reviews.is_empty());
    }

    #[test]
    fn clean_text_strips_punctuation_numbers_and_stopwords() {
        let stop: HashSet<String> = ["the".to_string()].into_iter().collect();
        assert_eq!(
            clean_text("The BEST tacos, 10/10!!", &stop),
            ["best", "tacos"]
        );
    }

    #[test]
    fn clean_text_keeps_internal_apostrophes() {
        let stop = HashSet::new();
        assert_eq!(
            clean_text("Roberto's #1 carne asada.", &stop),
            ["roberto's", "carne", "asada"]
        );
        // quoting apostrophes are edge characters, not internal
        assert_eq!(clean_text("'quoted' text", &stop), ["quoted", "text"]);
    }

    #[test]
    fn clean_text_empty_input() {
        assert_eq!(clean_text("", &HashSet::new()), Vec::<String>::new());
    }

    #[test]
    fn vocabulary_band_centers_on_median_rank() {
        // doc frequencies 9,8,7,6,5,4,3 for words a..g
        let mut docs = Vec::new();
        let words = ["a", "b", "c", "d", "e", "f", "g"];
        for (i, w) in words.iter().enumerate() {
            let freq = 9 - i; // word appears in `freq` distinct docs
            for d in 0..freq {
                if docs.len() <= d {
                    docs.push(Vec::new());
                }
                docs[d].push(w.to_string());
            }
        }
        let vocab = build_vocabulary(&docs, 3).unwrap();
        assert_eq!(vocab.words(), ["c", "d", "e"]);
        assert_eq!(vocab.doc_frequency(0), 7);
        assert_eq!(vocab.doc_frequency(2), 5);
    }

    #[test]
    fn vocabulary_keeps_all_when_target_exceeds_v() {
        let docs = vec![vec![
            "a".to_string(),
            "b".to_string(),
            "c".to_string(),
            "d".to_string(),
            "e".to_string(),
        ]];
        let vocab = build_vocabulary(&docs, 10).unwrap();
        assert_eq!(vocab.len(), 5);
    }

    #[test]
    fn vocabulary_rejects_zero_target() {
        let docs = vec![vec!["a".to_string()]];
        assert!(matches!(
            build_vocabulary(&docs, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn vocabulary_ties_break_lexicographically() {
        let docs = vec![
            vec!["zebra".to_string(), "apple".to_string()],
            vec!["zebra".to_string(), "apple".to_string(), "mango".to_string()],
        ];
        let vocab = build_vocabulary(&docs, 3).unwrap();
        assert_eq!(vocab.words(), ["apple", "zebra", "mango"]);
    }

    #[test]
    fn to_bow_counts_in_vocabulary_tokens() {
        let docs = vec![vec!["tacos".to_string(), "salsa".to_string()]];
        let vocab = build_vocabulary(&docs, 10).unwrap();
        let tokens = vec!["tacos".to_string(), "tacos".to_string(), "salsa".to_string()];
        let counts = to_bow(&tokens, &vocab);
        assert_eq!(counts.get(&vocab.id_of("tacos").unwrap()), Some(&2));
        assert_eq!(counts.get(&vocab.id_of("salsa").unwrap()), Some(&1));

        assert!(to_bow(&["zzz".to_string()], &vocab).is_empty());
        assert!(to_bow(&[], &vocab).is_empty());
    }

    #[test]
    fn restaurant_documents_concatenate_reviews() {
        let businesses = vec![
            Business {
                id: "r1".into(),
                name: "Pho Spot".into(),
                latitude: 36.0,
                longitude: -115.0,
                city: "Las Vegas".into(),
            },
            Business {
                id: "r2".into(),
                name: "No Reviews".into(),
                latitude: 36.0,
                longitude: -115.0,
                city: "Las Vegas".into(),
            },
        ];
        let docs = vec![vec!["pho".to_string(), "broth".to_string()]];
        let vocab = build_vocabulary(&docs, 10).unwrap();
        let tokenized = vec![
            TokenizedReview {
                business_id: "r1".into(),
                tokens: vec!["pho".to_string()],
            },
            TokenizedReview {
                business_id: "r1".into(),
                tokens: vec!["pho".to_string(), "broth".to_string()],
            },
        ];
        let result = restaurant_documents(&businesses, &tokenized, &vocab);
        assert_eq!(result.documents.len(), 1);
        let doc = &result.documents[0];
        assert_eq!(doc.restaurant_id, "r1");
        assert_eq!(doc.counts.get(&vocab.id_of("pho").unwrap()), Some(&2));
        assert_eq!(doc.counts.get(&vocab.id_of("broth").unwrap()), Some(&1));
        assert_eq!(result.excluded, ["r2"]);
    }

    #[test]
    fn stopword_parsing_ignores_comments_and_blanks() {
        let set = parse_stopwords("# header\n\nthe\nand \n# tail\nOf\n");
        assert_eq!(set.len(), 3);
        assert!(set.contains("the") && set.contains("and") && set.contains("of"));
    }

    #[test]
    fn bundled_stopword_list_has_318_words() {
        let set = default_stopwords();
        assert_eq!(set.len(), 318);
        assert!(set.contains("the"));
        assert!(set.contains("whereupon"));
    }

    #[test]
    fn vocabulary_round_trips_through_file() {
        let docs = vec![vec!["pho".to_string(), "broth".to_string(), "noodle".to_string()]];
        let vocab = build_vocabulary(&docs, 10).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocabulary.txt");
        vocab.save(&path).unwrap();
        let loaded = Vocabulary::load(&path).unwrap();
        assert_eq!(loaded.words(), vocab.words());
        assert_eq!(loaded.id_of("pho"), vocab.id_of("pho"));
    }

    #[test]
    fn ingestion_is_deterministic() {
        let docs: Vec<Vec<String>> = (0..50)
            .map(|i| {
                (0..20)
                    .map(|j| format!("w{}", (i * 7 + j * 13) % 30))
                    .collect()
            })
            .collect();
        let a = build_vocabulary(&docs, 20).unwrap();
        let b = build_vocabulary(&docs, 20).unwrap();
        assert_eq!(a.words(), b.words());
    }

    proptest! {
        #[test]
        fn clean_text_is_idempotent(raw in ".{0,200}") {
            let stop = default_stopwords();
            let once = clean_text(&raw, &stop);
            let rejoined = once.join(" ");
            let twice = clean_text(&rejoined, &stop);
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn vocabulary_size_is_min_of_v_and_target(
            seed in 0u64..1000,
            target in 1usize..40,
        ) {
            let n_words = (seed % 25 + 1) as usize;
            let docs: Vec<Vec<String>> = (0..10)
                .map(|d| {
                    (0..n_words)
                        .filter(|w| (seed + d * 31 + *w as u64 * 17) % 3 != 0)
                        .map(|w| format!("word{w}"))
                        .collect()
                })
                .collect();
            let distinct: HashSet<&String> = docs.iter().flatten().collect();
            prop_assume!(!distinct.is_empty());
            let vocab = build_vocabulary(&docs, target).unwrap();
            prop_assert_eq!(vocab.len(), distinct.len().min(target));
        }

        #[test]
        fn bow_total_equals_in_vocabulary_token_count(tokens_seed in 0u64..500) {
            let tokens: Vec<String> = (0..30)
                .map(|i| format!("t{}", (tokens_seed + i * 11) % 12))
                .collect();
            let docs = vec![(0..8).map(|i| format!("t{i}")).collect::<Vec<_>>()];
            let vocab = build_vocabulary(&docs, 100).unwrap();
            let counts = to_bow(&tokens, &vocab);
            let total: u64 = counts.values().map(|&c| u64::from(c)).sum();
            let expected = tokens.iter().filter(|t| vocab.id_of(t).is_some()).count() as u64;
            prop_assert_eq!(total, expected);
        }
    }
}
