//! Resolved pipeline configuration and the flat key=value config file.
//!
//! Precedence is command-line flag over config-file key over built-in
//! default. Every flag has a config twin under the same name.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use geotopics::{Error, Result};

pub const DEFAULT_TOPICS: usize = 50;
pub const DEFAULT_SCALE: f64 = 0.913;
pub const DEFAULT_CLUSTERS: usize = 30;
pub const DEFAULT_GRID: usize = 20;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_VOCAB: usize = 40_000;
pub const DEFAULT_REFS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Kmeans,
    Gmm,
    Both,
}

impl Method {
    pub fn runs_kmeans(self) -> bool {
        matches!(self, Method::Kmeans | Method::Both)
    }

    pub fn runs_gmm(self) -> bool {
        matches!(self, Method::Gmm | Method::Both)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Kmeans => "kmeans",
            Method::Gmm => "gmm",
            Method::Both => "both",
        };
        f.write_str(s)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kmeans" => Ok(Method::Kmeans),
            "gmm" => Ok(Method::Gmm),
            "both" => Ok(Method::Both),
            other => Err(Error::InvalidArgument(format!(
                "method must be kmeans, gmm, or both, got '{other}'"
            ))),
        }
    }
}

/// Fixed cluster count or gap-statistic selection over a range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClustersChoice {
    Fixed(usize),
    Auto,
}

impl fmt::Display for ClustersChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClustersChoice::Fixed(c) => write!(f, "{c}"),
            ClustersChoice::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for ClustersChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClustersChoice> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ClustersChoice::Auto);
        }
        let c: usize = s.parse().map_err(|_| {
            Error::InvalidArgument(format!(
                "clusters must be a positive integer or 'auto', got '{s}'"
            ))
        })?;
        if c == 0 {
            return Err(Error::InvalidArgument(
                "clusters must be at least 1".into(),
            ));
        }
        Ok(ClustersChoice::Fixed(c))
    }
}

/// Parses an inclusive cluster-count range written as `lo:hi`.
pub fn parse_range(s: &str) -> Result<(usize, usize)> {
    let bad = || {
        Error::InvalidArgument(format!(
            "range must look like 'lo:hi' with 1 <= lo <= hi, got '{s}'"
        ))
    };
    let (lo, hi) = s.trim().split_once(':').ok_or_else(bad)?;
    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
    if lo < 1 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

/// Every knob of the pipeline after merging defaults, config file, and
/// flags. Paths stay optional here; each subcommand demands the ones it
/// needs via [`require`].
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub business: Option<PathBuf>,
    pub review: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub city: Option<String>,
    pub target: Option<String>,
    pub topics: usize,
    pub scale: f64,
    pub clusters: ClustersChoice,
    pub grid: usize,
    pub seed: u64,
    pub vocab: usize,
    pub method: Method,
    pub range: Option<(usize, usize)>,
    pub refs: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub passes: usize,
    pub minibatch: usize,
    pub kappa: f64,
    pub tau0: f64,
    pub threads: Option<usize>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            business: None,
            review: None,
            stopwords: None,
            labels: None,
            model: None,
            out: None,
            city: None,
            target: None,
            topics: DEFAULT_TOPICS,
            scale: DEFAULT_SCALE,
            clusters: ClustersChoice::Fixed(DEFAULT_CLUSTERS),
            grid: DEFAULT_GRID,
            seed: DEFAULT_SEED,
            vocab: DEFAULT_VOCAB,
            method: Method::Both,
            range: None,
            refs: DEFAULT_REFS,
            alpha: None,
            beta: None,
            passes: 1,
            minibatch: 256,
            kappa: 0.7,
            tau0: 1024.0,
            threads: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| {
        Error::InvalidArgument(format!("invalid value for '{key}': '{v}' ({e})"))
    })
}

impl PipelineConfig {
    /// Builds a config from a parsed key=value map. Unknown keys are
    /// rejected so typos fail loudly instead of silently using a default.
    pub fn from_file_map(map: &BTreeMap<String, String>) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        for (key, v) in map {
            match key.as_str() {
                "business" => cfg.business = Some(PathBuf::from(v)),
                "review" => cfg.review = Some(PathBuf::from(v)),
                "stopwords" => cfg.stopwords = Some(PathBuf::from(v)),
                "labels" => cfg.labels = Some(PathBuf::from(v)),
                "model" => cfg.model = Some(PathBuf::from(v)),
                "out" => cfg.out = Some(PathBuf::from(v)),
                "city" => cfg.city = Some(v.clone()),
                "target" => cfg.target = Some(v.clone()),
                "topics" => cfg.topics = parse_num(key, v)?,
                "scale" => cfg.scale = parse_num(key, v)?,
                "clusters" => cfg.clusters = v.parse()?,
                "grid" => cfg.grid = parse_num(key, v)?,
                "seed" => cfg.seed = parse_num(key, v)?,
                "vocab" => cfg.vocab = parse_num(key, v)?,
                "method" => cfg.method = v.parse()?,
                "range" => cfg.range = Some(parse_range(v)?),
                "refs" => cfg.refs = parse_num(key, v)?,
                "alpha" => cfg.alpha = Some(parse_num(key, v)?),
                "beta" => cfg.beta = Some(parse_num(key, v)?),
                "passes" => cfg.passes = parse_num(key, v)?,
                "minibatch" => cfg.minibatch = parse_num(key, v)?,
                "kappa" => cfg.kappa = parse_num(key, v)?,
                "tau0" => cfg.tau0 = parse_num(key, v)?,
                "threads" => cfg.threads = Some(parse_num(key, v)?),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown config key '{other}'"
                    )))
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.clusters == ClustersChoice::Auto && self.range.is_none() {
            return Err(Error::InvalidArgument(
                "--clusters auto requires --range lo:hi".into(),
            ));
        }
        if !self.scale.is_finite() || self.scale <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "scale must be a positive finite number, got {}",
                self.scale
            )));
        }
        if self.grid == 0 {
            return Err(Error::InvalidArgument("grid must be at least 1".into()));
        }
        if self.refs == 0 {
            return Err(Error::InvalidArgument("refs must be at least 1".into()));
        }
        if self.vocab == 0 {
            return Err(Error::InvalidArgument("vocab must be at least 1".into()));
        }
        Ok(())
    }

    /// The manifest's record of what this run actually used.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        if let Some(p) = &self.business {
            put("business", p.display().to_string());
        }
        if let Some(p) = &self.review {
            put("review", p.display().to_string());
        }
        if let Some(p) = &self.stopwords {
            put("stopwords", p.display().to_string());
        }
        if let Some(p) = &self.labels {
            put("labels", p.display().to_string());
        }
        if let Some(p) = &self.model {
            put("model", p.display().to_string());
        }
        if let Some(p) = &self.out {
            put("out", p.display().to_string());
        }
        if let Some(c) = &self.city {
            put("city", c.clone());
        }
        if let Some(t) = &self.target {
            put("target", t.clone());
        }
        put("topics", self.topics.to_string());
        put("scale", self.scale.to_string());
        put("clusters", self.clusters.to_string());
        put("grid", self.grid.to_string());
        put("seed", self.seed.to_string());
        put("vocab", self.vocab.to_string());
        put("method", self.method.to_string());
        if let Some((lo, hi)) = self.range {
            put("range", format!("{lo}:{hi}"));
        }
        put("refs", self.refs.to_string());
        if let Some(a) = self.alpha {
            put("alpha", a.to_string());
        }
        if let Some(b) = self.beta {
            put("beta", b.to_string());
        }
        put("passes", self.passes.to_string());
        put("minibatch", self.minibatch.to_string());
        put("kappa", self.kappa.to_string());
        put("tau0", self.tau0.to_string());
        if let Some(t) = self.threads {
            put("threads", t.to_string());
        }
        m
    }
}

/// Parses a flat key=value config file. Blank lines and `#` comments are
/// skipped; duplicate keys are an error.
pub fn parse_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Malformed(format!(
                "{}:{}: expected key=value, got '{line}'",
                path.display(),
                idx + 1
            )));
        };
        let key = k.trim().to_ascii_lowercase();
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::Malformed(format!(
                "{}:{}: duplicate key '{key}'",
                path.display(),
                idx + 1
            )));
        }
    }
    Ok(map)
}

/// Demands a value that may come from either a flag or a config key.
pub fn require<'a, T>(value: &'a Option<T>, name: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "missing required value: pass --{name} or set '{name}' in the config file"
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_round_trip_with_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(
            &path,
            "# pipeline\ncity = Las Vegas\ntopics = 10\nclusters=auto\nrange = 4:12\n\nscale=0.5\n",
        )
        .unwrap();
        let map = parse_config_file(&path).unwrap();
        let cfg = PipelineConfig::from_file_map(&map).unwrap();
        assert_eq!(cfg.city.as_deref(), Some("Las Vegas"));
        assert_eq!(cfg.topics, 10);
        assert_eq!(cfg.clusters, ClustersChoice::Auto);
        assert_eq!(cfg.range, Some((4, 12)));
        assert_eq!(cfg.scale, 0.5);
        assert_eq!(cfg.seed, DEFAULT_SEED);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        let mut map = BTreeMap::new();
        map.insert("topcis".to_string(), "10".to_string());
        assert!(PipelineConfig::from_file_map(&map).is_err());

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("dup.conf");
        fs::write(&path, "seed=1\nseed=2\n").unwrap();
        assert!(parse_config_file(&path).is_err());
    }

    #[test]
    fn auto_without_range_fails_validation() {
        let cfg = PipelineConfig {
            clusters: ClustersChoice::Auto,
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("5:35").unwrap(), (5, 35));
        assert_eq!(parse_range(" 4 : 12 ").unwrap(), (4, 12));
        assert!(parse_range("12:4").is_err());
        assert!(parse_range("0:4").is_err());
        assert!(parse_range("4").is_err());
    }

    #[test]
    fn clusters_and_method_parsing() {
        assert_eq!("30".parse::<ClustersChoice>().unwrap(), ClustersChoice::Fixed(30));
        assert_eq!("AUTO".parse::<ClustersChoice>().unwrap(), ClustersChoice::Auto);
        assert!("0".parse::<ClustersChoice>().is_err());
        assert!("many".parse::<ClustersChoice>().is_err());
        assert_eq!("both".parse::<Method>().unwrap(), Method::Both);
        assert!(Method::from_str("kmedoids").is_err());
        assert!(Method::Both.runs_kmeans() && Method::Both.runs_gmm());
        assert!(!Method::Gmm.runs_kmeans());
    }
}
