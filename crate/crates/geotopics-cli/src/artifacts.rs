//! On-disk artifact names and the small sidecar files that let `cluster`,
//! `heatmap`, and `gap` run from a model directory without the raw corpus.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use geotopics::{Error, Result};

pub const FEATURES_FILE: &str = "features.csv";
pub const RESTAURANTS_FILE: &str = "restaurants.jsonl";
pub const CITY_FILE: &str = "city.json";
pub const TOPIC_WORDS_FILE: &str = "topic_words.txt";
pub const GAP_REPORT_FILE: &str = "gap_report.csv";
pub const HEATMAP_CSV_FILE: &str = "heatmap.csv";
pub const HEATMAP_SVG_FILE: &str = "heatmap.svg";

/// One restaurant as it appeared in the input, kept for GeoJSON export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestaurantRecord {
    pub business_id: String,
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    pub review_count: usize,
}

/// City-level facts shared by every downstream command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CityInfo {
    pub city: String,
    /// Projection origin: the mean latitude/longitude of the city's
    /// restaurants. All projected miles are relative to this point.
    pub origin_lat: f64,
    pub origin_lon: f64,
    pub restaurants: usize,
    /// Per-topic column sums of the raw inferred topic matrix, recorded so
    /// a novel query distribution can be projected into the same
    /// background-flattened space the stored features live in.
    pub column_sums: Vec<f64>,
    /// Restaurants dropped for having no usable review tokens.
    pub excluded: Vec<String>,
}

impl CityInfo {
    pub fn origin(&self) -> (f64, f64) {
        (self.origin_lat, self.origin_lon)
    }
}

pub fn write_restaurants(path: &Path, records: &[RestaurantRecord]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r)
            .map_err(|e| Error::Malformed(format!("restaurant record: {e}")))?;
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_restaurants(path: &Path) -> Result<BTreeMap<String, RestaurantRecord>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut map = BTreeMap::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RestaurantRecord = serde_json::from_str(&line).map_err(|e| {
            Error::Malformed(format!("{}:{}: {e}", path.display(), idx + 1))
        })?;
        map.insert(record.business_id.clone(), record);
    }
    Ok(map)
}

pub fn write_city(path: &Path, info: &CityInfo) -> Result<()> {
    let body = serde_json::to_string_pretty(info)
        .map_err(|e| Error::Malformed(format!("city info: {e}")))?;
    fs::write(path, body + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_city(path: &Path) -> Result<CityInfo> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}
