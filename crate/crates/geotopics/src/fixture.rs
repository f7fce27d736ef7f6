//! Generates the bundled synthetic city: eight themed restaurant
//! districts planted on a ring, with reviews sampled from a known topic
//! model so the whole pipeline has a ground truth to recover.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::features::MILES_PER_DEGREE;

pub const FIXTURE_CITY: &str = "Arcadia";
pub const FIXTURE_ORIGIN: (f64, f64) = (40.0, -100.0);
pub const FIXTURE_DISTRICTS: usize = 8;
pub const FIXTURE_PER_DISTRICT: usize = 25;
/// Ring radius the district centers sit on, miles from the city origin.
const RING_RADIUS_MILES: f64 = 4.0;
/// Spatial spread of restaurants around their district center, miles.
const DISTRICT_SIGMA_MILES: f64 = 0.35;
/// Share of a district's topic mixture on its own theme.
const THEME_WEIGHT: f64 = 0.8;
/// Dirichlet concentration for per-review jitter around the district mix.
const REVIEW_CONCENTRATION: f64 = 50.0;

pub struct DistrictTheme {
    pub name: &'static str,
    pub words: &'static [&'static str],
}

/// Theme vocabularies are disjoint across districts; the shared background
/// words below carry the remaining probability mass in every topic.
pub const DISTRICT_THEMES: [DistrictTheme; FIXTURE_DISTRICTS] = [
    DistrictTheme {
        name: "pho",
        words: &[
            "pho", "broth", "noodle", "vietnamese", "basil", "flank", "sprouts", "hoisin",
            "lime", "tripe", "banh", "vermicelli", "lemongrass", "oxtail", "spring",
        ],
    },
    DistrictTheme {
        name: "tacos",
        words: &[
            "taco", "tacos", "salsa", "carnitas", "tortilla", "asada", "guacamole", "cilantro",
            "barbacoa", "elote", "queso", "jalapeno", "pastor", "churro", "horchata",
        ],
    },
    DistrictTheme {
        name: "pizza",
        words: &[
            "pizza", "crust", "pepperoni", "mozzarella", "slice", "marinara", "calzone", "oven",
            "dough", "oregano", "margherita", "sicilian", "garlic", "knots", "antipasto",
        ],
    },
    DistrictTheme {
        name: "sushi",
        words: &[
            "sushi", "sashimi", "nigiri", "roll", "rolls", "tuna", "salmon", "wasabi",
            "tempura", "miso", "unagi", "hamachi", "omakase", "seaweed", "ginger",
        ],
    },
    DistrictTheme {
        name: "bbq",
        words: &[
            "bbq", "ribs", "smoked", "pulled", "barbecue", "sauce", "cornbread", "coleslaw",
            "smoky", "sausage", "pit", "mesquite", "burnt", "brisket", "slab",
        ],
    },
    DistrictTheme {
        name: "vegan",
        words: &[
            "vegan", "tofu", "kale", "quinoa", "vegetarian", "plant", "beet", "hummus",
            "lentil", "smoothie", "avocado", "sprouted", "tempeh", "falafel", "grain",
        ],
    },
    DistrictTheme {
        name: "dessert",
        words: &[
            "dessert", "chocolate", "cake", "gelato", "pastry", "macaron", "custard",
            "caramel", "frosting", "cookie", "sundae", "waffle", "crepe", "tiramisu",
            "pudding",
        ],
    },
    DistrictTheme {
        name: "seafood",
        words: &[
            "seafood", "oyster", "crab", "lobster", "shrimp", "clam", "chowder", "scallop",
            "mussels", "grilled", "catch", "halibut", "cod", "calamari", "tilapia",
        ],
    },
];

/// Words every topic emits with small probability.
pub const BACKGROUND_WORDS: [&str; 16] = [
    "food", "menu", "service", "staff", "friendly", "delicious", "tasty", "wait", "table",
    "order", "meal", "dinner", "lunch", "flavor", "fresh", "spot",
];

const NAME_SUFFIXES: [&str; 5] = ["House", "Kitchen", "Corner", "Garden", "Express"];

pub struct Fixture {
    /// One JSON object per line, Yelp business schema.
    pub businesses_jsonl: String,
    /// One JSON object per line, Yelp review schema.
    pub reviews_jsonl: String,
    /// Ground truth: business_id,district_id,theme,center_lat,center_lon.
    pub districts_csv: String,
}

fn mile_offset_to_lat_lon(x: f64, y: f64) -> (f64, f64) {
    let (lat0, lon0) = FIXTURE_ORIGIN;
    (
        lat0 + y / MILES_PER_DEGREE,
        lon0 + x / (MILES_PER_DEGREE * lat0.to_radians().cos()),
    )
}

/// Per-topic word CDFs: THEME_WEIGHT on the theme's own words with
/// harmonically decaying weights, the rest uniform over the background.
fn topic_word_cdfs() -> Vec<Vec<f64>> {
    let theme_count: usize = DISTRICT_THEMES.iter().map(|t| t.words.len()).sum();
    let vocab_size = theme_count + BACKGROUND_WORDS.len();
    let mut offsets = Vec::with_capacity(FIXTURE_DISTRICTS);
    let mut offset = 0;
    for theme in &DISTRICT_THEMES {
        offsets.push(offset);
        offset += theme.words.len();
    }

    DISTRICT_THEMES
        .iter()
        .enumerate()
        .map(|(d, theme)| {
            let mut probs = vec![0.0; vocab_size];
            let harmonic: f64 = (0..theme.words.len()).map(|i| 1.0 / (i + 1) as f64).sum();
            for (i, _) in theme.words.iter().enumerate() {
                probs[offsets[d] + i] = THEME_WEIGHT / ((i + 1) as f64 * harmonic);
            }
            let bg = (1.0 - THEME_WEIGHT) / BACKGROUND_WORDS.len() as f64;
            for j in 0..BACKGROUND_WORDS.len() {
                probs[theme_count + j] = bg;
            }
            let mut acc = 0.0;
            probs
                .iter()
                .map(|&p| {
                    acc += p;
                    acc
                })
                .collect()
        })
        .collect()
}

fn fixture_word(index: usize) -> &'static str {
    let mut rest = index;
    for theme in &DISTRICT_THEMES {
        if rest < theme.words.len() {
            return theme.words[rest];
        }
        rest -= theme.words.len();
    }
    BACKGROUND_WORDS[rest]
}

fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf[cdf.len() - 1];
    cdf.partition_point(|&acc| acc < target).min(cdf.len() - 1)
}

/// Dirichlet(concentration * mix) draw via per-coordinate Gamma draws.
fn sample_mix(rng: &mut ChaCha8Rng, mix: &[f64]) -> Vec<f64> {
    let mut draw: Vec<f64> = mix
        .iter()
        .map(|&m| {
            let shape = (REVIEW_CONCENTRATION * m).max(1e-3);
            Gamma::new(shape, 1.0).expect("valid gamma").sample(rng)
        })
        .collect();
    let total: f64 = draw.iter().sum();
    if total > 0.0 && total.is_finite() {
        for v in &mut draw {
            *v /= total;
        }
        draw
    } else {
        mix.to_vec()
    }
}

fn review_text(rng: &mut ChaCha8Rng, cdfs: &[Vec<f64>], mix: &[f64]) -> String {
    let theta = sample_mix(rng, mix);
    let mut theta_cdf = Vec::with_capacity(theta.len());
    let mut acc = 0.0;
    for &t in &theta {
        acc += t;
        theta_cdf.push(acc);
    }
    let len = 40 + rng.random_range(0..31);
    let mut sentences: Vec<String> = Vec::new();
    let mut sentence: Vec<&str> = Vec::new();
    let mut sentence_len = 7 + rng.random_range(0..6);
    for _ in 0..len {
        let topic = sample_cdf(&theta_cdf, rng.random::<f64>());
        let word = fixture_word(sample_cdf(&cdfs[topic], rng.random::<f64>()));
        sentence.push(word);
        if sentence.len() >= sentence_len {
            sentences.push(finish_sentence(&sentence));
            sentence.clear();
            sentence_len = 7 + rng.random_range(0..6);
        }
    }
    if !sentence.is_empty() {
        sentences.push(finish_sentence(&sentence));
    }
    sentences.join(" ")
}

fn finish_sentence(words: &[&str]) -> String {
    let mut s = words.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

fn title_case(word: &str) -> String {
    let mut s = word.to_string();
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s
}

/// Deterministically builds the complete fixture city for the given seed.
pub fn generate_fixture(seed: u64) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cdfs = topic_word_cdfs();

    let mut businesses = String::new();
    let mut reviews = String::new();
    let mut districts = String::from("business_id,district_id,theme,center_lat,center_lon\n");

    for (d, theme) in DISTRICT_THEMES.iter().enumerate() {
        let angle = (d as f64) * std::f64::consts::TAU / FIXTURE_DISTRICTS as f64;
        let center_x = RING_RADIUS_MILES * angle.cos();
        let center_y = RING_RADIUS_MILES * angle.sin();
        let (center_lat, center_lon) = mile_offset_to_lat_lon(center_x, center_y);

        let mut mix = vec![(1.0 - THEME_WEIGHT) / (FIXTURE_DISTRICTS - 1) as f64; FIXTURE_DISTRICTS];
        mix[d] = THEME_WEIGHT;

        for i in 0..FIXTURE_PER_DISTRICT {
            let id = format!("arc-{}-{i:02}", theme.name);
            let dx: f64 = StandardNormal.sample(&mut rng);
            let dy: f64 = StandardNormal.sample(&mut rng);
            let (lat, lon) = mile_offset_to_lat_lon(
                center_x + DISTRICT_SIGMA_MILES * dx,
                center_y + DISTRICT_SIGMA_MILES * dy,
            );
            let name = format!(
                "{} {} {}",
                title_case(theme.name),
                NAME_SUFFIXES[i % NAME_SUFFIXES.len()],
                i + 1
            );
            businesses.push_str(
                &serde_json::json!({
                    "business_id": id,
                    "name": name,
                    "latitude": lat,
                    "longitude": lon,
                    "city": FIXTURE_CITY,
                })
                .to_string(),
            );
            businesses.push('\n');
            districts.push_str(&format!(
                "{id},{d},{},{center_lat},{center_lon}\n",
                theme.name
            ));

            let n_reviews = 5 + rng.random_range(0..5);
            for _ in 0..n_reviews {
                let text = review_text(&mut rng, &cdfs, &mix);
                let stars = 3 + rng.random_range(0..3u8);
                let date = format!(
                    "2025-{:02}-{:02}",
                    1 + rng.random_range(0..12),
                    1 + rng.random_range(0..28)
                );
                reviews.push_str(
                    &serde_json::json!({
                        "business_id": id,
                        "text": text,
                        "stars": stars,
                        "date": date,
                    })
                    .to_string(),
                );
                reviews.push('\n');
            }
        }
    }

    // two out-of-city rows exercise the city filter
    for (i, town) in ["Elsewhere", "Elsewhere"].iter().enumerate() {
        let id = format!("far-away-{i}");
        businesses.push_str(
            &serde_json::json!({
                "business_id": id,
                "name": format!("Roadside Diner {}", i + 1),
                "latitude": 41.5,
                "longitude": -101.5,
                "city": town,
            })
            .to_string(),
        );
        businesses.push('\n');
        reviews.push_str(
            &serde_json::json!({
                "business_id": id,
                "text": "Fine food off the highway. Friendly staff and a short wait.",
                "stars": 4,
                "date": "2025-06-15",
            })
            .to_string(),
        );
        reviews.push('\n');
    }

    Fixture {
        businesses_jsonl: businesses,
        reviews_jsonl: reviews,
        districts_csv: districts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn theme_vocabularies_are_disjoint_and_not_stopwords() {
        let stops = crate::corpus::default_stopwords();
        let mut seen: HashSet<&str> = HashSet::new();
        for theme in &DISTRICT_THEMES {
            for &w in theme.words {
                assert!(seen.insert(w), "duplicate theme word {w}");
                assert!(!stops.contains(w), "theme word {w} is a stopword");
                assert!(w.chars().all(|c| c.is_ascii_lowercase()));
            }
        }
        for &w in &BACKGROUND_WORDS {
            assert!(seen.insert(w), "background word {w} collides");
            assert!(!stops.contains(w), "background word {w} is a stopword");
        }
    }

    #[test]
    fn generation_is_deterministic_and_well_shaped() {
        let a = generate_fixture(42);
        let b = generate_fixture(42);
        assert_eq!(a.businesses_jsonl, b.businesses_jsonl);
        assert_eq!(a.reviews_jsonl, b.reviews_jsonl);
        assert_eq!(a.districts_csv, b.districts_csv);

        let business_lines = a.businesses_jsonl.lines().count();
        assert_eq!(
            business_lines,
            FIXTURE_DISTRICTS * FIXTURE_PER_DISTRICT + 2
        );
        let truth_lines = a.districts_csv.lines().count();
        assert_eq!(truth_lines, 1 + FIXTURE_DISTRICTS * FIXTURE_PER_DISTRICT);
        for line in a.businesses_jsonl.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v["business_id"].is_string());
            assert!(v["latitude"].is_f64());
        }
        let review_count = a.reviews_jsonl.lines().count();
        assert!(review_count >= FIXTURE_DISTRICTS * FIXTURE_PER_DISTRICT * 5);
    }

    #[test]
    fn reviews_lean_heavily_on_their_district_theme() {
        let fixture = generate_fixture(42);
        let theme_sets: Vec<HashSet<&str>> = DISTRICT_THEMES
            .iter()
            .map(|t| t.words.iter().copied().collect())
            .collect();
        let mut own = vec![0usize; FIXTURE_DISTRICTS];
        let mut other = vec![0usize; FIXTURE_DISTRICTS];
        for line in fixture.reviews_jsonl.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            let id = v["business_id"].as_str().unwrap();
            let Some(district) = DISTRICT_THEMES
                .iter()
                .position(|t| id.contains(&format!("-{}-", t.name)))
            else {
                continue;
            };
            for token in v["text"].as_str().unwrap().split_whitespace() {
                let token = token.trim_end_matches('.').to_ascii_lowercase();
                for (d, set) in theme_sets.iter().enumerate() {
                    if set.contains(token.as_str()) {
                        if d == district {
                            own[district] += 1;
                        } else {
                            other[district] += 1;
                        }
                    }
                }
            }
        }
        for d in 0..FIXTURE_DISTRICTS {
            let total = (own[d] + other[d]) as f64;
            assert!(total > 0.0);
            // with a 0.8 own-theme mixture both sides emit theme words at
            // the same 0.8 rate, so the expected share is 0.8
            let share = own[d] as f64 / total;
            assert!(
                (0.75..0.85).contains(&share),
                "district {d} own-theme share {share:.3} off target"
            );
        }
    }

    #[test]
    fn districts_sit_on_the_ring_three_miles_apart() {
        let fixture = generate_fixture(42);
        let mut centers: Vec<(f64, f64)> = Vec::new();
        for line in fixture.districts_csv.lines().skip(1) {
            let fields: Vec<&str> = line.split(',').collect();
            let lat: f64 = fields[3].parse().unwrap();
            let lon: f64 = fields[4].parse().unwrap();
            if !centers.contains(&(lat, lon)) {
                centers.push((lat, lon));
            }
        }
        assert_eq!(centers.len(), FIXTURE_DISTRICTS);
        for w in centers.windows(2) {
            let a = crate::features::project(w[0].0, w[0].1, FIXTURE_ORIGIN);
            let b = crate::features::project(w[1].0, w[1].1, FIXTURE_ORIGIN);
            let d = ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt();
            assert!((2.5..3.5).contains(&d), "adjacent centers {d:.2} miles apart");
        }
    }
}
