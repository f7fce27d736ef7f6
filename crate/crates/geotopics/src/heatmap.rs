//! Gaussian-weighted topic-similarity heatmap: how well a novel
//! restaurant's topic profile matches each square of a city grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::ProjectedPoint;
use crate::topicmodel::TopicDistribution;

/// Offset added to the negated topic distance so every summand stays
/// positive. Twice the simplex diameter, kept as printed in the source
/// formula.
pub const SIM_OFFSET: f64 = 2.0 * std::f64::consts::SQRT_2;

pub const DEFAULT_GRID_CELLS: usize = 20;

/// Square tiling of the padded city bounding box. `n` columns of
/// `square_width` miles each; enough rows to cover the y-extent, so the
/// grid is n x m rather than n x n when the city is not square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    /// (min_x, min_y, max_x, max_y) in projected miles.
    pub bounds: (f64, f64, f64, f64),
    /// Cells per row (columns).
    pub n: usize,
    pub rows: usize,
    /// (max_x - min_x) / n, exactly.
    pub square_width: f64,
}

impl Grid {
    /// Tight bounding box of the positions, padded on every side by one
    /// pre-padding square width (x-extent / n).
    pub fn fit(positions: &[ProjectedPoint], n: usize) -> Result<Grid> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "grid needs at least one cell per side".to_string(),
            ));
        }
        if positions.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot fit a grid to zero positions".to_string(),
            ));
        }
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for p in positions {
            min_x = min_x.min(p.x);
            max_x = max_x.max(p.x);
            min_y = min_y.min(p.y);
            max_y = max_y.max(p.y);
        }
        if !(min_x.is_finite() && max_x.is_finite() && min_y.is_finite() && max_y.is_finite()) {
            return Err(Error::InvalidArgument(
                "positions contain non-finite coordinates".to_string(),
            ));
        }
        let pad = (max_x - min_x) / n as f64;
        if pad <= 0.0 {
            return Err(Error::InvalidArgument(
                "zero x-extent: all positions share one longitude, cannot size grid squares"
                    .to_string(),
            ));
        }
        let min_x = min_x - pad;
        let max_x = max_x + pad;
        let square_width = (max_x - min_x) / n as f64;
        let min_y = min_y - pad;
        let rows = (((max_y + pad) - min_y) / square_width).ceil().max(1.0) as usize;
        let max_y = min_y + rows as f64 * square_width;
        Ok(Grid {
            bounds: (min_x, min_y, max_x, max_y),
            n,
            rows,
            square_width,
        })
    }

    /// Center of the cell at (row, col); row 0 is the southern edge.
    pub fn cell_center(&self, row: usize, col: usize) -> ProjectedPoint {
        ProjectedPoint {
            x: self.bounds.0 + (col as f64 + 0.5) * self.square_width,
            y: self.bounds.1 + (row as f64 + 0.5) * self.square_width,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatCell {
    pub center: ProjectedPoint,
    pub sim: f64,
}

/// The restaurant side of the similarity sum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestaurantTopics {
    pub id: String,
    pub position: ProjectedPoint,
    pub topics: Vec<f64>,
}

/// A restaurant being scored against the city.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NovelQuery {
    pub topics: TopicDistribution,
    /// Removed from the restaurant list before any similarity is computed,
    /// so a known restaurant can be scored against the rest of the city.
    pub exclude_id: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Heatmap {
    pub grid: Grid,
    /// Row-major, rows x n.
    pub cells: Vec<HeatCell>,
    pub min_sim: f64,
    pub max_sim: f64,
}

impl Heatmap {
    pub fn cell(&self, row: usize, col: usize) -> &HeatCell {
        &self.cells[row * self.grid.n + col]
    }
}

/// Euclidean distance between two topic distributions; at most sqrt(2)
/// for simplex inputs.
pub fn topic_distance(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "topic vectors differ in length");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// One-dimensional Gaussian density of the distance between the two
/// points, with sigma = sqrt(2) * square_width.
pub fn gaussian_weight(center: ProjectedPoint, pos: ProjectedPoint, square_width: f64) -> f64 {
    assert!(square_width > 0.0, "square width must be positive");
    let sigma = std::f64::consts::SQRT_2 * square_width;
    let dx = center.x - pos.x;
    let dy = center.y - pos.y;
    let d_sq = dx * dx + dy * dy;
    (-d_sq / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
}

fn validate_simplex(weights: &[f64], what: &str) -> Result<()> {
    if weights.is_empty() {
        return Err(Error::InvalidArgument(format!("{what} has no topics")));
    }
    if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
        return Err(Error::InvalidArgument(format!(
            "{what} has weights outside [0, 1]"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!(
            "{what} is not normalized (sum {sum})"
        )));
    }
    Ok(())
}

fn retained<'r>(
    novel: &NovelQuery,
    restaurants: &'r [RestaurantTopics],
) -> Result<Vec<&'r RestaurantTopics>> {
    validate_simplex(&novel.topics.weights, "novel topic distribution")?;
    let kept: Vec<&RestaurantTopics> = restaurants
        .iter()
        .filter(|r| novel.exclude_id.as_deref() != Some(r.id.as_str()))
        .collect();
    if kept.is_empty() {
        return Err(Error::InvalidArgument(
            "no restaurants left to compare against after exclusion".to_string(),
        ));
    }
    let k = novel.topics.weights.len();
    for r in &kept {
        if r.topics.len() != k {
            return Err(Error::InvalidArgument(format!(
                "restaurant '{}' has {} topics, query has {k}",
                r.id,
                r.topics.len()
            )));
        }
    }
    Ok(kept)
}

fn sim_over(
    center: ProjectedPoint,
    novel_topics: &[f64],
    kept: &[&RestaurantTopics],
    square_width: f64,
) -> f64 {
    let total: f64 = kept
        .iter()
        .map(|r| {
            (SIM_OFFSET - topic_distance(novel_topics, &r.topics))
                * gaussian_weight(center, r.position, square_width)
        })
        .sum();
    total / kept.len() as f64
}

/// Mean positivized topic similarity at one point, distance-weighted by
/// the Gaussian kernel.
pub fn cell_similarity(
    center: ProjectedPoint,
    novel: &NovelQuery,
    restaurants: &[RestaurantTopics],
    square_width: f64,
) -> Result<f64> {
    if !(square_width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "square width must be positive, got {square_width}"
        )));
    }
    let kept = retained(novel, restaurants)?;
    Ok(sim_over(center, &novel.topics.weights, &kept, square_width))
}

/// Evaluates the similarity at every cell center of the grid.
pub fn build_heatmap(
    grid: &Grid,
    novel: &NovelQuery,
    restaurants: &[RestaurantTopics],
) -> Result<Heatmap> {
    let kept = retained(novel, restaurants)?;
    let cells: Vec<HeatCell> = (0..grid.rows * grid.n)
        .into_par_iter()
        .map(|idx| {
            let center = grid.cell_center(idx / grid.n, idx % grid.n);
            HeatCell {
                center,
                sim: sim_over(center, &novel.topics.weights, &kept, grid.square_width),
            }
        })
        .collect();
    let mut min_sim = f64::INFINITY;
    let mut max_sim = f64::NEG_INFINITY;
    for c in &cells {
        if !c.sim.is_finite() {
            return Err(Error::Numerical(format!(
                "similarity at ({}, {}) is not finite",
                c.center.x, c.center.y
            )));
        }
        min_sim = min_sim.min(c.sim);
        max_sim = max_sim.max(c.sim);
    }
    Ok(Heatmap {
        grid: *grid,
        cells,
        min_sim,
        max_sim,
    })
}

/// Linear blue-to-red ramp over [min, max]; a flat map gets the ramp's
/// midpoint everywhere.
pub fn colorize(cells: &[HeatCell], min: f64, max: f64) -> Vec<(u8, u8, u8)> {
    assert!(max >= min, "colorize needs max >= min");
    cells
        .iter()
        .map(|c| {
            if max == min {
                return (128, 0, 128);
            }
            let t = ((c.sim - min) / (max - min)).clamp(0.0, 1.0);
            ((255.0 * t).round() as u8, 0, (255.0 * (1.0 - t)).round() as u8)
        })
        .collect()
}

pub fn to_csv(map: &Heatmap) -> String {
    let mut out = String::from("row,col,center_x,center_y,sim\n");
    for row in 0..map.grid.rows {
        for col in 0..map.grid.n {
            let c = map.cell(row, col);
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6}\n",
                row, col, c.center.x, c.center.y, c.sim
            ));
        }
    }
    out
}

/// SVG raster of the colored grid, north up, with an optional "X" marking
/// a true location (typically the excluded restaurant).
pub fn to_svg(map: &Heatmap, marker: Option<ProjectedPoint>) -> String {
    let (min_x, _, _, max_y) = map.grid.bounds;
    let sw = map.grid.square_width;
    let width = map.grid.n as f64 * sw;
    let height = map.grid.rows as f64 * sw;
    let colors = colorize(&map.cells, map.min_sim, map.max_sim);

    let mut svg = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width:.6} {height:.6}\" \
         width=\"800\" height=\"{:.0}\">\n",
        800.0 * height / width
    ));
    for row in 0..map.grid.rows {
        for col in 0..map.grid.n {
            let (r, g, b) = colors[row * map.grid.n + col];
            let x = col as f64 * sw;
            // svg y grows downward; flip so larger y (north) is on top
            let y = (map.grid.rows - 1 - row) as f64 * sw;
            svg.push_str(&format!(
                "  <rect x=\"{x:.6}\" y=\"{y:.6}\" width=\"{sw:.6}\" height=\"{sw:.6}\" \
                 fill=\"rgb({r},{g},{b})\"/>\n"
            ));
        }
    }
    if let Some(p) = marker {
        let x = p.x - min_x;
        let y = max_y - p.y;
        let arm = 0.4 * sw;
        let stroke = 0.1 * sw;
        for (dx1, dy1, dx2, dy2) in [(-arm, -arm, arm, arm), (-arm, arm, arm, -arm)] {
            svg.push_str(&format!(
                "  <line x1=\"{:.6}\" y1=\"{:.6}\" x2=\"{:.6}\" y2=\"{:.6}\" \
                 stroke=\"black\" stroke-width=\"{stroke:.6}\"/>\n",
                x + dx1,
                y + dy1,
                x + dx2,
                y + dy2
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn point(x: f64, y: f64) -> ProjectedPoint {
        ProjectedPoint { x, y }
    }

    fn one_hot(k: usize, hot: usize) -> Vec<f64> {
        let mut v = vec![0.0; k];
        v[hot] = 1.0;
        v
    }

    fn query(topics: Vec<f64>) -> NovelQuery {
        NovelQuery {
            topics: TopicDistribution { weights: topics },
            exclude_id: None,
        }
    }

    fn restaurant(id: &str, x: f64, y: f64, topics: Vec<f64>) -> RestaurantTopics {
        RestaurantTopics {
            id: id.to_string(),
            position: point(x, y),
            topics,
        }
    }

    #[test]
    fn topic_distance_on_reference_pairs() {
        let a = vec![0.2, 0.3, 0.5];
        assert_eq!(topic_distance(&a, &a), 0.0);
        assert_abs_diff_eq!(
            topic_distance(&one_hot(5, 0), &one_hot(5, 3)),
            std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            topic_distance(&[0.5, 0.5, 0.0], &[1.0, 0.0, 0.0]),
            0.70710678118654757,
            epsilon = 1e-12
        );
    }

    #[test]
    fn gaussian_weight_at_reference_distances() {
        let center = point(0.0, 0.0);
        assert_abs_diff_eq!(
            gaussian_weight(center, center, 1.0),
            0.28209479177387814,
            epsilon = 1e-12
        );
        // distance exactly one sigma, reached diagonally
        let sigma = std::f64::consts::SQRT_2;
        let at_sigma = point(1.0, 1.0);
        assert_abs_diff_eq!(
            (at_sigma.x * at_sigma.x + at_sigma.y * at_sigma.y).sqrt(),
            sigma,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            gaussian_weight(center, at_sigma, 1.0),
            0.17109914015610828,
            epsilon = 1e-12
        );
        assert!(gaussian_weight(center, point(1e6, 0.0), 1.0) == 0.0);
    }

    #[test]
    fn cell_similarity_composes_offset_and_weight() {
        let topics = vec![0.5, 0.5];
        let restaurants = vec![restaurant("a", 0.0, 0.0, topics.clone())];
        let sim = cell_similarity(point(0.0, 0.0), &query(topics), &restaurants, 1.0).unwrap();
        assert_abs_diff_eq!(sim, 0.79788456080286541, epsilon = 1e-12);
    }

    #[test]
    fn far_restaurants_contribute_nothing() {
        let topics = vec![1.0, 0.0];
        let restaurants = vec![restaurant("a", 500.0, 0.0, topics.clone())];
        let sim = cell_similarity(point(0.0, 0.0), &query(topics), &restaurants, 1.0).unwrap();
        assert!(sim < 1e-10);
    }

    #[test]
    fn identical_topics_score_twice_disjoint_topics() {
        let same = vec![restaurant("s", 3.0, 0.0, one_hot(4, 0))];
        let disjoint = vec![restaurant("d", 3.0, 0.0, one_hot(4, 1))];
        let q = query(one_hot(4, 0));
        let center = point(0.0, 0.0);
        let hot = cell_similarity(center, &q, &same, 1.0).unwrap();
        let cold = cell_similarity(center, &q, &disjoint, 1.0).unwrap();
        assert_abs_diff_eq!(hot / cold, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn exclusion_matches_direct_filtering() {
        let topics = vec![0.5, 0.5];
        let restaurants = vec![
            restaurant("keep-1", 1.0, 0.0, vec![0.9, 0.1]),
            restaurant("drop", 0.0, 0.0, topics.clone()),
            restaurant("keep-2", -1.0, 2.0, vec![0.2, 0.8]),
        ];
        let filtered: Vec<RestaurantTopics> = restaurants
            .iter()
            .filter(|r| r.id != "drop")
            .cloned()
            .collect();
        let with_exclusion = NovelQuery {
            topics: TopicDistribution {
                weights: topics.clone(),
            },
            exclude_id: Some("drop".to_string()),
        };
        let center = point(0.3, 0.4);
        let a = cell_similarity(center, &with_exclusion, &restaurants, 1.0).unwrap();
        let b = cell_similarity(center, &query(topics), &filtered, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn excluding_the_only_restaurant_is_an_error() {
        let q = NovelQuery {
            topics: TopicDistribution {
                weights: vec![1.0, 0.0],
            },
            exclude_id: Some("solo".to_string()),
        };
        let restaurants = vec![restaurant("solo", 0.0, 0.0, vec![1.0, 0.0])];
        assert!(matches!(
            cell_similarity(point(0.0, 0.0), &q, &restaurants, 1.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn rejects_unnormalized_queries_and_ragged_topics() {
        let restaurants = vec![restaurant("a", 0.0, 0.0, vec![1.0, 0.0])];
        assert!(cell_similarity(
            point(0.0, 0.0),
            &query(vec![0.7, 0.7]),
            &restaurants,
            1.0
        )
        .is_err());
        let ragged = vec![restaurant("a", 0.0, 0.0, vec![1.0, 0.0, 0.0])];
        assert!(
            cell_similarity(point(0.0, 0.0), &query(vec![1.0, 0.0]), &ragged, 1.0).is_err()
        );
        assert!(cell_similarity(
            point(0.0, 0.0),
            &query(vec![1.0, 0.0]),
            &restaurants,
            0.0
        )
        .is_err());
    }

    #[test]
    fn grid_pads_the_tight_box_by_one_prepad_width() {
        let positions = vec![point(0.0, 0.0), point(10.0, 4.0)];
        let grid = Grid::fit(&positions, 5).unwrap();
        // pre-padding width 2, so x spans [-2, 12] and square_width 2.8
        assert_eq!(grid.bounds.0, -2.0);
        assert_eq!(grid.bounds.2, 12.0);
        assert_abs_diff_eq!(grid.square_width, 2.8, epsilon = 1e-12);
        assert_eq!(grid.square_width, (grid.bounds.2 - grid.bounds.0) / grid.n as f64);
        // y spans [-2, 6] tight+pad = 8 miles -> ceil(8/2.8) = 3 rows
        assert_eq!(grid.rows, 3);
        assert_eq!(grid.n, 5);
        assert!(grid.bounds.3 >= 6.0);
        // bounds enclose every position
        for p in &positions {
            assert!(p.x >= grid.bounds.0 && p.x <= grid.bounds.2);
            assert!(p.y >= grid.bounds.1 && p.y <= grid.bounds.3);
        }
    }

    #[test]
    fn grid_rejects_degenerate_inputs() {
        assert!(Grid::fit(&[], 20).is_err());
        assert!(Grid::fit(&[point(0.0, 0.0)], 0).is_err());
        // zero x-extent
        assert!(matches!(
            Grid::fit(&[point(1.0, 0.0), point(1.0, 5.0)], 20),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Grid::fit(&[point(f64::NAN, 0.0)], 20).is_err());
    }

    #[test]
    fn single_cell_grid_evaluates_at_the_padded_center() {
        let restaurants = vec![
            restaurant("a", 0.0, 0.0, vec![1.0, 0.0]),
            restaurant("b", 4.0, 1.0, vec![0.0, 1.0]),
        ];
        let positions: Vec<ProjectedPoint> = restaurants.iter().map(|r| r.position).collect();
        let grid = Grid::fit(&positions, 1).unwrap();
        assert_eq!((grid.n, grid.rows), (1, 1));
        let q = query(vec![0.5, 0.5]);
        let map = build_heatmap(&grid, &q, &restaurants).unwrap();
        assert_eq!(map.cells.len(), 1);
        let direct =
            cell_similarity(grid.cell_center(0, 0), &q, &restaurants, grid.square_width)
                .unwrap();
        assert_eq!(map.cells[0].sim, direct);
        assert_eq!(map.min_sim, map.max_sim);
    }

    #[test]
    fn heatmap_matches_brute_force_summation() {
        let restaurants = vec![
            restaurant("a", 0.0, 0.0, vec![0.6, 0.4, 0.0]),
            restaurant("b", 3.0, 1.0, vec![0.1, 0.1, 0.8]),
            restaurant("c", 1.0, 2.5, vec![0.3, 0.3, 0.4]),
            restaurant("d", 2.0, 0.5, one_hot(3, 2)),
            restaurant("e", 2.5, 2.0, one_hot(3, 0)),
        ];
        let positions: Vec<ProjectedPoint> = restaurants.iter().map(|r| r.position).collect();
        let grid = Grid::fit(&positions, 2).unwrap();
        let q = query(vec![0.2, 0.5, 0.3]);
        let map = build_heatmap(&grid, &q, &restaurants).unwrap();

        let offset = 2.0 * 2.0f64.sqrt();
        let sigma = 2.0f64.sqrt() * grid.square_width;
        for row in 0..grid.rows {
            for col in 0..grid.n {
                let center = grid.cell_center(row, col);
                let mut total = 0.0;
                for r in &restaurants {
                    let dist_sq: f64 = q
                        .topics
                        .weights
                        .iter()
                        .zip(&r.topics)
                        .map(|(x, y)| (x - y) * (x - y))
                        .sum();
                    let dx = center.x - r.position.x;
                    let dy = center.y - r.position.y;
                    let g = (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
                        / (sigma * (2.0 * std::f64::consts::PI).sqrt());
                    total += (offset - dist_sq.sqrt()) * g;
                }
                let want = total / restaurants.len() as f64;
                assert_abs_diff_eq!(map.cell(row, col).sim, want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn uniform_identical_field_is_flat_in_the_interior() {
        let topics = vec![0.5, 0.5];
        let mut restaurants = Vec::new();
        for i in 0..21 {
            for j in 0..21 {
                restaurants.push(restaurant(
                    &format!("r{i}-{j}"),
                    i as f64 / 2.0,
                    j as f64 / 2.0,
                    topics.clone(),
                ));
            }
        }
        let positions: Vec<ProjectedPoint> = restaurants.iter().map(|r| r.position).collect();
        let grid = Grid::fit(&positions, DEFAULT_GRID_CELLS).unwrap();
        let map = build_heatmap(&grid, &query(topics), &restaurants).unwrap();
        // the kernel reaches ~3 sigma = 4.2 cells, so "interior" means
        // cells whose whole kernel support sits inside the field
        let buffer = 5;
        let mut interior = Vec::new();
        for row in buffer..grid.rows - buffer {
            for col in buffer..grid.n - buffer {
                interior.push(map.cell(row, col).sim);
            }
        }
        assert!(!interior.is_empty());
        let lo = interior.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = interior.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi <= lo * 1.05, "interior spread {lo}..{hi}");
        // edge cells see fewer neighbors, so the global minimum is on the rim
        assert!(map.min_sim < lo);
    }

    #[test]
    fn translation_leaves_similarities_unchanged() {
        let base = vec![
            restaurant("a", 0.0, 0.0, vec![0.6, 0.4]),
            restaurant("b", 3.0, 1.0, vec![0.1, 0.9]),
            restaurant("c", 1.0, 2.5, vec![0.5, 0.5]),
        ];
        let (dx, dy) = (10.0, -7.0);
        let shifted: Vec<RestaurantTopics> = base
            .iter()
            .map(|r| {
                restaurant(
                    &r.id,
                    r.position.x + dx,
                    r.position.y + dy,
                    r.topics.clone(),
                )
            })
            .collect();
        let q = query(vec![0.3, 0.7]);
        let grid_a =
            Grid::fit(&base.iter().map(|r| r.position).collect::<Vec<_>>(), 4).unwrap();
        let grid_b =
            Grid::fit(&shifted.iter().map(|r| r.position).collect::<Vec<_>>(), 4).unwrap();
        let map_a = build_heatmap(&grid_a, &q, &base).unwrap();
        let map_b = build_heatmap(&grid_b, &q, &shifted).unwrap();
        assert_eq!(map_a.cells.len(), map_b.cells.len());
        for (a, b) in map_a.cells.iter().zip(&map_b.cells) {
            assert_abs_diff_eq!(a.sim, b.sim, epsilon = 1e-12);
        }
    }

    #[test]
    fn matching_topics_never_lower_any_cell() {
        let q_topics = vec![0.2, 0.5, 0.3];
        let before = vec![
            restaurant("a", 0.0, 0.0, one_hot(3, 0)),
            restaurant("b", 3.0, 1.0, vec![0.1, 0.1, 0.8]),
            restaurant("c", 1.0, 2.5, vec![0.3, 0.3, 0.4]),
        ];
        let mut after = before.clone();
        after[1].topics = q_topics.clone();
        let positions: Vec<ProjectedPoint> = before.iter().map(|r| r.position).collect();
        let grid = Grid::fit(&positions, 4).unwrap();
        let q = query(q_topics);
        let map_before = build_heatmap(&grid, &q, &before).unwrap();
        let map_after = build_heatmap(&grid, &q, &after).unwrap();
        for (b, a) in map_before.cells.iter().zip(&map_after.cells) {
            assert!(a.sim >= b.sim);
        }
    }

    #[test]
    fn colorize_endpoints_midpoint_and_flat_map() {
        let cells = vec![
            HeatCell {
                center: point(0.0, 0.0),
                sim: 1.0,
            },
            HeatCell {
                center: point(0.0, 0.0),
                sim: 3.0,
            },
            HeatCell {
                center: point(0.0, 0.0),
                sim: 2.0,
            },
        ];
        let colors = colorize(&cells, 1.0, 3.0);
        assert_eq!(colors[0], (0, 0, 255));
        assert_eq!(colors[1], (255, 0, 0));
        assert_eq!(colors[2], (128, 0, 128));
        let flat = colorize(&cells[..1], 2.0, 2.0);
        assert_eq!(flat[0], (128, 0, 128));
    }

    fn small_map() -> Heatmap {
        let restaurants = vec![
            restaurant("a", 0.0, 0.0, vec![1.0, 0.0]),
            restaurant("b", 4.0, 3.0, vec![0.0, 1.0]),
        ];
        let positions: Vec<ProjectedPoint> = restaurants.iter().map(|r| r.position).collect();
        let grid = Grid::fit(&positions, 3).unwrap();
        build_heatmap(&grid, &query(vec![0.5, 0.5]), &restaurants).unwrap()
    }

    #[test]
    fn csv_has_one_line_per_cell() {
        let map = small_map();
        let csv = to_csv(&map);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("row,col,center_x,center_y,sim"));
        let body: Vec<&str> = lines.collect();
        assert_eq!(body.len(), map.grid.rows * map.grid.n);
        let first: Vec<&str> = body[0].split(',').collect();
        assert_eq!(first[0], "0");
        assert_eq!(first[1], "0");
        let x: f64 = first[2].parse().unwrap();
        assert_abs_diff_eq!(x, map.cell(0, 0).center.x, epsilon = 1e-6);
    }

    #[test]
    fn svg_is_declared_and_has_one_rect_per_cell() {
        let map = small_map();
        let svg = to_svg(&map, Some(point(0.0, 0.0)));
        assert!(svg.starts_with("<?xml version=\"1.0\""));
        assert!(svg.contains("<svg xmlns=\"http://www.w3.org/2000/svg\""));
        assert_eq!(svg.matches("<rect ").count(), map.cells.len());
        assert_eq!(svg.matches("<line ").count(), 2);
        assert!(svg.trim_end().ends_with("</svg>"));
        let unmarked = to_svg(&map, None);
        assert_eq!(unmarked.matches("<line ").count(), 0);
    }
}
