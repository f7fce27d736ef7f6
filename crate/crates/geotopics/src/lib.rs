//! Discover, label, and visualize culinary districts from geo-tagged reviews.
//!
//! The pipeline runs in stages, each consuming the previous stage's output:
//!
//! 1. [`corpus`] loads businesses and reviews, cleans text, and builds a
//!    ranked vocabulary and bag-of-words documents.
//! 2. [`topicmodel`] fits a topic model to the review bags with online
//!    variational inference and infers per-restaurant topic mixes.
//! 3. [`features`] projects coordinates to a local plane in miles and glues
//!    position and scaled topic mix into one embedding vector.
//! 4. [`clustering`] groups the embeddings (k-means and a Gaussian mixture)
//!    and picks the cluster count with the gap statistic.
//! 5. [`labeling`] names each cluster from its dominant topics and measures
//!    its spatial orientation.
//! 6. [`heatmap`] rasterizes topic similarity around a target restaurant.
//!
//! Everything is deterministic for a fixed seed: random stages draw from
//! seeds derived per stage, and parallel sections only use order-preserving
//! maps.

pub mod corpus;
pub mod error;
pub mod features;
pub mod fixture;
pub mod heatmap;
pub mod labeling;
pub mod math;
pub mod matrix;
pub mod topicmodel;

pub mod clustering;

pub use error::{Error, Result};
pub use matrix::Matrix;
