pub mod cluster;
pub mod fixture;
pub mod gap;
pub mod heatmap;
pub mod train;
