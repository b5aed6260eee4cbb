//! Terrain heightmap synthesis with WaveFunctionCollapse over slope patterns.
//!
//! Pipeline: [`raster_io`] reads elevation tiles and grids, [`gradient`]
//! turns heightmaps into forward-difference slope fields, [`wfc`] learns
//! 2×2×2 slope patterns and generates new fields, [`reconstruct`] integrates
//! them back into heights, and [`stats`] compares input and output slopes.

pub mod cli;
pub mod error;
pub mod gradient;
pub mod grid;
pub mod raster_io;
pub mod reconstruct;
pub mod stats;
pub mod wfc;

pub use error::{Error, Result};
pub use gradient::{
    compute_gradients, training_set, transform_heightmap, GradientField, Transform,
};
pub use grid::Grid;
pub use raster_io::{HeightMap, TileId};
pub use reconstruct::{curl_residual, integrate, CurlResidualReport};
pub use stats::{compare, summarize, ComparisonReport, SlopeSummary};
pub use wfc::{generate, Model};
