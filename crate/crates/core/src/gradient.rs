//! Forward-difference slope fields and heightmap-level augmentation.
//!
//! Axis convention: `x` is the column (east), `y` is the row (south), and
//! storage is row-major `[y][x]`. So `gx[y][x] = H[y][x+1] - H[y][x]` and
//! `gy[y][x] = H[y+1][x] - H[y][x]`, both cropped to the common
//! `(rows-1) × (cols-1)` region.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::raster_io::HeightMap;

/// Co-registered x and y slope channels in meters per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradientField {
    gx: Grid<i32>,
    gy: Grid<i32>,
}

impl GradientField {
    pub fn new(gx: Grid<i32>, gy: Grid<i32>) -> Result<Self> {
        if gx.rows() != gy.rows() || gx.cols() != gy.cols() {
            return Err(Error::Range(format!(
                "gradient channels differ in shape: {}x{} vs {}x{}",
                gx.rows(),
                gx.cols(),
                gy.rows(),
                gy.cols()
            )));
        }
        if gx.is_empty() {
            return Err(Error::Range("gradient field must be at least 1x1".into()));
        }
        Ok(GradientField { gx, gy })
    }

    pub fn from_rows<R: AsRef<[i32]>>(gx: &[R], gy: &[R]) -> Result<Self> {
        let ragged = || Error::Range("ragged gradient rows".into());
        Self::new(
            Grid::from_rows(gx).ok_or_else(ragged)?,
            Grid::from_rows(gy).ok_or_else(ragged)?,
        )
    }

    pub fn rows(&self) -> usize {
        self.gx.rows()
    }

    pub fn cols(&self) -> usize {
        self.gx.cols()
    }

    pub fn gx(&self) -> &Grid<i32> {
        &self.gx
    }

    pub fn gy(&self) -> &Grid<i32> {
        &self.gy
    }

    pub fn into_channels(self) -> (Grid<i32>, Grid<i32>) {
        (self.gx, self.gy)
    }
}

/// Heightmap-level augmentation applied before differencing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transform {
    Identity,
    HorizontalFlip,
    VerticalFlip,
    Rotate180,
}

impl Transform {
    pub const ALL: [Transform; 4] = [
        Transform::Identity,
        Transform::HorizontalFlip,
        Transform::VerticalFlip,
        Transform::Rotate180,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::HorizontalFlip => "hflip",
            Transform::VerticalFlip => "vflip",
            Transform::Rotate180 => "rot180",
        }
    }

    fn flips(self) -> (bool, bool) {
        match self {
            Transform::Identity => (false, false),
            Transform::HorizontalFlip => (false, true),
            Transform::VerticalFlip => (true, false),
            Transform::Rotate180 => (true, true),
        }
    }
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "identity" | "id" | "none" => Ok(Transform::Identity),
            "hflip" | "horizontal-flip" => Ok(Transform::HorizontalFlip),
            "vflip" | "vertical-flip" => Ok(Transform::VerticalFlip),
            "rot180" | "rotate-180" => Ok(Transform::Rotate180),
            other => Err(Error::Range(format!("unknown transform {other:?}"))),
        }
    }
}

/// Forward differences of `hm`, cropped so both channels share one shape.
pub fn compute_gradients(hm: &HeightMap) -> Result<GradientField> {
    if hm.rows() < 2 || hm.cols() < 2 {
        return Err(Error::Range(format!(
            "gradients need at least a 2x2 heightmap, got {}x{}",
            hm.rows(),
            hm.cols()
        )));
    }
    hm.ensure_void_free()?;
    let h = hm.cells();
    let (rows, cols) = (hm.rows() - 1, hm.cols() - 1);
    let gx = Grid::from_fn(rows, cols, |y, x| h[(y, x + 1)] - h[(y, x)]);
    let gy = Grid::from_fn(rows, cols, |y, x| h[(y + 1, x)] - h[(y, x)]);
    GradientField::new(gx, gy)
}

pub fn transform_heightmap(hm: &HeightMap, t: Transform) -> HeightMap {
    let (flip_rows, flip_cols) = t.flips();
    let (rows, cols) = (hm.rows(), hm.cols());
    let cells = Grid::from_fn(rows, cols, |r, c| {
        let sr = if flip_rows { rows - 1 - r } else { r };
        let sc = if flip_cols { cols - 1 - c } else { c };
        hm.get(sr, sc)
    });
    hm.replace_cells(cells)
}

/// One gradient field per transform, in the order given.
pub fn training_set(hm: &HeightMap, transforms: &[Transform]) -> Result<Vec<GradientField>> {
    transforms
        .iter()
        .map(|&t| compute_gradients(&transform_heightmap(hm, t)))
        .collect()
}
