//! Integrating slope fields back into heightmaps.
//!
//! A field is integrable exactly when every interior curl residual
//! `(gx[y][x] + gy[y][x+1]) - (gy[y][x] + gx[y+1][x])` is zero; then summing
//! along rows or along columns gives the same heights.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gradient::GradientField;
use crate::grid::Grid;
use crate::raster_io::HeightMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurlResidualReport {
    pub max_abs_residual: i64,
    pub violation_count: usize,
    pub rows: usize,
    pub cols: usize,
}

impl CurlResidualReport {
    pub fn is_integrable(&self) -> bool {
        self.max_abs_residual == 0
    }
}

/// Residual `r[y][x]` for every `(y, x)` with `y+1` and `x+1` in bounds.
pub fn residual_grid(gf: &GradientField) -> Grid<i64> {
    let (gx, gy) = (gf.gx(), gf.gy());
    let rows = gf.rows().saturating_sub(1);
    let cols = gf.cols().saturating_sub(1);
    Grid::from_fn(rows, cols, |y, x| {
        let around_top_right = i64::from(gx[(y, x)]) + i64::from(gy[(y, x + 1)]);
        let around_bottom_left = i64::from(gy[(y, x)]) + i64::from(gx[(y + 1, x)]);
        around_top_right - around_bottom_left
    })
}

pub fn curl_residual(gf: &GradientField) -> CurlResidualReport {
    let r = residual_grid(gf);
    CurlResidualReport {
        max_abs_residual: r.iter().map(|v| v.abs()).max().unwrap_or(0),
        violation_count: r.iter().filter(|&&v| v != 0).count(),
        rows: r.rows(),
        cols: r.cols(),
    }
}

/// Which equation a cell prefers when both a left and an upper neighbor
/// are available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegrationOrder {
    /// First row from `gx`, then each row from the one above via `gy`.
    RowsFirst,
    /// First column from `gy`, then each column from the one to its left via `gx`.
    ColumnsFirst,
}

/// Integrates `gf` into a `(rows+1) × (cols+1)` heightmap with
/// `H[0][0] = base_height`, rows first.
///
/// The cropped field holds no slope into the bottom-right cell, so that
/// corner is completed with zero mixed difference:
/// `H[R][C] = H[R-1][C] + H[R][C-1] - H[R-1][C-1]`.
pub fn integrate(gf: &GradientField, base_height: i32) -> Result<HeightMap> {
    let hm = integrate_with_order(gf, base_height, IntegrationOrder::RowsFirst)?;
    debug_assert_eq!(consistency_deviation(gf, &hm), 0);
    Ok(hm)
}

/// Integrates in both orders and returns the rows-first result together with
/// the largest cell difference between the two (0 for an integrable field).
pub fn integrate_verified(gf: &GradientField, base_height: i32) -> Result<(HeightMap, i64)> {
    let rows_first = integrate_with_order(gf, base_height, IntegrationOrder::RowsFirst)?;
    let cols_first = integrate_with_order(gf, base_height, IntegrationOrder::ColumnsFirst)?;
    let order_gap = rows_first
        .cells()
        .iter()
        .zip(cols_first.cells().iter())
        .map(|(&a, &b)| (i64::from(a) - i64::from(b)).abs())
        .max()
        .unwrap_or(0);
    let deviation = order_gap.max(consistency_deviation(gf, &rows_first));
    Ok((rows_first, deviation))
}

pub fn integrate_with_order(
    gf: &GradientField,
    base_height: i32,
    order: IntegrationOrder,
) -> Result<HeightMap> {
    let report = curl_residual(gf);
    if !report.is_integrable() {
        return Err(Error::Integrability(report));
    }
    let (gx, gy) = (gf.gx(), gf.gy());
    let (fr, fc) = (gf.rows(), gf.cols());
    let mut h = Grid::filled(fr + 1, fc + 1, 0i64);
    h[(0, 0)] = i64::from(base_height);

    let from_left = |h: &Grid<i64>, y: usize, x: usize| h[(y, x - 1)] + i64::from(gx[(y, x - 1)]);
    let from_above = |h: &Grid<i64>, y: usize, x: usize| h[(y - 1, x)] + i64::from(gy[(y - 1, x)]);
    let corner =
        |h: &Grid<i64>, y: usize, x: usize| h[(y - 1, x)] + h[(y, x - 1)] - h[(y - 1, x - 1)];

    for y in 0..=fr {
        for x in 0..=fc {
            if y == 0 && x == 0 {
                continue;
            }
            // gx covers rows < fr, gy covers cols < fc.
            let left_ok = x >= 1 && y < fr;
            let above_ok = y >= 1 && x < fc;
            let v = match order {
                IntegrationOrder::RowsFirst if y == 0 => from_left(&h, y, x),
                IntegrationOrder::RowsFirst if above_ok => from_above(&h, y, x),
                IntegrationOrder::RowsFirst if left_ok => from_left(&h, y, x),
                IntegrationOrder::ColumnsFirst if x == 0 => from_above(&h, y, x),
                IntegrationOrder::ColumnsFirst if left_ok => from_left(&h, y, x),
                IntegrationOrder::ColumnsFirst if above_ok => from_above(&h, y, x),
                _ => corner(&h, y, x),
            };
            h[(y, x)] = v;
        }
    }

    let mut cells = Vec::with_capacity(h.len());
    for &v in h.iter() {
        cells.push(
            i32::try_from(v).map_err(|_| {
                Error::Range(format!("integrated height {v} does not fit in 32 bits"))
            })?,
        );
    }
    HeightMap::new(Grid::from_vec(fr + 1, fc + 1, cells).expect("dims match"))
}

/// Largest `|H - H_x|` or `|H - H_y|` over every cell where the row-wise
/// prediction `H_x = H[y][x-1] + gx[y][x-1]` or the column-wise prediction
/// `H_y = H[y-1][x] + gy[y-1][x]` is defined. Zero means both predictions
/// agree with `hm` everywhere.
pub fn consistency_deviation(gf: &GradientField, hm: &HeightMap) -> i64 {
    let (gx, gy) = (gf.gx(), gf.gy());
    let mut worst = 0i64;
    for y in 0..hm.rows() {
        for x in 0..hm.cols() {
            let h = i64::from(hm.get(y, x));
            if x >= 1 && y < gf.rows() && x - 1 < gf.cols() {
                let hx = i64::from(hm.get(y, x - 1)) + i64::from(gx[(y, x - 1)]);
                worst = worst.max((h - hx).abs());
            }
            if y >= 1 && x < gf.cols() && y - 1 < gf.rows() {
                let hy = i64::from(hm.get(y - 1, x)) + i64::from(gy[(y - 1, x)]);
                worst = worst.max((h - hy).abs());
            }
        }
    }
    worst
}
