//! Heightmap container plus the raster formats the pipeline speaks: SRTM
//! `.hgt` tiles in, ESRI ASCII grids for interchange, binary PGM for viewing.

use std::fmt;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parse_err, Error, Result};
use crate::grid::Grid;

/// SRTM void marker.
pub const DEFAULT_NODATA: i32 = -32768;
pub const MIN_ELEVATION: i32 = -500;
pub const MAX_ELEVATION: i32 = 9000;

/// Lower-left corner and cell size carried through from the source raster.
/// Only passed along, never used for reprojection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoRef {
    pub xllcorner: f64,
    pub yllcorner: f64,
    pub cellsize: f64,
}

impl Default for GeoRef {
    fn default() -> Self {
        GeoRef {
            xllcorner: 0.0,
            yllcorner: 0.0,
            cellsize: 1.0,
        }
    }
}

/// A 2D grid of integer elevations in meters, row-major, north row first.
#[derive(Debug, Clone, PartialEq)]
pub struct HeightMap {
    cells: Grid<i32>,
    nodata: i32,
    georef: GeoRef,
}

impl HeightMap {
    pub fn new(cells: Grid<i32>) -> Result<Self> {
        Self::with_nodata(cells, DEFAULT_NODATA)
    }

    pub fn with_nodata(cells: Grid<i32>, nodata: i32) -> Result<Self> {
        if cells.rows() == 0 || cells.cols() == 0 {
            return Err(Error::Range(format!(
                "heightmap must be at least 1x1, got {}x{}",
                cells.rows(),
                cells.cols()
            )));
        }
        Ok(HeightMap {
            cells,
            nodata,
            georef: GeoRef::default(),
        })
    }

    pub fn from_rows<R: AsRef<[i32]>>(rows: &[R]) -> Result<Self> {
        let grid =
            Grid::from_rows(rows).ok_or_else(|| Error::Range("ragged heightmap rows".into()))?;
        Self::new(grid)
    }

    pub fn with_georef(mut self, georef: GeoRef) -> Self {
        self.georef = georef;
        self
    }

    pub fn rows(&self) -> usize {
        self.cells.rows()
    }

    pub fn cols(&self) -> usize {
        self.cells.cols()
    }

    pub fn nodata(&self) -> i32 {
        self.nodata
    }

    pub fn georef(&self) -> GeoRef {
        self.georef
    }

    pub fn cells(&self) -> &Grid<i32> {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> i32 {
        self.cells[(row, col)]
    }

    pub fn to_rows(&self) -> Vec<Vec<i32>> {
        self.cells.to_rows()
    }

    pub fn is_void(&self, value: i32) -> bool {
        value == self.nodata
    }

    pub fn void_count(&self) -> usize {
        self.cells.iter().filter(|&&v| self.is_void(v)).count()
    }

    /// Errors with the first nodata cell in row-major order, if any.
    pub fn ensure_void_free(&self) -> Result<()> {
        match self.cells.iter().position(|&v| self.is_void(v)) {
            Some(i) => Err(Error::VoidData {
                row: i / self.cols(),
                col: i % self.cols(),
            }),
            None => Ok(()),
        }
    }

    /// Checks every non-void cell lies in the plausible terrestrial range.
    pub fn check_elevation_range(&self) -> Result<()> {
        for (i, &v) in self.cells.iter().enumerate() {
            if !self.is_void(v) && !(MIN_ELEVATION..=MAX_ELEVATION).contains(&v) {
                return Err(Error::MalformedFile(format!(
                    "elevation {v} at row {}, col {} outside [{MIN_ELEVATION}, {MAX_ELEVATION}]",
                    i / self.cols(),
                    i % self.cols()
                )));
            }
        }
        Ok(())
    }

    /// Minimum and maximum over non-void cells.
    pub fn value_range(&self) -> Option<(i32, i32)> {
        self.cells
            .iter()
            .copied()
            .filter(|&v| !self.is_void(v))
            .fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            })
    }

    pub(crate) fn replace_cells(&self, cells: Grid<i32>) -> HeightMap {
        HeightMap {
            cells,
            nodata: self.nodata,
            georef: self.georef,
        }
    }
}

/// SRTM tile name such as `N26E057`: northing and easting of the tile's
/// south-west corner in whole degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TileId {
    pub northing: i32,
    pub easting: i32,
}

impl TileId {
    pub fn new(northing: i32, easting: i32) -> Self {
        TileId { northing, easting }
    }

    /// Parses the tile id out of a file name like `.../N26E057.hgt`.
    pub fn from_path(path: &Path) -> Result<Self> {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| Error::MalformedFile(format!("no tile name in {}", path.display())))?;
        stem.parse()
    }
}

impl fmt::Display for TileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ns = if self.northing < 0 { 'S' } else { 'N' };
        let ew = if self.easting < 0 { 'W' } else { 'E' };
        write!(
            f,
            "{ns}{:02}{ew}{:03}",
            self.northing.unsigned_abs(),
            self.easting.unsigned_abs()
        )
    }
}

impl FromStr for TileId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedFile(format!("invalid SRTM tile name {s:?}"));
        let upper = s.to_ascii_uppercase();
        let bytes = upper.as_bytes();
        let lat_sign = match bytes.first() {
            Some(b'N') => 1,
            Some(b'S') => -1,
            _ => return Err(bad()),
        };
        let split = upper[1..].find(['E', 'W']).ok_or_else(bad)? + 1;
        let lon_sign = if bytes[split] == b'E' { 1 } else { -1 };
        let lat = &upper[1..split];
        let lon = &upper[split + 1..];
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !digits(lat) || !digits(lon) {
            return Err(bad());
        }
        let lat: i32 = lat.parse().map_err(|_| bad())?;
        let lon: i32 = lon.parse().map_err(|_| bad())?;
        if lat > 90 || lon > 180 {
            return Err(bad());
        }
        Ok(TileId::new(lat_sign * lat, lon_sign * lon))
    }
}

/// Decodes a square `.hgt` tile: big-endian `i16` samples, row-major from the
/// north-west corner. Side length is inferred from the byte count.
pub fn parse_hgt(bytes: &[u8], tile: TileId) -> Result<HeightMap> {
    if bytes.is_empty() || !bytes.len().is_multiple_of(2) {
        return Err(Error::MalformedFile(format!(
            "hgt byte count {} is not 2*s^2 for a positive s",
            bytes.len()
        )));
    }
    let samples = bytes.len() / 2;
    let side = samples.isqrt();
    if side * side != samples {
        return Err(Error::MalformedFile(format!(
            "hgt sample count {samples} is not a perfect square"
        )));
    }
    let data = bytes
        .chunks_exact(2)
        .map(|b| i32::from(i16::from_be_bytes([b[0], b[1]])))
        .collect();
    let grid = Grid::from_vec(side, side, data).expect("side*side samples");
    let hm = HeightMap::new(grid)?;
    hm.check_elevation_range()?;

    // Tile edges sit on sample centers, so the grid spacing is 1/(s-1) degrees.
    let cellsize = if side > 1 {
        1.0 / (side - 1) as f64
    } else {
        1.0
    };
    Ok(hm.with_georef(GeoRef {
        xllcorner: f64::from(tile.easting) - cellsize / 2.0,
        yllcorner: f64::from(tile.northing) - cellsize / 2.0,
        cellsize,
    }))
}

/// Encodes a heightmap back to `.hgt` bytes. Values must fit in `i16`.
pub fn encode_hgt(hm: &HeightMap) -> Result<Vec<u8>> {
    if hm.rows() != hm.cols() {
        return Err(Error::Range("hgt tiles must be square".into()));
    }
    let mut out = Vec::with_capacity(hm.cells().len() * 2);
    for &v in hm.cells().iter() {
        let v = i16::try_from(v)
            .map_err(|_| Error::Range(format!("value {v} does not fit a 16-bit sample")))?;
        out.extend_from_slice(&v.to_be_bytes());
    }
    Ok(out)
}

pub fn read_hgt(path: &Path) -> Result<HeightMap> {
    let tile = TileId::from_path(path)?;
    let bytes = std::fs::read(path)?;
    parse_hgt(&bytes, tile)
}

/// Copies the `h × w` sub-grid whose top-left cell is `(row0, col0)`.
pub fn window(hm: &HeightMap, row0: usize, col0: usize, h: usize, w: usize) -> Result<HeightMap> {
    let fits = |start: usize, len: usize, total: usize| {
        len >= 1 && start.checked_add(len).is_some_and(|end| end <= total)
    };
    if !fits(row0, h, hm.rows()) || !fits(col0, w, hm.cols()) {
        return Err(Error::Range(format!(
            "window {h}x{w} at ({row0}, {col0}) does not fit inside {}x{}",
            hm.rows(),
            hm.cols()
        )));
    }
    let cells = Grid::from_fn(h, w, |r, c| hm.get(row0 + r, col0 + c));
    let out = hm.replace_cells(cells);
    if let Err(Error::VoidData { row, col }) = out.ensure_void_free() {
        return Err(Error::VoidData {
            row: row + row0,
            col: col + col0,
        });
    }
    let g = hm.georef();
    Ok(out.with_georef(GeoRef {
        xllcorner: g.xllcorner + col0 as f64 * g.cellsize,
        yllcorner: g.yllcorner + (hm.rows() - row0 - h) as f64 * g.cellsize,
        cellsize: g.cellsize,
    }))
}

/// Bilinear downsampling with pixel-center alignment. Output cell `(i, j)`
/// samples source coordinate `((i + 0.5) f - 0.5, (j + 0.5) f - 0.5)`,
/// clamped to the grid, and is rounded half away from zero.
pub fn downsample_bilinear(hm: &HeightMap, factor: usize) -> Result<HeightMap> {
    if factor == 0 || factor > hm.rows() || factor > hm.cols() {
        return Err(Error::Range(format!(
            "downsample factor {factor} invalid for a {}x{} grid",
            hm.rows(),
            hm.cols()
        )));
    }
    let out_rows = hm.rows() / factor;
    let out_cols = hm.cols() / factor;

    // Per-axis: (lower index, upper index, weight of upper).
    let axis = |n_out: usize, n_src: usize| -> Vec<(usize, usize, f64)> {
        (0..n_out)
            .map(|i| {
                let s = ((i as f64 + 0.5) * factor as f64 - 0.5).clamp(0.0, (n_src - 1) as f64);
                let lo = s.floor() as usize;
                let hi = (lo + 1).min(n_src - 1);
                (lo, hi, s - lo as f64)
            })
            .collect()
    };
    let ys = axis(out_rows, hm.rows());
    let xs = axis(out_cols, hm.cols());

    let mut data = Vec::with_capacity(out_rows * out_cols);
    for &(y0, y1, ty) in &ys {
        for &(x0, x1, tx) in &xs {
            let taps = [
                (y0, x0, (1.0 - ty) * (1.0 - tx)),
                (y0, x1, (1.0 - ty) * tx),
                (y1, x0, ty * (1.0 - tx)),
                (y1, x1, ty * tx),
            ];
            let mut acc = 0.0;
            for (r, c, wgt) in taps {
                if wgt == 0.0 {
                    continue;
                }
                let v = hm.get(r, c);
                if hm.is_void(v) {
                    return Err(Error::VoidData { row: r, col: c });
                }
                acc += wgt * f64::from(v);
            }
            data.push(acc.round() as i32);
        }
    }
    let cells = Grid::from_vec(out_rows, out_cols, data).expect("dims match");
    let g = hm.georef();
    let covered_rows = out_rows * factor;
    Ok(hm.replace_cells(cells).with_georef(GeoRef {
        xllcorner: g.xllcorner,
        yllcorner: g.yllcorner + (hm.rows() - covered_rows) as f64 * g.cellsize,
        cellsize: g.cellsize * factor as f64,
    }))
}

/// Parses an ESRI ASCII grid holding integer values.
///
/// `ncols` and `nrows` are required; `xllcorner`/`xllcenter`,
/// `yllcorner`/`yllcenter`, `cellsize` and `NODATA_value` are optional.
/// Each data line must hold exactly `ncols` values.
pub fn read_ascii_grid(text: &str) -> Result<HeightMap> {
    let mut ncols = None;
    let mut nrows = None;
    let mut georef = GeoRef::default();
    let mut nodata = DEFAULT_NODATA;

    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(idx, line)) = lines.peek() {
        let mut toks = line.split_whitespace();
        let Some(key) = toks.next() else {
            lines.next();
            continue;
        };
        if !key.starts_with(|c: char| c.is_ascii_alphabetic()) {
            break;
        }
        lines.next();
        let lineno = idx + 1;
        let value = toks
            .next()
            .ok_or_else(|| parse_err(lineno, format!("header key {key} has no value")))?;
        if toks.next().is_some() {
            return Err(parse_err(lineno, format!("trailing tokens after {key}")));
        }
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| parse_err(lineno, format!("bad number {value:?} for {key}")))
        };
        let count = || {
            value
                .parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("bad count {value:?} for {key}")))
        };
        match key.to_ascii_lowercase().as_str() {
            "ncols" => ncols = Some(count()?),
            "nrows" => nrows = Some(count()?),
            "xllcorner" | "xllcenter" => georef.xllcorner = float()?,
            "yllcorner" | "yllcenter" => georef.yllcorner = float()?,
            "cellsize" => georef.cellsize = float()?,
            "nodata_value" => {
                nodata = value
                    .parse()
                    .map_err(|_| parse_err(lineno, format!("bad NODATA_value {value:?}")))?
            }
            other => return Err(parse_err(lineno, format!("unknown header key {other:?}"))),
        }
    }
    let ncols = ncols.ok_or_else(|| parse_err(1, "missing header key ncols"))?;
    let nrows = nrows.ok_or_else(|| parse_err(1, "missing header key nrows"))?;
    if ncols == 0 || nrows == 0 {
        return Err(parse_err(1, "ncols and nrows must be positive"));
    }

    let mut data = Vec::with_capacity(ncols * nrows);
    let mut seen_rows = 0;
    let mut last_line = 0;
    for (idx, line) in lines {
        last_line = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if seen_rows == nrows {
            return Err(parse_err(idx + 1, format!("more than {nrows} data rows")));
        }
        let before = data.len();
        for tok in line.split_whitespace() {
            let v: i32 = tok
                .parse()
                .map_err(|_| parse_err(idx + 1, format!("bad integer value {tok:?}")))?;
            data.push(v);
        }
        let got = data.len() - before;
        if got != ncols {
            return Err(parse_err(
                idx + 1,
                format!("expected {ncols} values, found {got}"),
            ));
        }
        seen_rows += 1;
    }
    if seen_rows != nrows {
        return Err(parse_err(
            last_line.max(1),
            format!("expected {nrows} data rows, found {seen_rows}"),
        ));
    }
    let grid = Grid::from_vec(nrows, ncols, data).expect("row counts checked");
    Ok(HeightMap::with_nodata(grid, nodata)?.with_georef(georef))
}

pub fn write_ascii_grid(hm: &HeightMap) -> String {
    let g = hm.georef();
    let mut out = String::with_capacity(hm.cells().len() * 6 + 128);
    // Writing to a String cannot fail.
    let _ = writeln!(out, "ncols {}", hm.cols());
    let _ = writeln!(out, "nrows {}", hm.rows());
    let _ = writeln!(out, "xllcorner {}", g.xllcorner);
    let _ = writeln!(out, "yllcorner {}", g.yllcorner);
    let _ = writeln!(out, "cellsize {}", g.cellsize);
    let _ = writeln!(out, "NODATA_value {}", hm.nodata());
    for r in 0..hm.rows() {
        let row = hm.cells().row(r);
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{v}");
        }
        out.push('\n');
    }
    out
}

/// Binary 16-bit PGM with values min–max stretched to `0..=65535`.
/// A constant map renders as mid-gray; void cells render black.
pub fn render_pgm(hm: &HeightMap) -> Vec<u8> {
    let header = format!("P5\n{} {}\n65535\n", hm.cols(), hm.rows());
    let mut out = Vec::with_capacity(header.len() + hm.cells().len() * 2);
    out.extend_from_slice(header.as_bytes());
    let (lo, hi) = hm.value_range().unwrap_or((0, 0));
    let span = i64::from(hi) - i64::from(lo);
    for &v in hm.cells().iter() {
        let sample: u16 = if hm.is_void(v) {
            0
        } else if span == 0 {
            32768
        } else {
            let num = (i64::from(v) - i64::from(lo)) * 65535;
            ((num + span / 2) / span) as u16
        };
        out.extend_from_slice(&sample.to_be_bytes());
    }
    out
}

/// Built-in terrain fixtures for runs without SRTM tiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Height equals the column index.
    Ramp,
    /// Sum of a column wave and a row wave, each 50 m amplitude with a
    /// 16 px period; the seed picks integer phase offsets.
    Sine,
    /// Seeded correlated random walk around 1000 m.
    RandomWalk,
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ramp" => Ok(SyntheticKind::Ramp),
            "sine" => Ok(SyntheticKind::Sine),
            "random-walk" | "randomwalk" | "random_walk" => Ok(SyntheticKind::RandomWalk),
            _ => Err(Error::Range(format!(
                "unknown synthetic terrain kind {s:?}"
            ))),
        }
    }
}

const SINE_AMPLITUDE: f64 = 50.0;
const SINE_PERIOD: usize = 16;

pub fn synthetic_terrain(
    kind: SyntheticKind,
    rows: usize,
    cols: usize,
    seed: u64,
) -> Result<HeightMap> {
    if rows == 0 || cols == 0 {
        return Err(Error::Range(format!(
            "synthetic terrain must be at least 1x1, got {rows}x{cols}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = match kind {
        SyntheticKind::Ramp => {
            Grid::from_fn(rows, cols, |_, c| c.min(MAX_ELEVATION as usize) as i32)
        }
        SyntheticKind::Sine => {
            let phase_x = rng.gen_range(0..SINE_PERIOD);
            let phase_y = rng.gen_range(0..SINE_PERIOD);
            let wave = |i: usize, phase: usize| {
                let t = ((i + phase) % SINE_PERIOD) as f64 / SINE_PERIOD as f64;
                (SINE_AMPLITUDE * (std::f64::consts::TAU * t).sin()).round() as i32
            };
            Grid::from_fn(rows, cols, |r, c| {
                1000 + wave(c, phase_x) + wave(r, phase_y)
            })
        }
        SyntheticKind::RandomWalk => {
            let mut g = Grid::filled(rows, cols, 0i32);
            for r in 0..rows {
                for c in 0..cols {
                    let base = match (r, c) {
                        (0, 0) => 1000,
                        (0, _) => g[(0, c - 1)],
                        (_, 0) => g[(r - 1, 0)],
                        _ => (g[(r - 1, c)] + g[(r, c - 1)]).div_euclid(2),
                    };
                    let step = rng.gen_range(-6..=6);
                    g[(r, c)] = (base + step).clamp(MIN_ELEVATION, MAX_ELEVATION);
                }
            }
            g
        }
    };
    HeightMap::new(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hm(rows: &[&[i32]]) -> HeightMap {
        HeightMap::from_rows(rows).unwrap()
    }

    #[test]
    fn parse_hgt_decodes_big_endian_rows() {
        let t = TileId::new(26, 57);
        let out = parse_hgt(&[0, 1, 0, 2, 0, 3, 0, 4], t).unwrap();
        assert_eq!(out.to_rows(), vec![vec![1, 2], vec![3, 4]]);
    }

    #[test]
    fn parse_hgt_full_srtm1_tile() {
        let bytes = vec![0u8; 3601 * 3601 * 2];
        assert_eq!(bytes.len(), 25_934_402);
        let out = parse_hgt(&bytes, TileId::new(26, 57)).unwrap();
        assert_eq!((out.rows(), out.cols()), (3601, 3601));
        assert!(out.cells().iter().all(|&v| v == 0));
    }

    #[test]
    fn parse_hgt_keeps_voids_and_negatives() {
        let bytes = [0x80, 0x00, 0xff, 0xf6, 0x00, 0x00, 0x23, 0x28];
        let out = parse_hgt(&bytes, TileId::new(0, 0)).unwrap();
        assert_eq!(out.to_rows(), vec![vec![-32768, -10], vec![0, 9000]]);
        assert_eq!(out.void_count(), 1);
        assert_eq!(encode_hgt(&out).unwrap(), bytes);
    }

    #[test]
    fn parse_hgt_rejects_bad_sizes() {
        let t = TileId::new(0, 0);
        for len in [0, 1, 3, 6, 10] {
            assert!(
                matches!(parse_hgt(&vec![0; len], t), Err(Error::MalformedFile(_))),
                "{len}"
            );
        }
    }

    #[test]
    fn parse_hgt_rejects_out_of_range_elevation() {
        // 0x2712 = 10002 m
        assert!(parse_hgt(&[0x27, 0x12], TileId::new(0, 0)).is_err());
    }

    #[test]
    fn tile_id_round_trips_names() {
        let t: TileId = "N26E057".parse().unwrap();
        assert_eq!(t, TileId::new(26, 57));
        assert_eq!(t.to_string(), "N26E057");
        let s: TileId = "s03w071".parse().unwrap();
        assert_eq!(s, TileId::new(-3, -71));
        assert_eq!(s.to_string(), "S03W071");
        assert_eq!(
            TileId::from_path(Path::new("/data/N35E047.hgt")).unwrap(),
            TileId::new(35, 47)
        );
        for bad in ["", "X26E057", "N26", "N26Q057", "NE057", "N26E", "N91E000"] {
            assert!(bad.parse::<TileId>().is_err(), "{bad}");
        }
    }

    #[test]
    fn window_copies_sub_grid() {
        let src = hm(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let w = window(&src, 1, 1, 2, 2).unwrap();
        assert_eq!(w.to_rows(), vec![vec![5, 6], vec![8, 9]]);
        assert_eq!(window(&src, 0, 0, 3, 3).unwrap(), src);
    }

    #[test]
    fn window_errors() {
        let src = hm(&[&[1, 2, 3], &[4, -32768, 6], &[7, 8, 9]]);
        assert!(matches!(window(&src, 2, 2, 2, 1), Err(Error::Range(_))));
        assert!(matches!(window(&src, 0, 0, 0, 1), Err(Error::Range(_))));
        assert!(matches!(
            window(&src, usize::MAX, 0, 2, 1),
            Err(Error::Range(_))
        ));
        assert!(matches!(
            window(&src, 0, 0, 2, 2),
            Err(Error::VoidData { row: 1, col: 1 })
        ));
        assert_eq!(
            window(&src, 0, 0, 1, 3).unwrap().to_rows(),
            vec![vec![1, 2, 3]]
        );
    }

    #[test]
    fn downsample_identity_and_constant() {
        let src = synthetic_terrain(SyntheticKind::RandomWalk, 9, 7, 3).unwrap();
        assert_eq!(downsample_bilinear(&src, 1).unwrap().cells(), src.cells());
        let flat = HeightMap::new(Grid::filled(17, 12, 7)).unwrap();
        for f in 1..=12 {
            let d = downsample_bilinear(&flat, f).unwrap();
            assert_eq!((d.rows(), d.cols()), (17 / f, 12 / f));
            assert!(d.cells().iter().all(|&v| v == 7));
        }
    }

    #[test]
    fn downsample_averages_even_factor_blocks() {
        // Factor 2 samples the exact center of each 2x2 block.
        let src = hm(&[&[0, 2, 10, 10], &[4, 6, 10, 11]]);
        let d = downsample_bilinear(&src, 2).unwrap();
        assert_eq!(d.to_rows(), vec![vec![3, 10]]);
    }

    #[test]
    fn downsample_srtm_tile_dims() {
        let src = HeightMap::new(Grid::filled(3601, 3601, 12)).unwrap();
        let d = downsample_bilinear(&src, 8).unwrap();
        assert_eq!((d.rows(), d.cols()), (450, 450));
    }

    #[test]
    fn downsample_errors() {
        let src = hm(&[&[1, 2, 3], &[4, -32768, 6]]);
        assert!(matches!(downsample_bilinear(&src, 0), Err(Error::Range(_))));
        assert!(matches!(downsample_bilinear(&src, 3), Err(Error::Range(_))));
        assert!(matches!(
            downsample_bilinear(&src, 2),
            Err(Error::VoidData { .. })
        ));
    }

    #[test]
    fn ascii_grid_parse_and_write() {
        let text = "ncols 2\nnrows 1\n5 6\n";
        assert_eq!(read_ascii_grid(text).unwrap().to_rows(), vec![vec![5, 6]]);

        let src = hm(&[&[1, 2], &[3, 4]]);
        let written = write_ascii_grid(&src);
        assert_eq!(
            written,
            "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -32768\n1 2\n3 4\n"
        );
        assert_eq!(read_ascii_grid(&written).unwrap(), src);
    }

    #[test]
    fn ascii_grid_errors() {
        for text in [
            "ncols 2\nnrows 1\n5 6 7\n",
            "ncols 2\n5 6\n",
            "nrows 1\n5 6\n",
            "ncols 2\nnrows 2\n5 6\n",
            "ncols 2\nnrows 1\n5 x\n",
            "ncols 2\nnrows 1\n5 6\n7 8\n",
            "ncols 2\nnrows 1\nbogus 3\n5 6\n",
            "ncols\nnrows 1\n5 6\n",
        ] {
            assert!(
                matches!(read_ascii_grid(text), Err(Error::Parse { .. })),
                "{text:?}"
            );
        }
    }

    #[test]
    fn ascii_grid_keeps_georef_and_nodata() {
        let text = "NCOLS 1\nNROWS 2\nXLLCORNER 57.25\nyllcorner 26.5\ncellsize 0.0022\nnodata_value -9999\n-9999\n12\n";
        let g = read_ascii_grid(text).unwrap();
        assert_eq!(g.nodata(), -9999);
        assert_eq!(g.void_count(), 1);
        assert_eq!(g.georef().xllcorner, 57.25);
        assert_eq!(read_ascii_grid(&write_ascii_grid(&g)).unwrap(), g);
    }

    #[test]
    fn pgm_render() {
        let out = render_pgm(&hm(&[&[0, 100]]));
        assert_eq!(out, b"P5\n2 1\n65535\n\x00\x00\xff\xff");

        let flat = render_pgm(&hm(&[&[3, 3], &[3, 3]]));
        let header = b"P5\n2 2\n65535\n";
        assert_eq!(&flat[..header.len()], header);
        assert_eq!(flat.len(), header.len() + 8);
        assert!(flat[header.len()..].chunks(2).all(|s| s == [0x80, 0x00]));
    }

    #[test]
    fn synthetic_fixtures() {
        let ramp = synthetic_terrain(SyntheticKind::Ramp, 2, 3, 0).unwrap();
        assert_eq!(ramp.to_rows(), vec![vec![0, 1, 2], vec![0, 1, 2]]);

        for kind in [SyntheticKind::Sine, SyntheticKind::RandomWalk] {
            let a = synthetic_terrain(kind, 30, 20, 11).unwrap();
            let b = synthetic_terrain(kind, 30, 20, 11).unwrap();
            assert_eq!(a, b);
            a.check_elevation_range().unwrap();
        }

        let sine = synthetic_terrain(SyntheticKind::Sine, 40, 40, 0).unwrap();
        let (lo, hi) = sine.value_range().unwrap();
        assert!(lo >= 900 && hi <= 1100 && hi - lo > 150);
        // 16 px period along both axes.
        for r in 0..24 {
            for c in 0..24 {
                assert_eq!(sine.get(r, c), sine.get(r + 16, c));
                assert_eq!(sine.get(r, c), sine.get(r, c + 16));
            }
        }
        assert!(synthetic_terrain(SyntheticKind::Sine, 0, 3, 0).is_err());
    }

    #[test]
    fn random_walk_is_clamped() {
        let big = synthetic_terrain(SyntheticKind::RandomWalk, 200, 200, 5).unwrap();
        big.check_elevation_range().unwrap();
    }
}
