use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gradient::GradientField;

/// Side length of the spatial window.
pub const PATTERN_SIZE: usize = 2;
/// Slope channels per cell (gx, gy).
pub const CHANNELS: usize = 2;
/// Integer components per pattern.
pub const PATTERN_LEN: usize = PATTERN_SIZE * PATTERN_SIZE * CHANNELS;

/// Neighbor direction on the wave grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Right,
    Down,
    Left,
    Up,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Right,
        Direction::Down,
        Direction::Left,
        Direction::Up,
    ];

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Right => Direction::Left,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Up => Direction::Down,
        }
    }

    /// `(d_row, d_col)` step.
    pub fn offset(self) -> (isize, isize) {
        match self {
            Direction::Right => (0, 1),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Up => (-1, 0),
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Direction::Right => 'R',
            Direction::Down => 'D',
            Direction::Left => 'L',
            Direction::Up => 'U',
        }
    }
}

/// A 2×2 window over both slope channels.
///
/// Component order is `gx00 gx01 gx10 gx11 gy00 gy01 gy10 gy11` (row, col),
/// which is also the canonical sort order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern([i32; PATTERN_LEN]);

impl Pattern {
    pub fn new(components: [i32; PATTERN_LEN]) -> Self {
        Pattern(components)
    }

    pub fn from_channels(gx: [[i32; 2]; 2], gy: [[i32; 2]; 2]) -> Self {
        Pattern([
            gx[0][0], gx[0][1], gx[1][0], gx[1][1], gy[0][0], gy[0][1], gy[1][0], gy[1][1],
        ])
    }

    /// Every component equal to one slope pair.
    pub fn uniform(gx: i32, gy: i32) -> Self {
        Pattern([gx, gx, gx, gx, gy, gy, gy, gy])
    }

    pub fn components(&self) -> &[i32; PATTERN_LEN] {
        &self.0
    }

    pub fn gx(&self, row: usize, col: usize) -> i32 {
        self.0[row * PATTERN_SIZE + col]
    }

    pub fn gy(&self, row: usize, col: usize) -> i32 {
        self.0[PATTERN_SIZE * PATTERN_SIZE + row * PATTERN_SIZE + col]
    }

    /// The row or column on `side`, as `[gx a, gx b, gy a, gy b]`.
    pub fn edge(&self, side: Direction) -> [i32; 4] {
        let cells = match side {
            Direction::Right => [(0, 1), (1, 1)],
            Direction::Left => [(0, 0), (1, 0)],
            Direction::Down => [(1, 0), (1, 1)],
            Direction::Up => [(0, 0), (0, 1)],
        };
        let [a, b] = cells;
        [
            self.gx(a.0, a.1),
            self.gx(b.0, b.1),
            self.gy(a.0, a.1),
            self.gy(b.0, b.1),
        ]
    }

    /// Window of `field` whose top-left cell is `(row, col)`.
    pub fn at(field: &GradientField, row: usize, col: usize) -> Self {
        let (gx, gy) = (field.gx(), field.gy());
        Pattern([
            gx[(row, col)],
            gx[(row, col + 1)],
            gx[(row + 1, col)],
            gx[(row + 1, col + 1)],
            gy[(row, col)],
            gy[(row, col + 1)],
            gy[(row + 1, col)],
            gy[(row + 1, col + 1)],
        ])
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// `b` may sit on the `dir` side of `a`: the shared row or column is equal
/// on both channels.
pub fn overlap_compatible(a: &Pattern, b: &Pattern, dir: Direction) -> bool {
    a.edge(dir) == b.edge(dir.opposite())
}

/// Deduplicated patterns in canonical (lexicographic) order, with counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternCatalog {
    patterns: Vec<Pattern>,
    frequencies: Vec<u64>,
}

impl PatternCatalog {
    /// Merges duplicate patterns by summing counts. Every count must be ≥ 1.
    pub fn from_counts(entries: impl IntoIterator<Item = (Pattern, u64)>) -> Result<Self> {
        let mut merged = BTreeMap::new();
        for (p, n) in entries {
            if n == 0 {
                return Err(Error::Model(format!("pattern [{p}] has zero frequency")));
            }
            let slot = merged.entry(p).or_insert(0u64);
            *slot = slot
                .checked_add(n)
                .ok_or_else(|| Error::Model("pattern frequency overflow".into()))?;
        }
        Ok(Self::from_map(merged))
    }

    fn from_map(map: BTreeMap<Pattern, u64>) -> Self {
        let (patterns, frequencies) = map.into_iter().unzip();
        PatternCatalog {
            patterns,
            frequencies,
        }
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn pattern(&self, id: usize) -> &Pattern {
        &self.patterns[id]
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequencies
    }

    pub fn frequency(&self, id: usize) -> u64 {
        self.frequencies[id]
    }

    pub fn total_count(&self) -> u64 {
        self.frequencies.iter().sum()
    }

    pub fn id_of(&self, pattern: &Pattern) -> Option<usize> {
        self.patterns.binary_search(pattern).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Pattern, u64)> + '_ {
        self.patterns
            .iter()
            .zip(&self.frequencies)
            .enumerate()
            .map(|(i, (p, &n))| (i, p, n))
    }
}

/// Slides the 2×2 window over every field without wraparound and counts
/// each distinct pattern.
pub fn extract_patterns(fields: &[GradientField]) -> Result<PatternCatalog> {
    let mut counts: BTreeMap<Pattern, u64> = BTreeMap::new();
    for (i, f) in fields.iter().enumerate() {
        if f.rows() < PATTERN_SIZE || f.cols() < PATTERN_SIZE {
            return Err(Error::Range(format!(
                "field {i} is {}x{}, smaller than the {PATTERN_SIZE}x{PATTERN_SIZE} window",
                f.rows(),
                f.cols()
            )));
        }
        for r in 0..f.rows() - 1 {
            for c in 0..f.cols() - 1 {
                *counts.entry(Pattern::at(f, r, c)).or_insert(0) += 1;
            }
        }
    }
    Ok(PatternCatalog::from_map(counts))
}
