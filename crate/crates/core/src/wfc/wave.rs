//! Superposition state and the observe/propagate primitives.

use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::wfc::adjacency::AdjacencyRules;
use crate::wfc::model::Model;
use crate::wfc::pattern::{Direction, PatternCatalog};

/// Fixed-capacity bitset of candidate pattern ids.
///
/// Membership test is O(1); iteration skips empty words, so it costs
/// O(members + capacity / 64).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    words: Vec<u64>,
    len: usize,
    capacity: usize,
}

impl Domain {
    pub fn empty(capacity: usize) -> Self {
        Domain {
            words: vec![0; capacity.div_ceil(64)],
            len: 0,
            capacity,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut d = Domain::empty(capacity);
        d.fill();
        d
    }

    pub fn from_ids(capacity: usize, ids: impl IntoIterator<Item = usize>) -> Self {
        let mut d = Domain::empty(capacity);
        for id in ids {
            d.insert(id);
        }
        d
    }

    fn fill(&mut self) {
        self.words.fill(u64::MAX);
        let tail = self.capacity % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last = (1u64 << tail) - 1;
            }
        }
        self.len = self.capacity;
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
        self.len = 0;
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, id: usize) -> bool {
        id < self.capacity && self.words[id / 64] & (1 << (id % 64)) != 0
    }

    pub fn insert(&mut self, id: usize) -> bool {
        assert!(id < self.capacity, "pattern id {id} out of range");
        let (w, bit) = (id / 64, 1u64 << (id % 64));
        let added = self.words[w] & bit == 0;
        self.words[w] |= bit;
        self.len += usize::from(added);
        added
    }

    pub fn remove(&mut self, id: usize) -> bool {
        if id >= self.capacity {
            return false;
        }
        let (w, bit) = (id / 64, 1u64 << (id % 64));
        let present = self.words[w] & bit != 0;
        self.words[w] &= !bit;
        self.len -= usize::from(present);
        present
    }

    /// Keeps only ids also in `other`. Returns whether anything was removed.
    pub fn intersect_with(&mut self, other: &Domain) -> bool {
        debug_assert_eq!(self.capacity, other.capacity);
        let mut len = 0;
        for (a, &b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
            len += a.count_ones() as usize;
        }
        let changed = len != self.len;
        self.len = len;
        changed
    }

    /// The sole member, if exactly one.
    pub fn single(&self) -> Option<usize> {
        if self.len == 1 {
            self.iter().next()
        } else {
            None
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

/// Result of scanning for the next cell to observe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Cell(usize),
    Done,
}

/// Some cell has no candidate left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contradiction {
    pub cell: usize,
}

/// Grid of candidate sets, one pattern slot per cell, plus the rng driving
/// observation.
#[derive(Debug, Clone)]
pub struct WaveGrid {
    rows: usize,
    cols: usize,
    pattern_count: usize,
    domains: Vec<Domain>,
    rng: ChaCha8Rng,
    scratch: Domain,
}

impl WaveGrid {
    /// Every cell starts with every pattern as a candidate.
    pub fn new(model: &Model, rows: usize, cols: usize, rng: ChaCha8Rng) -> Result<Self> {
        let pattern_count = model.catalog().len();
        if pattern_count == 0 {
            return Err(Error::Model("cannot generate from an empty catalog".into()));
        }
        if rows == 0 || cols == 0 {
            return Err(Error::Range(format!(
                "wave grid must be at least 1x1 cells, got {rows}x{cols}"
            )));
        }
        Ok(WaveGrid {
            rows,
            cols,
            pattern_count,
            domains: vec![Domain::full(pattern_count); rows * cols],
            rng,
            scratch: Domain::empty(pattern_count),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell_count(&self) -> usize {
        self.domains.len()
    }

    pub fn pattern_count(&self) -> usize {
        self.pattern_count
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        assert!(row < self.rows && col < self.cols);
        row * self.cols + col
    }

    pub fn coords(&self, cell: usize) -> (usize, usize) {
        (cell / self.cols, cell % self.cols)
    }

    pub fn domain(&self, cell: usize) -> &Domain {
        &self.domains[cell]
    }

    pub fn domains(&self) -> &[Domain] {
        &self.domains
    }

    pub fn neighbor(&self, cell: usize, dir: Direction) -> Option<usize> {
        let (r, c) = self.coords(cell);
        let (dr, dc) = dir.offset();
        let nr = r.checked_add_signed(dr).filter(|&v| v < self.rows)?;
        let nc = c.checked_add_signed(dc).filter(|&v| v < self.cols)?;
        Some(nr * self.cols + nc)
    }

    /// Narrows a cell to `ids ∩ current`. Does not propagate.
    pub fn restrict(&mut self, cell: usize, ids: &[usize]) -> bool {
        let keep = Domain::from_ids(self.pattern_count, ids.iter().copied());
        self.domains[cell].intersect_with(&keep)
    }

    pub fn is_collapsed(&self) -> bool {
        self.domains.iter().all(|d| d.len() == 1)
    }

    /// Pattern id per cell, or `None` while any cell is undecided.
    pub fn collapsed_ids(&self) -> Option<Vec<usize>> {
        self.domains.iter().map(Domain::single).collect()
    }

    /// Picks an uncollapsed cell with the fewest candidates, breaking ties
    /// uniformly with the grid's rng.
    pub fn min_entropy_cell(&mut self) -> std::result::Result<Selection, Contradiction> {
        let mut best = usize::MAX;
        let mut ties: Vec<usize> = Vec::new();
        for (cell, d) in self.domains.iter().enumerate() {
            match d.len() {
                0 => return Err(Contradiction { cell }),
                1 => {}
                n if n < best => {
                    best = n;
                    ties.clear();
                    ties.push(cell);
                }
                n if n == best => ties.push(cell),
                _ => {}
            }
        }
        Ok(match ties.len() {
            0 => Selection::Done,
            1 => Selection::Cell(ties[0]),
            n => Selection::Cell(ties[self.rng.gen_range(0..n)]),
        })
    }

    /// Collapses `cell` to one candidate drawn with probability proportional
    /// to its catalog frequency among the remaining candidates.
    pub fn observe(&mut self, catalog: &PatternCatalog, cell: usize) -> Result<usize> {
        let domain = &self.domains[cell];
        if domain.len() < 2 {
            return Err(Error::Logic(format!(
                "observe requires at least two candidates, cell {cell} has {}",
                domain.len()
            )));
        }
        let total: u64 = domain.iter().map(|id| catalog.frequency(id)).sum();
        let mut ticket = self.rng.gen_range(0..total);
        let mut chosen = None;
        for id in domain.iter() {
            let w = catalog.frequency(id);
            if ticket < w {
                chosen = Some(id);
                break;
            }
            ticket -= w;
        }
        let chosen = chosen.expect("ticket below total weight");
        let d = &mut self.domains[cell];
        d.clear();
        d.insert(chosen);
        Ok(chosen)
    }

    /// Restores arc consistency after `start` shrank.
    pub fn propagate(
        &mut self,
        rules: &AdjacencyRules,
        start: usize,
    ) -> std::result::Result<(), Contradiction> {
        self.propagate_from(rules, [start])
    }

    /// Worklist propagation: whenever a cell shrinks, each in-bounds
    /// neighbor drops candidates with no compatible supporter left in it.
    pub fn propagate_from(
        &mut self,
        rules: &AdjacencyRules,
        cells: impl IntoIterator<Item = usize>,
    ) -> std::result::Result<(), Contradiction> {
        let mut queued = vec![false; self.domains.len()];
        let mut work = VecDeque::new();
        for cell in cells {
            if self.domains[cell].is_empty() {
                return Err(Contradiction { cell });
            }
            if !queued[cell] {
                queued[cell] = true;
                work.push_back(cell);
            }
        }
        while let Some(cell) = work.pop_front() {
            queued[cell] = false;
            for dir in Direction::ALL {
                let Some(next) = self.neighbor(cell, dir) else {
                    continue;
                };
                if self.revise(rules, cell, next, dir) {
                    if self.domains[next].is_empty() {
                        return Err(Contradiction { cell: next });
                    }
                    if !queued[next] {
                        queued[next] = true;
                        work.push_back(next);
                    }
                }
            }
        }
        Ok(())
    }

    /// Removes, from every cell, candidates that have no compatible pattern
    /// at all on some in-bounds side, then propagates.
    pub fn prune_unsupported(
        &mut self,
        rules: &AdjacencyRules,
    ) -> std::result::Result<(), Contradiction> {
        let supported: Vec<Domain> = Direction::ALL
            .iter()
            .map(|&d| {
                Domain::from_ids(
                    self.pattern_count,
                    (0..self.pattern_count).filter(|&id| !rules.allowed(id, d).is_empty()),
                )
            })
            .collect();
        let mut changed = Vec::new();
        for cell in 0..self.domains.len() {
            let mut shrank = false;
            for dir in Direction::ALL {
                if self.neighbor(cell, dir).is_some() {
                    shrank |= self.domains[cell].intersect_with(&supported[dir.index()]);
                }
            }
            if self.domains[cell].is_empty() {
                return Err(Contradiction { cell });
            }
            if shrank {
                changed.push(cell);
            }
        }
        self.propagate_from(rules, changed)
    }

    /// Filters `to` (the `dir` neighbor of `from`) down to candidates that
    /// some candidate of `from` allows. Returns whether `to` shrank.
    fn revise(&mut self, rules: &AdjacencyRules, from: usize, to: usize, dir: Direction) -> bool {
        let src_len = self.domains[from].len();
        let dst_len = self.domains[to].len();
        if src_len <= dst_len {
            // Union of what each source candidate allows on that side.
            let mut allowed = std::mem::replace(&mut self.scratch, Domain::empty(0));
            allowed.clear();
            for p in self.domains[from].iter() {
                for &q in rules.allowed(p, dir) {
                    allowed.insert(q as usize);
                }
            }
            let changed = self.domains[to].intersect_with(&allowed);
            self.scratch = allowed;
            changed
        } else {
            let back = dir.opposite();
            let src = &self.domains[from];
            let doomed: Vec<usize> = self.domains[to]
                .iter()
                .filter(|&q| {
                    !rules
                        .allowed(q, back)
                        .iter()
                        .any(|&p| src.contains(p as usize))
                })
                .collect();
            for &q in &doomed {
                self.domains[to].remove(q);
            }
            !doomed.is_empty()
        }
    }
}
