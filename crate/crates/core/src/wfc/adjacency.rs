use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::wfc::pattern::{Direction, PatternCatalog};

/// Per-pattern, per-direction sorted lists of compatible pattern ids.
///
/// `b ∈ allowed(a, d)` iff `a ∈ allowed(b, d.opposite())`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyRules {
    // Indexed by Direction::index(), then pattern id.
    allowed: [Vec<Vec<u32>>; 4],
}

impl AdjacencyRules {
    /// Builds rules from RIGHT and DOWN lists; LEFT and UP are mirrored.
    pub fn from_forward(right: Vec<Vec<u32>>, down: Vec<Vec<u32>>) -> Result<Self> {
        let n = right.len();
        if down.len() != n {
            return Err(Error::Model(format!(
                "RIGHT lists cover {n} patterns but DOWN lists cover {}",
                down.len()
            )));
        }
        let mut left = vec![Vec::new(); n];
        let mut up = vec![Vec::new(); n];
        let mirror = |lists: &mut Vec<Vec<u32>>, back: &mut [Vec<u32>], name: char| {
            for (a, list) in lists.iter_mut().enumerate() {
                list.sort_unstable();
                list.dedup();
                for &b in list.iter() {
                    let slot = back.get_mut(b as usize).ok_or_else(|| {
                        Error::Model(format!("adj {a} {name} references unknown pattern {b}"))
                    })?;
                    slot.push(a as u32);
                }
            }
            Ok::<_, Error>(())
        };
        let mut right = right;
        let mut down = down;
        mirror(&mut right, &mut left, 'R')?;
        mirror(&mut down, &mut up, 'D')?;
        // Pushed in ascending `a` order, so already sorted.
        Ok(AdjacencyRules {
            allowed: [right, down, left, up],
        })
    }

    pub fn pattern_count(&self) -> usize {
        self.allowed[0].len()
    }

    pub fn allowed(&self, id: usize, dir: Direction) -> &[u32] {
        &self.allowed[dir.index()][id]
    }

    pub fn contains(&self, a: usize, dir: Direction, b: usize) -> bool {
        self.allowed(a, dir).binary_search(&(b as u32)).is_ok()
    }

    /// Number of directed `(a, d, b)` entries over all four directions.
    pub fn rule_count(&self) -> usize {
        self.allowed.iter().flatten().map(Vec::len).sum()
    }

    /// Patterns compatible with themselves on every side; these tend to yield
    /// large repeated regions in the output.
    pub fn self_adjacent_everywhere(&self) -> Vec<usize> {
        (0..self.pattern_count())
            .filter(|&id| Direction::ALL.iter().all(|&d| self.contains(id, d, id)))
            .collect()
    }
}

/// Finds every overlap-compatible ordered pair by hashing boundary edges:
/// `b ∈ allowed(a, d)` iff `a.edge(d) == b.edge(d.opposite())`.
///
/// Cost is one hash insert per pattern per side plus the size of the result,
/// instead of a comparison for every pair.
pub fn infer_adjacency(catalog: &PatternCatalog) -> AdjacencyRules {
    let n = catalog.len();
    let index_side = |side: Direction| {
        let mut index: HashMap<[i32; 4], Vec<u32>> = HashMap::with_capacity(n);
        for (id, p) in catalog.patterns().iter().enumerate() {
            index.entry(p.edge(side)).or_default().push(id as u32);
        }
        index
    };
    let lookup = |dir: Direction| -> Vec<Vec<u32>> {
        let index = index_side(dir.opposite());
        catalog
            .patterns()
            .iter()
            .map(|p| index.get(&p.edge(dir)).cloned().unwrap_or_default())
            .collect()
    };
    // Ids were pushed in ascending order, so every list is sorted.
    AdjacencyRules {
        allowed: [
            lookup(Direction::Right),
            lookup(Direction::Down),
            lookup(Direction::Left),
            lookup(Direction::Up),
        ],
    }
}
