//! Slow, obviously-correct reference implementations shared by the
//! integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wfc_terrain::wfc::{Direction, Pattern, PatternCatalog};
use wfc_terrain::{Grid, HeightMap};

/// Whether `b` may sit on the `dir` side of `a`, compared value by value.
pub fn compatible(a: &Pattern, b: &Pattern, dir: Direction) -> bool {
    match dir {
        Direction::Right => (0..2).all(|r| a.gx(r, 1) == b.gx(r, 0) && a.gy(r, 1) == b.gy(r, 0)),
        Direction::Down => (0..2).all(|c| a.gx(1, c) == b.gx(0, c) && a.gy(1, c) == b.gy(0, c)),
        Direction::Left => compatible(b, a, Direction::Right),
        Direction::Up => compatible(b, a, Direction::Down),
    }
}

/// All-pairs adjacency, indexed `[dir.index()][a]`, ids ascending.
pub fn brute_force_adjacency(catalog: &PatternCatalog) -> Vec<Vec<Vec<u32>>> {
    let n = catalog.len();
    Direction::ALL
        .iter()
        .map(|&dir| {
            (0..n)
                .map(|a| {
                    (0..n)
                        .filter(|&b| compatible(catalog.pattern(a), catalog.pattern(b), dir))
                        .map(|b| b as u32)
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Every assignment of pattern ids to a `rows × cols` cell grid in which all
/// horizontal and vertical neighbors are compatible.
pub fn enumerate_tilings(
    catalog: &PatternCatalog,
    rows: usize,
    cols: usize,
) -> BTreeSet<Vec<usize>> {
    fn place(
        catalog: &PatternCatalog,
        rows: usize,
        cols: usize,
        cur: &mut Vec<usize>,
        out: &mut BTreeSet<Vec<usize>>,
    ) {
        let i = cur.len();
        if i == rows * cols {
            out.insert(cur.clone());
            return;
        }
        let (r, c) = (i / cols, i % cols);
        for id in 0..catalog.len() {
            let p = catalog.pattern(id);
            if c > 0 && !compatible(catalog.pattern(cur[i - 1]), p, Direction::Right) {
                continue;
            }
            if r > 0 && !compatible(catalog.pattern(cur[i - cols]), p, Direction::Down) {
                continue;
            }
            cur.push(id);
            place(catalog, rows, cols, cur, out);
            cur.pop();
        }
    }
    let mut out = BTreeSet::new();
    place(catalog, rows, cols, &mut Vec::new(), &mut out);
    out
}

/// Full-sweep arc consistency: repeatedly drops any candidate lacking a
/// compatible candidate in some in-bounds neighbor until nothing changes.
/// `None` if a domain empties.
pub fn naive_fixpoint(
    catalog: &PatternCatalog,
    rows: usize,
    cols: usize,
    mut domains: Vec<BTreeSet<usize>>,
) -> Option<Vec<BTreeSet<usize>>> {
    loop {
        let mut changed = false;
        for cell in 0..rows * cols {
            let (r, c) = (cell / cols, cell % cols);
            for dir in Direction::ALL {
                let (dr, dc) = dir.offset();
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr as usize >= rows || nc as usize >= cols {
                    continue;
                }
                let next = nr as usize * cols + nc as usize;
                let keep: BTreeSet<usize> = domains[cell]
                    .iter()
                    .copied()
                    .filter(|&p| {
                        domains[next]
                            .iter()
                            .any(|&q| compatible(catalog.pattern(p), catalog.pattern(q), dir))
                    })
                    .collect();
                if keep.len() != domains[cell].len() {
                    changed = true;
                    domains[cell] = keep;
                }
            }
            if domains[cell].is_empty() {
                return None;
            }
        }
        if !changed {
            return Some(domains);
        }
    }
}

/// Void-free heightmap with values uniform in `lo..=hi`.
pub fn random_heightmap(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    lo: i32,
    hi: i32,
) -> HeightMap {
    let cells = Grid::from_fn(rows, cols, |_, _| rng.gen_range(lo..=hi));
    HeightMap::new(cells).expect("void-free")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Catalog of `n` distinct patterns whose components are drawn from a small
/// range so that many pairs overlap.
pub fn random_catalog(rng: &mut ChaCha8Rng, n: usize, spread: i32) -> PatternCatalog {
    let mut seen = BTreeSet::new();
    while seen.len() < n {
        let mut c = [0i32; 8];
        for v in &mut c {
            *v = rng.gen_range(-spread..=spread);
        }
        seen.insert(c);
    }
    PatternCatalog::from_counts(
        seen.into_iter()
            .map(|c| (Pattern::new(c), rng.gen_range(1..=5u64))),
    )
    .expect("valid catalog")
}
