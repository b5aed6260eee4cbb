use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gradient::GradientField;
use crate::grid::Grid;
use crate::wfc::model::Model;
use crate::wfc::pattern::PatternCatalog;
use crate::wfc::wave::{Selection, WaveGrid};

pub const DEFAULT_MAX_RESTARTS: u32 = 100;

/// A successful generation and the attempt that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub field: GradientField,
    pub seed: u64,
    /// Zero-based index of the winning attempt.
    pub attempt: u32,
}

impl Generated {
    pub fn attempts_used(&self) -> u32 {
        self.attempt + 1
    }
}

/// Rng for attempt `attempt` of a run seeded with `seed`: the seed picks the
/// ChaCha key and the attempt index picks the stream.
pub fn attempt_rng(seed: u64, attempt: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::from(attempt));
    rng
}

/// Runs one observe/propagate attempt on a `rows × cols` cell grid.
/// `Ok(None)` means the attempt hit a contradiction.
pub fn run_attempt(
    model: &Model,
    rows: usize,
    cols: usize,
    seed: u64,
    attempt: u32,
) -> Result<Option<GradientField>> {
    let mut grid = WaveGrid::new(model, rows, cols, attempt_rng(seed, attempt))?;
    if grid.prune_unsupported(model.rules()).is_err() {
        return Ok(None);
    }
    loop {
        match grid.min_entropy_cell() {
            Err(_) => return Ok(None),
            Ok(Selection::Done) => return decode(&grid, model.catalog()).map(Some),
            Ok(Selection::Cell(cell)) => {
                grid.observe(model.catalog(), cell)?;
                if grid.propagate(model.rules(), cell).is_err() {
                    return Ok(None);
                }
            }
        }
    }
}

/// Generates a field from `rows × cols` pattern cells, restarting from a
/// fresh grid on contradiction. The output field is `(rows+1) × (cols+1)`.
pub fn generate(
    model: &Model,
    rows: usize,
    cols: usize,
    seed: u64,
    max_restarts: u32,
) -> Result<Generated> {
    check_restarts(max_restarts)?;
    for attempt in 0..max_restarts {
        if let Some(field) = run_attempt(model, rows, cols, seed, attempt)? {
            log::debug!("attempt {attempt} succeeded (seed {seed})");
            return Ok(Generated {
                field,
                seed,
                attempt,
            });
        }
        log::debug!("attempt {attempt} contradicted (seed {seed})");
    }
    Err(Error::GenerationFailed {
        attempts: max_restarts,
    })
}

/// Runs attempts in batches of `threads` and returns the lowest-index
/// success, so the result is identical to [`generate`] with the same
/// arguments.
pub fn generate_parallel(
    model: &Model,
    rows: usize,
    cols: usize,
    seed: u64,
    max_restarts: u32,
    threads: usize,
) -> Result<Generated> {
    check_restarts(max_restarts)?;
    let threads = threads.max(1) as u32;
    if threads == 1 {
        return generate(model, rows, cols, seed, max_restarts);
    }
    let mut start = 0;
    while start < max_restarts {
        let end = start.saturating_add(threads).min(max_restarts);
        let results: Vec<Result<Option<GradientField>>> = std::thread::scope(|s| {
            let handles: Vec<_> = (start..end)
                .map(|attempt| s.spawn(move || run_attempt(model, rows, cols, seed, attempt)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("generation thread panicked"))
                .collect()
        });
        for (offset, res) in results.into_iter().enumerate() {
            if let Some(field) = res? {
                return Ok(Generated {
                    field,
                    seed,
                    attempt: start + offset as u32,
                });
            }
        }
        start = end;
    }
    Err(Error::GenerationFailed {
        attempts: max_restarts,
    })
}

fn check_restarts(max_restarts: u32) -> Result<()> {
    if max_restarts == 0 {
        return Err(Error::Range("max_restarts must be at least 1".into()));
    }
    Ok(())
}

/// Turns a collapsed grid into its overlapping gradient field.
pub fn decode(grid: &WaveGrid, catalog: &PatternCatalog) -> Result<GradientField> {
    let ids = grid
        .collapsed_ids()
        .ok_or_else(|| Error::Logic("decode called on an uncollapsed wave grid".into()))?;
    decode_ids(grid.rows(), grid.cols(), &ids, catalog)
}

/// Field value `(y, x)` comes from the pattern at cell
/// `(min(y, rows-1), min(x, cols-1))`. Every pattern is then checked against
/// the output, which fails if some neighboring pair does not overlap.
pub fn decode_ids(
    rows: usize,
    cols: usize,
    ids: &[usize],
    catalog: &PatternCatalog,
) -> Result<GradientField> {
    if rows == 0 || cols == 0 || ids.len() != rows * cols {
        return Err(Error::Logic(format!(
            "{} pattern ids do not fill a {rows}x{cols} grid",
            ids.len()
        )));
    }
    if let Some(&bad) = ids.iter().find(|&&id| id >= catalog.len()) {
        return Err(Error::Logic(format!("pattern id {bad} not in catalog")));
    }
    let at = |r: usize, c: usize| catalog.pattern(ids[r * cols + c]);
    let pick = |y: usize, x: usize| {
        let (r, c) = (y.min(rows - 1), x.min(cols - 1));
        (at(r, c), y - r, x - c)
    };
    let gx = Grid::from_fn(rows + 1, cols + 1, |y, x| {
        let (p, dy, dx) = pick(y, x);
        p.gx(dy, dx)
    });
    let gy = Grid::from_fn(rows + 1, cols + 1, |y, x| {
        let (p, dy, dx) = pick(y, x);
        p.gy(dy, dx)
    });
    for r in 0..rows {
        for c in 0..cols {
            let p = at(r, c);
            for dy in 0..2 {
                for dx in 0..2 {
                    if p.gx(dy, dx) != gx[(r + dy, c + dx)] || p.gy(dy, dx) != gy[(r + dy, c + dx)]
                    {
                        return Err(Error::Logic(format!(
                            "pattern at cell ({r}, {c}) disagrees with its neighbors"
                        )));
                    }
                }
            }
        }
    }
    GradientField::new(gx, gy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wfc::pattern::{extract_patterns, Pattern};

    fn constant_model() -> Model {
        let cat = PatternCatalog::from_counts([(Pattern::uniform(3, -1), 2)]).unwrap();
        Model::from_catalog(cat)
    }

    #[test]
    fn constant_model_fills_any_size() {
        let m = constant_model();
        for (r, c) in [(1, 1), (2, 5), (7, 3)] {
            let out = generate(&m, r, c, 0, 1).unwrap();
            assert_eq!(out.attempt, 0);
            assert_eq!((out.field.rows(), out.field.cols()), (r + 1, c + 1));
            assert!(out.field.gx().iter().all(|&v| v == 3));
            assert!(out.field.gy().iter().all(|&v| v == -1));
        }
    }

    #[test]
    fn decode_single_cell() {
        let p = Pattern::from_channels([[1, 2], [3, 4]], [[5, 6], [7, 8]]);
        let cat = PatternCatalog::from_counts([(p, 1)]).unwrap();
        let f = decode_ids(1, 1, &[0], &cat).unwrap();
        assert_eq!(f.gx().to_rows(), vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(f.gy().to_rows(), vec![vec![5, 6], vec![7, 8]]);
    }

    #[test]
    fn decode_constant_grid() {
        let cat = PatternCatalog::from_counts([(Pattern::uniform(2, 2), 1)]).unwrap();
        let f = decode_ids(3, 3, &[0; 9], &cat).unwrap();
        assert_eq!((f.rows(), f.cols()), (4, 4));
        assert!(f.gx().iter().all(|&v| v == 2));
    }

    #[test]
    fn decode_rejects_bad_input() {
        let a = Pattern::uniform(0, 0);
        let b = Pattern::uniform(1, 0);
        let cat = PatternCatalog::from_counts([(a, 1), (b, 1)]).unwrap();
        assert!(matches!(
            decode_ids(1, 2, &[0, 1], &cat),
            Err(Error::Logic(_))
        ));
        assert!(matches!(decode_ids(1, 2, &[0], &cat), Err(Error::Logic(_))));
        assert!(matches!(decode_ids(1, 1, &[5], &cat), Err(Error::Logic(_))));

        let m = Model::from_catalog(cat);
        let g = WaveGrid::new(&m, 1, 1, attempt_rng(0, 0)).unwrap();
        assert!(matches!(decode(&g, m.catalog()), Err(Error::Logic(_))));
    }

    #[test]
    fn generation_is_deterministic() {
        let f = GradientField::from_rows(
            &[
                &[0, 1, 0, 1, 1],
                &[1, 0, 1, 0, 0],
                &[0, 1, 0, 0, 1],
                &[1, 1, 0, 1, 0],
            ],
            &[
                &[0, 0, 1, 0, 0],
                &[1, 0, 0, 0, 1],
                &[0, 0, 0, 1, 0],
                &[0, 1, 0, 0, 0],
            ],
        )
        .unwrap();
        let m = Model::from_fields(&[f]).unwrap();
        let a = generate(&m, 4, 4, 17, 50);
        let b = generate(&m, 4, 4, 17, 50);
        match (a, b) {
            (Ok(a), Ok(b)) => assert_eq!(a, b),
            (
                Err(Error::GenerationFailed { attempts: x }),
                Err(Error::GenerationFailed { attempts: y }),
            ) => {
                assert_eq!(x, y)
            }
            other => panic!("runs diverged: {other:?}"),
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let hm =
            crate::raster_io::synthetic_terrain(crate::raster_io::SyntheticKind::Sine, 24, 24, 1)
                .unwrap();
        let m = Model::from_fields(&[crate::gradient::compute_gradients(&hm).unwrap()]).unwrap();
        for seed in 0..4 {
            let seq = generate(&m, 8, 8, seed, 20).unwrap();
            let par = generate_parallel(&m, 8, 8, seed, 20, 3).unwrap();
            assert_eq!(seq, par);
        }
    }

    #[test]
    fn exhausted_restarts_report_attempts() {
        // A needs B on its right, B has nothing on its right: no 1x3 tiling.
        let a = Pattern::from_channels([[0, 1], [0, 1]], [[0, 0], [0, 0]]);
        let b = Pattern::from_channels([[1, 5], [1, 5]], [[0, 0], [0, 0]]);
        let m = Model::from_catalog(PatternCatalog::from_counts([(a, 1), (b, 1)]).unwrap());
        assert!(matches!(
            generate(&m, 1, 3, 0, 7),
            Err(Error::GenerationFailed { attempts: 7 })
        ));
        assert!(matches!(
            generate_parallel(&m, 1, 3, 0, 7, 4),
            Err(Error::GenerationFailed { attempts: 7 })
        ));
        assert!(matches!(generate(&m, 1, 3, 0, 0), Err(Error::Range(_))));
        // But 1x2 works.
        assert!(generate(&m, 1, 2, 0, 1).is_ok());
    }

    #[test]
    fn decoded_output_reextracts_to_cell_patterns() {
        let hm =
            crate::raster_io::synthetic_terrain(crate::raster_io::SyntheticKind::Sine, 20, 20, 3)
                .unwrap();
        let m = Model::from_fields(&[crate::gradient::compute_gradients(&hm).unwrap()]).unwrap();
        let rows = 6;
        let cols = 7;
        let mut grid = WaveGrid::new(&m, rows, cols, attempt_rng(5, 0)).unwrap();
        grid.prune_unsupported(m.rules()).unwrap();
        // Drive to completion, restarting on contradiction.
        let mut attempt = 0;
        let ids = loop {
            let mut ok = true;
            while let Ok(Selection::Cell(c)) = grid.min_entropy_cell() {
                grid.observe(m.catalog(), c).unwrap();
                if grid.propagate(m.rules(), c).is_err() {
                    ok = false;
                    break;
                }
            }
            if ok {
                if let Some(ids) = grid.collapsed_ids() {
                    break ids;
                }
            }
            attempt += 1;
            grid = WaveGrid::new(&m, rows, cols, attempt_rng(5, attempt)).unwrap();
            grid.prune_unsupported(m.rules()).unwrap();
        };
        let field = decode_ids(rows, cols, &ids, m.catalog()).unwrap();
        for r in 0..rows {
            for c in 0..cols {
                let p = Pattern::at(&field, r, c);
                assert_eq!(m.catalog().id_of(&p), Some(ids[r * cols + c]));
            }
        }
        let cat = extract_patterns(&[field]).unwrap();
        assert!(cat
            .patterns()
            .iter()
            .all(|p| m.catalog().id_of(p).is_some()));
    }
}
