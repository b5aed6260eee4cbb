//! Overlapping-model WaveFunctionCollapse over 2×2×2 slope patterns.
//!
//! Learning extracts every 2×2 window of every training field into a
//! [`PatternCatalog`] and pairs every two patterns whose shared row or column
//! match ([`AdjacencyRules`]). Generation repeatedly collapses the cell with
//! the fewest candidates and propagates, restarting from scratch on
//! contradiction.

pub mod adjacency;
pub mod model;
pub mod pattern;
pub mod solver;
pub mod wave;

pub use adjacency::{infer_adjacency, AdjacencyRules};
pub use model::{Model, FORMAT_VERSION, MODEL_HEADER};
pub use pattern::{
    extract_patterns, overlap_compatible, Direction, Pattern, PatternCatalog, PATTERN_SIZE,
};
pub use solver::{
    attempt_rng, decode, decode_ids, generate, generate_parallel, run_attempt, Generated,
    DEFAULT_MAX_RESTARTS,
};
pub use wave::{Contradiction, Domain, Selection, WaveGrid};
