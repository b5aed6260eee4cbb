//! Learned pattern model and its text file format.
//!
//! ```text
//! wfcterrain-model v1
//! pattern_size 2 channels 2 patterns <P>
//! pattern <id> <gx00 gx01 gx10 gx11 gy00 gy01 gy10 gy11> freq <n>
//! ...
//! adj <id> R <ids...>
//! adj <id> D <ids...>
//! ```
//!
//! LEFT and UP lists are rebuilt from RIGHT and DOWN on load.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{parse_err, Error, Result};
use crate::gradient::GradientField;
use crate::wfc::adjacency::{infer_adjacency, AdjacencyRules};
use crate::wfc::pattern::{
    extract_patterns, overlap_compatible, Direction, Pattern, PatternCatalog, CHANNELS,
    PATTERN_LEN, PATTERN_SIZE,
};

pub const MODEL_HEADER: &str = "wfcterrain-model v1";
pub const FORMAT_VERSION: u32 = 1;

/// Pattern catalog plus the adjacency rules over it. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    catalog: PatternCatalog,
    rules: AdjacencyRules,
}

impl Model {
    /// Checks that `rules` covers exactly the catalog, is symmetric, and only
    /// pairs overlap-compatible patterns.
    pub fn new(catalog: PatternCatalog, rules: AdjacencyRules) -> Result<Self> {
        if rules.pattern_count() != catalog.len() {
            return Err(Error::Model(format!(
                "rules cover {} patterns, catalog has {}",
                rules.pattern_count(),
                catalog.len()
            )));
        }
        for a in 0..catalog.len() {
            for dir in Direction::ALL {
                for &b in rules.allowed(a, dir) {
                    let b = b as usize;
                    if b >= catalog.len() {
                        return Err(Error::Model(format!("rule {a} {dir:?} -> unknown id {b}")));
                    }
                    if !overlap_compatible(catalog.pattern(a), catalog.pattern(b), dir) {
                        return Err(Error::Model(format!(
                            "patterns {a} and {b} do not overlap in direction {dir:?}"
                        )));
                    }
                    if !rules.contains(b, dir.opposite(), a) {
                        return Err(Error::Model(format!("rule {a} {dir:?} {b} has no mirror")));
                    }
                }
            }
        }
        Ok(Model { catalog, rules })
    }

    /// Infers every overlap-compatible adjacency over the catalog.
    pub fn from_catalog(catalog: PatternCatalog) -> Self {
        let rules = infer_adjacency(&catalog);
        Model { catalog, rules }
    }

    pub fn from_fields(fields: &[GradientField]) -> Result<Self> {
        Ok(Self::from_catalog(extract_patterns(fields)?))
    }

    pub fn catalog(&self) -> &PatternCatalog {
        &self.catalog
    }

    pub fn rules(&self) -> &AdjacencyRules {
        &self.rules
    }

    pub fn format_version(&self) -> u32 {
        FORMAT_VERSION
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{MODEL_HEADER}");
        let _ = writeln!(
            out,
            "pattern_size {PATTERN_SIZE} channels {CHANNELS} patterns {}",
            self.catalog.len()
        );
        for (id, p, freq) in self.catalog.iter() {
            let _ = writeln!(out, "pattern {id} {p} freq {freq}");
        }
        for id in 0..self.catalog.len() {
            for dir in [Direction::Right, Direction::Down] {
                let _ = write!(out, "adj {id} {}", dir.letter());
                for b in self.rules.allowed(id, dir) {
                    let _ = write!(out, " {b}");
                }
                out.push('\n');
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let (_, header) = lines
            .next()
            .ok_or_else(|| parse_err(1, "empty model file"))?;
        if header.trim() != MODEL_HEADER {
            return Err(Error::Model(format!(
                "unsupported model header {:?}, expected {MODEL_HEADER:?}",
                header.trim()
            )));
        }

        let (ln, dims) = lines
            .next()
            .ok_or_else(|| parse_err(2, "missing dimensions line"))?;
        let toks: Vec<&str> = dims.split_whitespace().collect();
        let count = match toks.as_slice() {
            ["pattern_size", size, "channels", ch, "patterns", n] => {
                let num = |s: &str| {
                    s.parse::<usize>()
                        .map_err(|_| parse_err(ln, format!("bad number {s:?}")))
                };
                if num(size)? != PATTERN_SIZE || num(ch)? != CHANNELS {
                    return Err(Error::Model(format!(
                        "only pattern_size {PATTERN_SIZE} with {CHANNELS} channels is supported"
                    )));
                }
                num(n)?
            }
            _ => {
                return Err(parse_err(
                    ln,
                    "expected `pattern_size 2 channels 2 patterns <P>`",
                ))
            }
        };

        let mut entries = Vec::with_capacity(count);
        let mut right: Vec<Option<Vec<u32>>> = vec![None; count];
        let mut down: Vec<Option<Vec<u32>>> = vec![None; count];
        for (ln, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first() {
                None => continue,
                Some(&"pattern") => {
                    if toks.len() != 2 + PATTERN_LEN + 2 || toks[2 + PATTERN_LEN] != "freq" {
                        return Err(parse_err(ln, "expected `pattern <id> <8 ints> freq <n>`"));
                    }
                    let id: usize = parse_num(ln, toks[1])?;
                    if id != entries.len() {
                        return Err(parse_err(ln, format!("pattern id {id} out of order")));
                    }
                    let mut comps = [0i32; PATTERN_LEN];
                    for (slot, tok) in comps.iter_mut().zip(&toks[2..2 + PATTERN_LEN]) {
                        *slot = parse_num(ln, tok)?;
                    }
                    let freq: u64 = parse_num(ln, toks[3 + PATTERN_LEN])?;
                    entries.push((Pattern::new(comps), freq));
                }
                Some(&"adj") => {
                    if toks.len() < 3 {
                        return Err(parse_err(ln, "expected `adj <id> R|D <ids...>`"));
                    }
                    let id: usize = parse_num(ln, toks[1])?;
                    let table = match toks[2] {
                        "R" => &mut right,
                        "D" => &mut down,
                        other => return Err(parse_err(ln, format!("unknown direction {other:?}"))),
                    };
                    let slot = table
                        .get_mut(id)
                        .ok_or_else(|| parse_err(ln, format!("adj id {id} out of range")))?;
                    if slot.is_some() {
                        return Err(parse_err(ln, format!("duplicate adj {id} {}", toks[2])));
                    }
                    let ids = toks[3..]
                        .iter()
                        .map(|t| parse_num(ln, t))
                        .collect::<Result<Vec<u32>>>()?;
                    *slot = Some(ids);
                }
                Some(other) => return Err(parse_err(ln, format!("unknown record {other:?}"))),
            }
        }
        if entries.len() != count {
            return Err(Error::Model(format!(
                "header declares {count} patterns, found {}",
                entries.len()
            )));
        }
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Model("patterns are not in canonical order".into()));
            }
        }
        let catalog = PatternCatalog::from_counts(entries)?;
        let unwrap =
            |v: Vec<Option<Vec<u32>>>| v.into_iter().map(Option::unwrap_or_default).collect();
        let rules = AdjacencyRules::from_forward(unwrap(right), unwrap(down))?;
        Model::new(catalog, rules)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradient::compute_gradients;
    use crate::raster_io::{synthetic_terrain, SyntheticKind};

    fn sample_model() -> Model {
        let hm = synthetic_terrain(SyntheticKind::RandomWalk, 8, 9, 4).unwrap();
        Model::from_fields(&[compute_gradients(&hm).unwrap()]).unwrap()
    }

    #[test]
    fn text_round_trip_is_bitwise() {
        let m = sample_model();
        let text = m.to_text();
        let back = Model::from_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn constant_model_text() {
        let cat = PatternCatalog::from_counts([(Pattern::uniform(2, -1), 81)]).unwrap();
        let m = Model::from_catalog(cat);
        assert_eq!(
            m.to_text(),
            "wfcterrain-model v1\npattern_size 2 channels 2 patterns 1\n\
             pattern 0 2 2 2 2 -1 -1 -1 -1 freq 81\nadj 0 R 0\nadj 0 D 0\n"
        );
    }

    #[test]
    fn rejects_unknown_version_and_shapes() {
        let text = sample_model().to_text();
        let v2 = text.replacen("v1", "v2", 1);
        assert!(matches!(Model::from_text(&v2), Err(Error::Model(_))));
        let bigger = text.replacen("pattern_size 2", "pattern_size 3", 1);
        assert!(matches!(Model::from_text(&bigger), Err(Error::Model(_))));
        assert!(Model::from_text("").is_err());
    }

    #[test]
    fn rejects_inconsistent_records() {
        let base = "wfcterrain-model v1\npattern_size 2 channels 2 patterns 2\n\
                    pattern 0 0 0 0 0 0 0 0 0 freq 1\npattern 1 1 1 1 1 0 0 0 0 freq 1\n";
        // Non-overlapping pair listed as adjacent.
        assert!(Model::from_text(&format!("{base}adj 0 R 1\n")).is_err());
        assert!(Model::from_text(&format!("{base}adj 0 R 0\nadj 0 R 0\n")).is_err());
        assert!(Model::from_text(&format!("{base}adj 7 R 0\n")).is_err());
        assert!(Model::from_text(&format!("{base}adj 0 L 0\n")).is_err());
        // Missing adj lines mean no neighbors.
        let m = Model::from_text(base).unwrap();
        assert_eq!(m.rules().rule_count(), 0);
        // Out of canonical order.
        let swapped = base.replace("pattern 0 0 0 0 0", "pattern 0 9 9 9 9");
        assert!(Model::from_text(&swapped).is_err());
        let short = base.replace("patterns 2", "patterns 3");
        assert!(Model::from_text(&short).is_err());
    }

    #[test]
    fn new_rejects_asymmetric_rules() {
        let cat = PatternCatalog::from_counts([(Pattern::uniform(0, 0), 1)]).unwrap();
        let rules = AdjacencyRules::from_forward(vec![vec![0]], vec![vec![0]]).unwrap();
        assert!(Model::new(cat.clone(), rules).is_ok());
        let two = AdjacencyRules::from_forward(vec![vec![], vec![]], vec![vec![], vec![]]).unwrap();
        assert!(Model::new(cat, two).is_err());
    }
}
