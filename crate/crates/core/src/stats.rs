//! Slope-magnitude statistics and input/output histogram comparison.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gradient::GradientField;
use crate::grid::Grid;

pub const DEFAULT_BINS: usize = 50;

/// How slope samples are formed from a gradient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MagnitudeMode {
    /// One sample per cell: `sqrt(gx² + gy²)`.
    #[default]
    Euclidean,
    /// Two samples per cell: `|gx|` and `|gy|`.
    PooledComponents,
}

impl FromStr for MagnitudeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(MagnitudeMode::Euclidean),
            "pooled" | "pooled-components" => Ok(MagnitudeMode::PooledComponents),
            other => Err(Error::Range(format!("unknown magnitude mode {other:?}"))),
        }
    }
}

pub fn slope_magnitude(gf: &GradientField) -> Grid<f64> {
    Grid::from_fn(gf.rows(), gf.cols(), |y, x| {
        f64::from(gf.gx()[(y, x)]).hypot(f64::from(gf.gy()[(y, x)]))
    })
}

pub fn slope_samples(gf: &GradientField, mode: MagnitudeMode) -> Vec<f64> {
    match mode {
        MagnitudeMode::Euclidean => slope_magnitude(gf).into_vec(),
        MagnitudeMode::PooledComponents => gf
            .gx()
            .iter()
            .chain(gf.gy().iter())
            .map(|&v| f64::from(v).abs())
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopeSummary {
    pub mean: f64,
    pub median: f64,
    /// Population standard deviation.
    pub std: f64,
    pub n: usize,
}

pub fn summarize(values: &[f64]) -> Result<SlopeSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("cannot summarize zero values".into()));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(SlopeSummary {
        mean,
        median,
        std: var.sqrt(),
        n,
    })
}

/// Two histograms over shared uniform bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramPair {
    pub bin_edges: Vec<f64>,
    pub counts_in: Vec<u64>,
    pub counts_out: Vec<u64>,
    /// Sum over bins of the smaller normalized mass; 1 for identical shape,
    /// 0 for disjoint support.
    pub intersection_score: f64,
}

/// Bins both samples over `[0, max(a ∪ b)]` with `bins` equal-width bins.
/// The last bin is closed on the right.
pub fn histogram_pair(a: &[f64], b: &[f64], bins: usize) -> Result<HistogramPair> {
    if bins == 0 {
        return Err(Error::Range("histogram needs at least one bin".into()));
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("histogram of an empty sample".into()));
    }
    let max = a.iter().chain(b).copied().fold(0.0f64, f64::max);
    let upper = if max > 0.0 { max } else { 1.0 };
    let width = upper / bins as f64;
    let bin_edges = (0..=bins).map(|i| i as f64 * width).collect();
    let count = |xs: &[f64]| {
        let mut counts = vec![0u64; bins];
        for &v in xs {
            let idx = ((v / width).floor().max(0.0) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        counts
    };
    let counts_in = count(a);
    let counts_out = count(b);
    let intersection_score = intersection(&counts_in, &counts_out);
    Ok(HistogramPair {
        bin_edges,
        counts_in,
        counts_out,
        intersection_score,
    })
}

/// `Σ min(p_a, p_b)` on count-normalized histograms, evaluated in integers
/// so identical shapes score exactly 1.
pub fn intersection(a: &[u64], b: &[u64]) -> f64 {
    let na: u128 = a.iter().map(|&c| u128::from(c)).sum();
    let nb: u128 = b.iter().map(|&c| u128::from(c)).sum();
    if na == 0 || nb == 0 {
        return 0.0;
    }
    let overlap: u128 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| (u128::from(x) * nb).min(u128::from(y) * na))
        .sum();
    (overlap as f64 / (na * nb) as f64).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub input: SlopeSummary,
    pub output: SlopeSummary,
    pub histogram: HistogramPair,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    mean_in: f64,
    mean_out: f64,
    median_in: f64,
    median_out: f64,
    std_in: f64,
    std_out: f64,
    n_in: usize,
    n_out: usize,
    bin_edges: &'a [f64],
    counts_in: &'a [u64],
    counts_out: &'a [u64],
    intersection_score: f64,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        let h = &self.histogram;
        let doc = ReportJson {
            mean_in: self.input.mean,
            mean_out: self.output.mean,
            median_in: self.input.median,
            median_out: self.output.median,
            std_in: self.input.std,
            std_out: self.output.std,
            n_in: self.input.n,
            n_out: self.output.n,
            bin_edges: &h.bin_edges,
            counts_in: &h.counts_in,
            counts_out: &h.counts_out,
            intersection_score: h.intersection_score,
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }

    /// Two gnuplot data blocks (`index 0` input, `index 1` output), each
    /// `bin_center count` per line.
    pub fn gnuplot_histograms(&self) -> String {
        let h = &self.histogram;
        let mut out = String::new();
        for (label, counts) in [("input", &h.counts_in), ("output", &h.counts_out)] {
            if !out.is_empty() {
                out.push_str("\n\n");
            }
            let _ = writeln!(out, "# {label}: bin_center count");
            for (i, c) in counts.iter().enumerate() {
                let center = (h.bin_edges[i] + h.bin_edges[i + 1]) / 2.0;
                let _ = writeln!(out, "{center} {c}");
            }
        }
        out
    }
}

pub fn compare(
    input: &GradientField,
    output: &GradientField,
    bins: usize,
) -> Result<ComparisonReport> {
    compare_with_mode(input, output, bins, MagnitudeMode::Euclidean)
}

pub fn compare_with_mode(
    input: &GradientField,
    output: &GradientField,
    bins: usize,
    mode: MagnitudeMode,
) -> Result<ComparisonReport> {
    let a = slope_samples(input, mode);
    let b = slope_samples(output, mode);
    Ok(ComparisonReport {
        input: summarize(&a)?,
        output: summarize(&b)?,
        histogram: histogram_pair(&a, &b, bins)?,
    })
}
