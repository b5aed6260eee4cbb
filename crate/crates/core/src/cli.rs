//! `wfc-terrain` command-line driver.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 generation failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::gradient::{compute_gradients, training_set, GradientField, Transform};
use crate::raster_io::{
    downsample_bilinear, read_ascii_grid, read_hgt, render_pgm, synthetic_terrain, window,
    write_ascii_grid, HeightMap, SyntheticKind, TileId,
};
use crate::reconstruct::{curl_residual, integrate, integrate_verified};
use crate::stats::{compare_with_mode, MagnitudeMode, DEFAULT_BINS};
use crate::wfc::{
    generate, generate_parallel, run_attempt, Generated, Model, DEFAULT_MAX_RESTARTS,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_GENERATION: i32 = 3;

/// Window side used when `--window` gives only an origin.
pub const DEFAULT_WINDOW: usize = 100;
pub const DEFAULT_FACTOR: usize = 8;

#[derive(Debug, Parser)]
#[command(
    name = "wfc-terrain",
    version,
    about = "Learn slope patterns from elevation data and synthesize new heightmaps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Read an SRTM .hgt tile, downsample it, cut a window, write an ASCII grid.
    Ingest(IngestArgs),
    /// Build a pattern model from one or more heightmaps.
    Extract(ExtractArgs),
    /// Generate a gradient field from a model.
    Generate(GenerateArgs),
    /// Integrate a gradient field into a heightmap.
    Reconstruct(ReconstructArgs),
    /// Compare input and output slope distributions.
    Evaluate(EvaluateArgs),
    /// Render a heightmap as a 16-bit grayscale PGM.
    Render(RenderArgs),
    /// Write a synthetic terrain fixture.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowSpec {
    pub row: usize,
    pub col: usize,
    pub height: usize,
    pub width: usize,
}

impl FromStr for WindowSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("invalid window {s:?}: {e}"))?;
        match *parts.as_slice() {
            [row, col] => Ok(WindowSpec {
                row,
                col,
                height: DEFAULT_WINDOW,
                width: DEFAULT_WINDOW,
            }),
            [row, col, height, width] if height > 0 && width > 0 => Ok(WindowSpec {
                row,
                col,
                height,
                width,
            }),
            _ => Err(format!(
                "window must be ROW,COL or ROW,COL,HEIGHT,WIDTH with positive sizes, got {s:?}"
            )),
        }
    }
}

/// `ROWSxCOLS`, e.g. `33x33`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Size {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (r, c) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("size must look like 33x33, got {s:?}"))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("invalid size {s:?}: {e}"))
        };
        Ok(Size {
            rows: parse(r)?,
            cols: parse(c)?,
        })
    }
}

/// One comma-separated argument. The alias keeps clap from treating the
/// field as a repeated option.
type TransformList = Vec<Transform>;

fn parse_transforms(s: &str) -> Result<TransformList, String> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let t: Transform = part.parse().map_err(|e: Error| e.to_string())?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    if out.is_empty() {
        return Err("no transforms given".into());
    }
    Ok(out)
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub hgt: PathBuf,
    /// Tile name override (default: parsed from the file name).
    #[arg(long)]
    pub tile: Option<TileIdArg>,
    #[arg(long, default_value_t = DEFAULT_FACTOR)]
    pub factor: usize,
    /// ROW,COL[,HEIGHT,WIDTH] in downsampled pixels; size defaults to 100x100.
    #[arg(long)]
    pub window: WindowSpec,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy)]
pub struct TileIdArg(pub TileId);

impl FromStr for TileIdArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.parse().map(TileIdArg).map_err(|e: Error| e.to_string())
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Heightmap ASCII grids to learn from.
    #[arg(long = "input", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Comma-separated subset of identity,hflip,vflip,rot180.
    #[arg(long, default_value = "identity,hflip,vflip,rot180", value_parser = parse_transforms)]
    pub transforms: TransformList,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Output gradient field size ROWSxCOLS (at least 2x2).
    #[arg(long)]
    pub size: Size,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_RESTARTS)]
    pub max_restarts: u32,
    /// Run this many attempts concurrently; the lowest successful attempt wins.
    #[arg(long, default_value_t = 1)]
    pub parallel_attempts: usize,
    /// Run only this attempt index (reproduces a logged result directly).
    #[arg(long)]
    pub attempt: Option<u32>,
    /// Output prefix; writes PREFIX.gx.asc and PREFIX.gy.asc.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Gradient prefix (reads PREFIX.gx.asc and PREFIX.gy.asc).
    #[arg(long)]
    pub gradients: PathBuf,
    #[arg(long, default_value_t = 0, conflicts_with = "base_from")]
    pub base: i32,
    /// Use the median of this heightmap as the starting height.
    #[arg(long)]
    pub base_from: Option<PathBuf>,
    /// Integrate in both orders and report the largest disagreement.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Input gradient prefix.
    #[arg(
        long,
        required_unless_present = "input_heightmap",
        conflicts_with = "input_heightmap"
    )]
    pub input: Option<PathBuf>,
    /// Input heightmap; gradients are computed from it.
    #[arg(long)]
    pub input_heightmap: Option<PathBuf>,
    /// Output gradient prefix.
    #[arg(
        long,
        required_unless_present = "output_heightmap",
        conflicts_with = "output_heightmap"
    )]
    pub output: Option<PathBuf>,
    /// Output heightmap; gradients are computed from it.
    #[arg(long)]
    pub output_heightmap: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// euclidean or pooled.
    #[arg(long, default_value = "euclidean", value_parser = parse_mode)]
    pub mode: MagnitudeMode,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Also write gnuplot histogram blocks here.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<MagnitudeMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_kind(s: &str) -> Result<SyntheticKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// ramp, sine or random-walk.
    #[arg(long, value_parser = parse_kind)]
    pub kind: SyntheticKind,
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Command failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GenerationFailed { .. } => EXIT_GENERATION,
            _ => EXIT_DATA,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: Command) -> CliResult {
    match command {
        Command::Ingest(a) => cmd_ingest(&a),
        Command::Extract(a) => cmd_extract(&a),
        Command::Generate(a) => cmd_generate(&a),
        Command::Reconstruct(a) => cmd_reconstruct(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

pub fn cmd_ingest(a: &IngestArgs) -> CliResult {
    if a.factor == 0 {
        return Err(CliError::usage("--factor must be at least 1"));
    }
    let mut hm = read_hgt_with(&a.hgt, a.tile.map(|t| t.0))?;
    log::info!("read {} ({}x{})", a.hgt.display(), hm.rows(), hm.cols());
    if a.factor > 1 {
        hm = downsample_bilinear(&hm, a.factor)?;
    }
    let w = a.window;
    let out = window(&hm, w.row, w.col, w.height, w.width)?;
    write_atomic(&a.out, write_ascii_grid(&out).as_bytes())?;
    println!(
        "wrote {}: {}x{}, void cells: {}",
        a.out.display(),
        out.rows(),
        out.cols(),
        out.void_count()
    );
    Ok(())
}

fn read_hgt_with(path: &Path, tile: Option<TileId>) -> Result<HeightMap, Error> {
    match tile {
        Some(t) => crate::raster_io::parse_hgt(&std::fs::read(path)?, t),
        None => read_hgt(path),
    }
}

pub fn cmd_extract(a: &ExtractArgs) -> CliResult {
    let mut fields = Vec::new();
    for path in &a.inputs {
        let hm = read_grid(path)?;
        fields.extend(training_set(&hm, &a.transforms)?);
    }
    let windows: usize = fields
        .iter()
        .map(|f| f.rows().saturating_sub(1) * f.cols().saturating_sub(1))
        .sum();
    let catalog = crate::wfc::extract_patterns(&fields)?;
    let started = Instant::now();
    let model = Model::from_catalog(catalog);
    let elapsed = started.elapsed();
    let degenerate = model.rules().self_adjacent_everywhere();
    if !degenerate.is_empty() {
        log::warn!(
            "{} pattern(s) are self-adjacent in all four directions (first: {}); outputs may repeat them in large blocks",
            degenerate.len(),
            degenerate[0]
        );
    }
    log::info!(
        "adjacency inference over {} patterns took {:.3} s",
        model.catalog().len(),
        elapsed.as_secs_f64()
    );
    write_atomic(&a.out, model.to_text().as_bytes())?;
    let names: Vec<&str> = a.transforms.iter().map(|t| t.name()).collect();
    println!(
        "fields: {} ({}), windows: {}, patterns: {}, rules: {}, inference: {:.3} s",
        fields.len(),
        names.join(","),
        windows,
        model.catalog().len(),
        model.rules().rule_count(),
        elapsed.as_secs_f64()
    );
    Ok(())
}

pub fn cmd_generate(a: &GenerateArgs) -> CliResult {
    if a.size.rows < 2 || a.size.cols < 2 {
        return Err(CliError::usage("--size must be at least 2x2"));
    }
    if a.max_restarts == 0 {
        return Err(CliError::usage("--max-restarts must be at least 1"));
    }
    if a.parallel_attempts == 0 {
        return Err(CliError::usage("--parallel-attempts must be at least 1"));
    }
    let model = Model::load(&a.model)?;
    let (rows, cols) = (a.size.rows - 1, a.size.cols - 1);
    let started = Instant::now();
    let result = match a.attempt {
        Some(k) => match run_attempt(&model, rows, cols, a.seed, k)? {
            Some(field) => Ok(Generated {
                field,
                seed: a.seed,
                attempt: k,
            }),
            None => {
                return Err(CliError {
                    code: EXIT_GENERATION,
                    message: format!("attempt {k} with seed {} ended in contradiction", a.seed),
                })
            }
        },
        None if a.parallel_attempts > 1 => generate_parallel(
            &model,
            rows,
            cols,
            a.seed,
            a.max_restarts,
            a.parallel_attempts,
        ),
        None => generate(&model, rows, cols, a.seed, a.max_restarts),
    };
    let generated = match result {
        Ok(g) => g,
        Err(e @ Error::GenerationFailed { .. }) => {
            println!(
                "seed {}: no valid output after {} attempts",
                a.seed, a.max_restarts
            );
            return Err(e.into());
        }
        Err(e) => return Err(e.into()),
    };
    write_field(&a.out, &generated.field)?;
    println!(
        "wrote {}.{{gx,gy}}.asc: {}x{}, seed {}, attempt {}, attempts used {}, {:.3} s",
        a.out.display(),
        generated.field.rows(),
        generated.field.cols(),
        generated.seed,
        generated.attempt,
        generated.attempts_used(),
        started.elapsed().as_secs_f64()
    );
    Ok(())
}

pub fn cmd_reconstruct(a: &ReconstructArgs) -> CliResult {
    let base = match &a.base_from {
        Some(path) => median_height(&read_grid(path)?)?,
        None => a.base,
    };
    let field = read_field(&a.gradients)?;
    let residual = curl_residual(&field);
    let hm = if a.verify {
        let (hm, deviation) = integrate_verified(&field, base)?;
        println!(
            "max curl residual: {}, max row/column integration deviation: {deviation}",
            residual.max_abs_residual
        );
        hm
    } else {
        integrate(&field, base)?
    };
    write_atomic(&a.out, write_ascii_grid(&hm).as_bytes())?;
    println!(
        "wrote {}: {}x{}, base height {base}",
        a.out.display(),
        hm.rows(),
        hm.cols()
    );
    Ok(())
}

fn median_height(hm: &HeightMap) -> Result<i32, Error> {
    let mut values: Vec<i32> = hm
        .cells()
        .iter()
        .copied()
        .filter(|&v| !hm.is_void(v))
        .collect();
    if values.is_empty() {
        return Err(Error::EmptyInput(
            "reference heightmap has no valid cells".into(),
        ));
    }
    values.sort_unstable();
    Ok(values[values.len() / 2])
}

pub fn cmd_evaluate(a: &EvaluateArgs) -> CliResult {
    if a.bins == 0 {
        return Err(CliError::usage("--bins must be at least 1"));
    }
    let load =
        |prefix: &Option<PathBuf>, heightmap: &Option<PathBuf>| -> Result<GradientField, Error> {
            match (prefix, heightmap) {
                (Some(p), _) => read_field(p),
                (None, Some(h)) => compute_gradients(&read_grid(h)?),
                (None, None) => unreachable!("clap requires one of the two"),
            }
        };
    let input = load(&a.input, &a.input_heightmap)?;
    let output = load(&a.output, &a.output_heightmap)?;
    let report = compare_with_mode(&input, &output, a.bins, a.mode)?;
    let json = report.to_json();
    if let Some(path) = &a.histogram {
        write_atomic(path, report.gnuplot_histograms().as_bytes())?;
    }
    match &a.json {
        Some(path) => {
            write_atomic(path, format!("{json}\n").as_bytes())?;
            println!(
                "intersection score {:.4}, mean in {:.2}, mean out {:.2}",
                report.histogram.intersection_score, report.input.mean, report.output.mean
            );
        }
        None => println!("{json}"),
    }
    Ok(())
}

pub fn cmd_render(a: &RenderArgs) -> CliResult {
    let hm = read_grid(&a.input)?;
    write_atomic(&a.out, &render_pgm(&hm))?;
    println!("wrote {}: {}x{}", a.out.display(), hm.cols(), hm.rows());
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs) -> CliResult {
    if a.rows == 0 || a.cols == 0 {
        return Err(CliError::usage("--rows and --cols must be positive"));
    }
    let hm = synthetic_terrain(a.kind, a.rows, a.cols, a.seed)?;
    write_atomic(&a.out, write_ascii_grid(&hm).as_bytes())?;
    println!("wrote {}: {}x{}", a.out.display(), hm.rows(), hm.cols());
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<HeightMap, Error> {
    read_ascii_grid(&std::fs::read_to_string(path)?)
}

fn channel_path(prefix: &Path, channel: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(format!(".{channel}.asc"));
    PathBuf::from(s)
}

/// Reads `PREFIX.gx.asc` and `PREFIX.gy.asc`.
pub fn read_field(prefix: &Path) -> Result<GradientField, Error> {
    let gx = read_grid(&channel_path(prefix, "gx"))?;
    let gy = read_grid(&channel_path(prefix, "gy"))?;
    GradientField::new(gx.cells().clone(), gy.cells().clone())
}

/// Writes `PREFIX.gx.asc` and `PREFIX.gy.asc`; neither appears unless both
/// were written.
pub fn write_field(prefix: &Path, field: &GradientField) -> Result<(), Error> {
    let channels = [("gx", field.gx()), ("gy", field.gy())];
    let mut staged = Vec::new();
    for (name, grid) in channels {
        let text = write_ascii_grid(&HeightMap::new(grid.clone())?);
        let target = channel_path(prefix, name);
        let tmp = temp_path(&target);
        if let Err(e) = std::fs::write(&tmp, text) {
            for (t, _) in &staged {
                let _ = std::fs::remove_file(t);
            }
            return Err(e.into());
        }
        staged.push((tmp, target));
    }
    for (tmp, target) in staged {
        std::fs::rename(tmp, target)?;
    }
    Ok(())
}

fn temp_path(target: &Path) -> PathBuf {
    let mut s = target.as_os_str().to_owned();
    s.push(format!(".tmp{}", std::process::id()));
    PathBuf::from(s)
}

/// Writes to a sibling temp file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let tmp = temp_path(path);
    if let Err(e) = std::fs::write(&tmp, bytes) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
