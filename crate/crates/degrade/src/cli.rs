//! Batch command-line front end.
//!
//! Subcommands: `corrupt` (materialize a spec or grid over inputs),
//! `augment` (offline augmentation with a trace file), `bench` (full
//! grid × detector run from a JSON config), `report` (merge reports and
//! extract severity sweeps), plus `synth` (generate the builtin synthetic
//! corpus) and the reference plug-ins `toy-detector` / `toy-transform`
//! speaking the NDJSON protocol.
//!
//! Exit codes: 0 success, 1 internal error, 2 input error, 3
//! detector/protocol error.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::augment::{augment, AugmentConfig, AugmentTrace};
use crate::bench::{build_pool, corrupt_into_dir, run_grid, unique_stems, RunOptions};
use crate::corrupt::{builtin_grid, CorruptionSpec, SeverityGrid};
use crate::detector::DetectorEndpoint;
use crate::error::{Error, Result};
use crate::manifest::load_manifest;
use crate::metrics::ThresholdPolicy;
use crate::raster::{load_image, save_image, SaveFormat};
use crate::report::{
    emit_report, merge_reports, sweep_points, write_sweep_csv, ReportFormat,
};
use crate::rng::RngStream;
use crate::synth::write_synthetic_corpus;
use crate::toy::high_freq_score;

/// Environment variable consulted for the default bench workdir.
pub const WORKDIR_ENV: &str = "DEGRADE_WORKDIR";

#[derive(Parser)]
#[command(
    name = "degrade",
    version,
    about = "Deterministic image degradation and detector robustness benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one corruption spec or a whole severity grid to input images.
    Corrupt(CorruptArgs),
    /// Run the stochastic augmentation chain over input images.
    Augment(AugmentArgs),
    /// Run a benchmark config: grid × manifest × detector → report.
    Bench(BenchArgs),
    /// Merge report files and emit a severity-sweep CSV.
    Report(ReportArgs),
    /// Generate the synthetic real/fake demo corpus with a manifest.
    Synth(SynthArgs),
    /// Reference detector plug-in (NDJSON over stdin/stdout).
    ToyDetector(ToyDetectorArgs),
    /// Reference transform plug-in (NDJSON over stdin/stdout).
    ToyTransform(ToyTransformArgs),
}

#[derive(Args)]
struct CorruptArgs {
    /// Input directory of PNG/JPEG files, or a manifest CSV.
    #[arg(long)]
    input: PathBuf,
    /// Inline spec `kind:key=value,...` (e.g. `gamma:g=1`) or a spec JSON file.
    #[arg(long, conflicts_with = "grid")]
    spec: Option<String>,
    /// `builtin` or a grid JSON file.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; one subdirectory per cell.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (output bytes are independent of this).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct AugmentArgs {
    /// Input directory of PNG/JPEG files, or a manifest CSV.
    #[arg(long)]
    input: PathBuf,
    /// Preset name: paper-default, gn-only or non-stochastic.
    #[arg(long, conflicts_with = "config", default_value = "paper-default")]
    preset: String,
    /// Augment config JSON file (overrides --preset).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for augmented PNGs.
    #[arg(long)]
    out: PathBuf,
    /// JSON-lines trace file recording each image's sampled chain.
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark config JSON; see the config schema in the README.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's worker count.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report files (CSV or JSON) to merge.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Restrict the sweep to one corruption family
    /// (e.g. gaussian_noise, jpeg, gaussian_blur, gamma, resize_degrade).
    #[arg(long)]
    sweep: Option<String>,
    /// Grid the cells refer to: `builtin` or a grid JSON file.
    #[arg(long, default_value = "builtin")]
    grid: String,
    /// Output sweep CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    real: usize,
    #[arg(long, default_value_t = 10)]
    fake: usize,
    /// Square image side length in pixels.
    #[arg(long, default_value_t = 64)]
    size: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ToyDetectorArgs {
    /// Answer this fixed score instead of the high-frequency energy.
    /// Deliberately unvalidated so protocol handling can be exercised.
    #[arg(long)]
    constant: Option<f64>,
    /// Exit abruptly after this many responses.
    #[arg(long)]
    fail_after: Option<usize>,
    /// Sleep this long before every response.
    #[arg(long, default_value_t = 0)]
    delay_ms: u64,
}

#[derive(Args)]
struct ToyTransformArgs {
    /// identity (copy), median (3x3 by default), or missing (answer with
    /// a path that was never written; for protocol-error testing).
    #[arg(long, default_value = "identity")]
    op: String,
    #[arg(long, default_value_t = 3)]
    kernel: u32,
    #[arg(long)]
    out_dir: PathBuf,
}

/// Parse arguments from the process environment and run. Returns the
/// process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("degrade: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Corrupt(args) => cmd_corrupt(args),
        Command::Augment(args) => cmd_augment(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Report(args) => cmd_report(args),
        Command::Synth(args) => cmd_synth(args),
        Command::ToyDetector(args) => cmd_toy_detector(args),
        Command::ToyTransform(args) => cmd_toy_transform(args),
    }
}

/// Inputs for corrupt/augment: a manifest CSV or a flat directory scan
/// (sorted by name for determinism). Returns (item_id, path) pairs.
fn collect_inputs(input: &Path) -> Result<Vec<(String, PathBuf)>> {
    if input.is_file() {
        let entries = load_manifest(input)?;
        return Ok(entries
            .into_iter()
            .map(|e| (e.item_id, e.path))
            .collect());
    }
    let read = std::fs::read_dir(input).map_err(|e| Error::io(input, e))?;
    let mut items = Vec::new();
    for entry in read {
        let entry = entry.map_err(|e| Error::io(input, e))?;
        let path = entry.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "jpg" | "jpeg"))
            .unwrap_or(false);
        if path.is_file() && is_image {
            let id = entry.file_name().to_string_lossy().into_owned();
            items.push((id, path));
        }
    }
    items.sort();
    if items.is_empty() {
        return Err(Error::Param(format!(
            "no PNG/JPEG inputs found in {}",
            input.display()
        )));
    }
    Ok(items)
}

/// Parse `kind:key=value,...` into a spec, or read a `.json` spec file.
fn parse_spec_arg(arg: &str) -> Result<CorruptionSpec> {
    if arg.ends_with(".json") {
        let text = std::fs::read_to_string(arg).map_err(|e| Error::io(arg, e))?;
        let spec: CorruptionSpec =
            serde_json::from_str(&text).map_err(|e| Error::Param(format!("spec json: {e}")))?;
        spec.validate()?;
        return Ok(spec);
    }
    let (kind, params_text) = arg.split_once(':').unwrap_or((arg, ""));
    let mut params = serde_json::Map::new();
    for pair in params_text.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = pair.split_once('=').ok_or_else(|| {
            Error::Param(format!("bad spec parameter {pair:?}, expected key=value"))
        })?;
        let number = if let Ok(i) = value.parse::<i64>() {
            serde_json::Number::from(i)
        } else {
            let f: f64 = value
                .parse()
                .map_err(|_| Error::Param(format!("parameter {key}={value:?} is not a number")))?;
            serde_json::Number::from_f64(f)
                .ok_or_else(|| Error::Param(format!("parameter {key}={value:?} is not finite")))?
        };
        params.insert(key.to_owned(), serde_json::Value::Number(number));
    }
    let value = serde_json::json!({ "label": arg, "kind": kind, "params": params });
    let spec: CorruptionSpec = serde_json::from_value(value)
        .map_err(|e| Error::Param(format!("bad inline spec {arg:?}: {e}")))?;
    spec.validate()?;
    Ok(spec)
}

fn load_grid_arg(arg: &str) -> Result<SeverityGrid> {
    if arg == "builtin" {
        Ok(builtin_grid())
    } else {
        SeverityGrid::load(arg)
    }
}

fn cmd_corrupt(args: CorruptArgs) -> Result<()> {
    let items = collect_inputs(&args.input)?;
    let specs: Vec<CorruptionSpec> = match (&args.spec, &args.grid) {
        (Some(spec), None) => vec![parse_spec_arg(spec)?],
        (None, Some(grid)) => load_grid_arg(grid)?.corruptions().to_vec(),
        (None, None) => {
            return Err(Error::Param("one of --spec or --grid is required".into()))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let stems = unique_stems(items.iter().map(|(id, _)| id));
    let pool = build_pool(args.jobs)?;
    for spec in &specs {
        let dir = args.out.join(crate::bench::safe_name(&spec.label));
        let written = corrupt_into_dir(&items, &stems, spec, args.seed, &dir, &pool)?;
        println!("cell {:?}: wrote {} files to {}", spec.label, written.len(), dir.display());
    }
    Ok(())
}

/// One JSON line per augmented image in the trace file.
#[derive(Serialize, Deserialize)]
struct TraceRecord {
    item_id: String,
    #[serde(flatten)]
    trace: AugmentTrace,
}

fn cmd_augment(args: AugmentArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            AugmentConfig::from_json(&text)?
        }
        None => AugmentConfig::preset(&args.preset)?,
    };
    let items = collect_inputs(&args.input)?;
    let stems = unique_stems(items.iter().map(|(id, _)| id));
    std::fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;

    let pool = build_pool(args.jobs)?;
    let results: Result<Vec<TraceRecord>> = pool.install(|| {
        use rayon::prelude::*;
        items
            .par_iter()
            .zip(stems.par_iter())
            .map(|((id, src), stem)| {
                let img = load_image(src)?;
                let mut rng = RngStream::derive(args.seed, id, "augment");
                let (out, trace) = augment(&img, &cfg, &mut rng)?;
                save_image(&out, args.out.join(format!("{stem}.png")), SaveFormat::Png)?;
                Ok(TraceRecord {
                    item_id: id.clone(),
                    trace,
                })
            })
            .collect()
    });
    let records = results?;

    let mut trace_file = std::fs::File::create(&args.trace).map_err(|e| Error::io(&args.trace, e))?;
    for record in &records {
        let line = serde_json::to_string(record).expect("trace serializes");
        writeln!(trace_file, "{line}").map_err(|e| Error::io(&args.trace, e))?;
    }
    println!(
        "augmented {} images into {} (traces: {})",
        records.len(),
        args.out.display(),
        args.trace.display()
    );
    Ok(())
}

/// Benchmark run description, read from JSON. Relative paths resolve
/// against the config file's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seed: u64,
    pub manifest: PathBuf,
    /// `builtin` or a path to a grid JSON file.
    #[serde(default = "default_grid_ref")]
    pub grid: String,
    pub detector: DetectorEndpoint,
    /// Defaults to `$DEGRADE_WORKDIR` or `degrade-work`.
    #[serde(default)]
    pub workdir: Option<PathBuf>,
    #[serde(default)]
    pub threshold: ThresholdPolicy,
    /// Main report output path.
    pub report: PathBuf,
    /// `csv` (default) or `json`.
    #[serde(default = "default_format")]
    pub format: String,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
}

fn default_grid_ref() -> String {
    "builtin".to_owned()
}

fn default_format() -> String {
    "csv".to_owned()
}

fn default_jobs() -> usize {
    1
}

impl BenchConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: BenchConfig =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        cfg.manifest = resolve(base, &cfg.manifest);
        cfg.report = resolve(base, &cfg.report);
        if cfg.grid != "builtin" {
            cfg.grid = resolve(base, Path::new(&cfg.grid)).to_string_lossy().into_owned();
        }
        if let Some(workdir) = &cfg.workdir {
            cfg.workdir = Some(resolve(base, workdir));
        }
        cfg.detector.validate()?;
        Ok(cfg)
    }

    fn workdir(&self) -> PathBuf {
        self.workdir.clone().unwrap_or_else(|| {
            std::env::var_os(WORKDIR_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("degrade-work"))
        })
    }
}

fn resolve(base: &Path, path: &Path) -> PathBuf {
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        base.join(path)
    }
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let cfg = BenchConfig::load(&args.config)?;
    let entries = load_manifest(&cfg.manifest)?;
    let grid = load_grid_arg(&cfg.grid)?;
    let format = ReportFormat::parse(&cfg.format)?;
    let opts = RunOptions {
        jobs: args.jobs.unwrap_or(cfg.jobs),
        threshold: cfg.threshold,
    };

    let mut detector = cfg.detector.clone();
    let run = run_grid(&entries, &grid, &mut detector, cfg.seed, cfg.workdir(), &opts)?;
    emit_report(&run.rows, format, &cfg.report, &grid)?;

    let widest = run.rows.iter().map(|r| r.cell.len()).max().unwrap_or(4);
    println!("{:<widest$}  {:>4}  {:>7}", "cell", "n", "auc");
    for row in &run.rows {
        println!("{:<widest$}  {:>4}  {:>7.4}", row.cell, row.n, row.auc);
    }
    for warning in &run.warnings {
        eprintln!("warning: {warning}");
    }
    println!("report written to {}", cfg.report.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let grid = load_grid_arg(&args.grid)?;
    let rows = merge_reports(&args.files)?;
    let points = sweep_points(&rows, &grid, args.sweep.as_deref())?;
    if points.is_empty() {
        return Err(Error::Merge(format!(
            "no sweep points found{}",
            args.sweep
                .as_deref()
                .map(|s| format!(" for family {s:?}"))
                .unwrap_or_default()
        )));
    }
    write_sweep_csv(&points, &args.out)?;
    println!(
        "merged {} rows into {} sweep points: {}",
        rows.len(),
        points.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    let manifest = write_synthetic_corpus(&args.out, args.real, args.fake, args.size, args.seed)?;
    println!("wrote {} real + {} fake images; manifest: {}", args.real, args.fake, manifest.display());
    Ok(())
}

#[derive(Deserialize)]
struct PluginRequest {
    id: String,
    path: String,
}

/// Serve the detector side of the wire protocol on stdin/stdout.
fn cmd_toy_detector(args: ToyDetectorArgs) -> Result<()> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut answered = 0usize;
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| Error::Protocol(format!("stdin: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let request: PluginRequest = serde_json::from_str(&line)
            .map_err(|e| Error::Protocol(format!("bad request {line:?}: {e}")))?;
        if args.delay_ms > 0 {
            std::thread::sleep(std::time::Duration::from_millis(args.delay_ms));
        }
        let score = match args.constant {
            Some(value) => value,
            None => high_freq_score(&load_image(&request.path)?),
        };
        let mut out = stdout.lock();
        writeln!(out, "{}", serde_json::json!({ "id": request.id, "score": score }))
            .map_err(|e| Error::Protocol(format!("stdout: {e}")))?;
        out.flush().ok();

        answered += 1;
        if args.fail_after.is_some_and(|n| answered >= n) {
            std::process::exit(1);
        }
    }
    Ok(())
}

/// Serve the transform side of the wire protocol on stdin/stdout.
fn cmd_toy_transform(args: ToyTransformArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| Error::Protocol(format!("stdin: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let request: PluginRequest = serde_json::from_str(&line)
            .map_err(|e| Error::Protocol(format!("bad request {line:?}: {e}")))?;
        let src = PathBuf::from(&request.path);
        let out_path = match args.op.as_str() {
            "identity" => {
                let name = src
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_else(|| format!("{}.bin", request.id));
                let dst = args.out_dir.join(name);
                std::fs::copy(&src, &dst).map_err(|e| Error::io(&dst, e))?;
                dst
            }
            "median" => {
                let img = load_image(&src)?;
                let out = crate::corrupt::blur(&img, crate::corrupt::BlurFilter::Median, args.kernel)?;
                let dst = args.out_dir.join(format!("{}.png", request.id));
                save_image(&out, &dst, SaveFormat::Png)?;
                dst
            }
            "missing" => args.out_dir.join(format!("{}.never-written", request.id)),
            other => return Err(Error::Param(format!("unknown transform op {other:?}"))),
        };
        let mut out = stdout.lock();
        writeln!(
            out,
            "{}",
            serde_json::json!({ "id": request.id, "path": out_path.to_string_lossy() })
        )
        .map_err(|e| Error::Protocol(format!("stdout: {e}")))?;
        out.flush().ok();
    }
    Ok(())
}
