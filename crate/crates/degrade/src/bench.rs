//! Grid execution: corrupt every manifest image per cell, score the
//! copies, and reduce to one metrics row per cell.
//!
//! Determinism contract: the stream for (item, cell) is derived from
//! `(seed, item_id, cell_label)` alone, so worker count never changes a
//! pixel, and rows always come out in grid order. Corrupted copies are
//! written as PNG except when the cell's final step is a JPEG encode, in
//! which case the actual JPEG bytes are stored so the detector reads
//! exactly what the codec produced.

use std::collections::{HashMap, HashSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corrupt::{apply_spec, CorruptionKind, CorruptionSpec, SeverityGrid, UNALTERED};
use crate::detector::Scorer;
use crate::error::{Error, Result};
use crate::manifest::ManifestEntry;
use crate::metrics::{evaluate, Label, ScoredSample, ThresholdPolicy};
use crate::raster::{encode_image, encode_jpeg, load_image, ImageBuffer, SaveFormat};
use crate::rng::RngStream;

/// One grid-cell result line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub detector: String,
    pub cell: String,
    /// Number of scored items (excluded items are not counted here).
    pub n: usize,
    pub acc: f64,
    pub auc: f64,
    pub f1: f64,
    pub seed: u64,
}

/// Rows in grid order plus a warning per excluded item.
#[derive(Debug, Clone, Default)]
pub struct GridRun {
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
}

/// Execution knobs that must not affect any produced byte: worker count
/// and the threshold policy used for ACC/F1.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub jobs: usize,
    pub threshold: ThresholdPolicy,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            jobs: 1,
            threshold: ThresholdPolicy::default(),
        }
    }
}

/// Turn an id or label into a safe file-system name. Deterministic; a
/// hash tag is appended only when sanitizing had to change something, so
/// distinct inputs cannot silently collide.
pub(crate) fn safe_name(raw: &str) -> String {
    let cleaned: String = raw
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect();
    if cleaned == raw && !raw.is_empty() && raw.len() <= 100 {
        cleaned
    } else {
        let digest = Sha256::digest(raw.as_bytes());
        let tag: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
        let mut base: String = cleaned.chars().take(100).collect();
        if base.is_empty() {
            base.push('x');
        }
        format!("{base}-{tag}")
    }
}

fn check_entries(entries: &[ManifestEntry]) -> Result<()> {
    if entries.is_empty() {
        return Err(Error::Manifest("manifest has no entries".into()));
    }
    let mut ids = HashSet::new();
    for e in entries {
        if !ids.insert(e.item_id.as_str()) {
            return Err(Error::Manifest(format!("duplicate item id {:?}", e.item_id)));
        }
    }
    let n_fake = entries.iter().filter(|e| e.label == Label::Fake).count();
    if n_fake == 0 || n_fake == entries.len() {
        return Err(Error::Manifest(format!(
            "manifest needs both classes to evaluate, got {} real / {n_fake} fake",
            entries.len() - n_fake
        )));
    }
    Ok(())
}

/// Corrupt one image for one cell and return the encoded file bytes plus
/// extension. A trailing JPEG step becomes the stored encoding itself.
fn materialize(
    img: &ImageBuffer,
    kind: &CorruptionKind,
    rng: &mut RngStream,
) -> Result<(Vec<u8>, &'static str)> {
    match kind {
        CorruptionKind::Jpeg { quality } => Ok((encode_jpeg(img, *quality)?, "jpg")),
        CorruptionKind::Compose { children } => {
            let (last, prefix) = children.split_last().expect("validated arity >= 2");
            let mut current = img.clone();
            for (i, child) in prefix.iter().enumerate() {
                let mut sub = rng.child(&i.to_string());
                current = apply_spec(&current, child, &mut sub)?;
            }
            let mut sub = rng.child(&prefix.len().to_string());
            materialize(&current, &last.kind, &mut sub)
        }
        _ => {
            let spec = CorruptionSpec::new("cell", kind.clone());
            let out = apply_spec(img, &spec, rng)?;
            Ok((encode_image(&out, SaveFormat::Png)?, "png"))
        }
    }
}

/// Collision-free file stems for a list of item ids, fixed up front so
/// parallel workers agree on names. A recognized image extension on the
/// id is dropped (ids from directory scans are file names); the built-in
/// de-duplication keeps `a.png` vs `a.jpg` apart.
pub(crate) fn unique_stems(ids: impl Iterator<Item = impl AsRef<str>>) -> Vec<String> {
    let mut stems = Vec::new();
    let mut used = HashSet::new();
    for id in ids {
        let id = id.as_ref();
        let trimmed = ["png", "jpg", "jpeg"]
            .iter()
            .find_map(|ext| {
                let suffix = format!(".{ext}");
                let lower = id.to_ascii_lowercase();
                lower
                    .strip_suffix(&suffix)
                    .map(|_| &id[..id.len() - suffix.len()])
            })
            .unwrap_or(id);
        let mut stem = safe_name(trimmed);
        while !used.insert(stem.clone()) {
            stem.push('x');
        }
        stems.push(stem);
    }
    stems
}

pub(crate) fn build_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Param(format!("thread pool: {e}")))
}

/// Corrupt every (id, source) item for one cell into `dir`, returning the
/// written paths in input order.
pub(crate) fn corrupt_into_dir(
    items: &[(String, PathBuf)],
    stems: &[String],
    spec: &CorruptionSpec,
    seed: u64,
    dir: &Path,
    pool: &rayon::ThreadPool,
) -> Result<Vec<(String, PathBuf)>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    pool.install(|| {
        items
            .par_iter()
            .zip(stems.par_iter())
            .map(|((id, src), stem)| {
                let img = load_image(src)?;
                let mut rng = RngStream::derive(seed, id, &spec.label);
                let (bytes, ext) = materialize(&img, &spec.kind, &mut rng)
                    .map_err(|e| Error::Param(format!("cell {:?}: {e}", spec.label)))?;
                let path = dir.join(format!("{stem}.{ext}"));
                std::fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
                Ok((id.clone(), path))
            })
            .collect()
    })
}

/// Run the whole grid. For every cell the manifest images are corrupted
/// into `workdir/<cell>/`, scored, and reduced to a [`ReportRow`]; the
/// `unaltered` cell scores the original files and writes nothing.
pub fn run_grid(
    entries: &[ManifestEntry],
    grid: &SeverityGrid,
    scorer: &mut dyn Scorer,
    seed: u64,
    workdir: impl AsRef<Path>,
    opts: &RunOptions,
) -> Result<GridRun> {
    check_entries(entries)?;
    let workdir = workdir.as_ref();
    std::fs::create_dir_all(workdir).map_err(|e| Error::io(workdir, e))?;

    let pool = build_pool(opts.jobs)?;
    let items: Vec<(String, PathBuf)> = entries
        .iter()
        .map(|e| (e.item_id.clone(), e.path.clone()))
        .collect();
    let stems = unique_stems(items.iter().map(|(id, _)| id));

    let mut run = GridRun::default();

    // Unaltered cell: the originals, untouched.
    score_cell(scorer, UNALTERED, &items, entries, seed, opts, &mut run)?;

    for spec in grid.corruptions() {
        let cell_dir = workdir.join(safe_name(&spec.label));
        let outputs = corrupt_into_dir(&items, &stems, spec, seed, &cell_dir, &pool)?;
        score_cell(scorer, &spec.label, &outputs, entries, seed, opts, &mut run)?;
    }
    Ok(run)
}

fn score_cell(
    scorer: &mut dyn Scorer,
    cell: &str,
    items: &[(String, PathBuf)],
    entries: &[ManifestEntry],
    seed: u64,
    opts: &RunOptions,
    run: &mut GridRun,
) -> Result<()> {
    let batch = scorer
        .score_images(items)
        .map_err(|e| attach_cell(e, cell))?;
    for id in &batch.failed {
        run.warnings
            .push(format!("cell {cell:?}: item {id:?} timed out and was excluded"));
    }

    let labels: HashMap<&str, Label> = entries
        .iter()
        .map(|e| (e.item_id.as_str(), e.label))
        .collect();
    let mut samples = Vec::with_capacity(batch.scores.len());
    for (id, score) in &batch.scores {
        let label = labels.get(id.as_str()).copied().ok_or_else(|| {
            Error::Protocol(format!("cell {cell:?}: response for unknown item {id:?}"))
        })?;
        samples.push(ScoredSample::new(label, *score));
    }
    let metrics = evaluate(&samples, opts.threshold).map_err(|e| attach_cell(e, cell))?;
    run.rows.push(ReportRow {
        detector: scorer.name().to_owned(),
        cell: cell.to_owned(),
        n: samples.len(),
        acc: metrics.acc,
        auc: metrics.auc,
        f1: metrics.f1,
        seed,
    });
    Ok(())
}

fn attach_cell(err: Error, cell: &str) -> Error {
    match err {
        Error::Detector(msg) => Error::Detector(format!("cell {cell:?}: {msg}")),
        Error::Protocol(msg) => Error::Protocol(format!("cell {cell:?}: {msg}")),
        Error::UndefinedMetric(msg) => Error::UndefinedMetric(format!("cell {cell:?}: {msg}")),
        other => other,
    }
}
