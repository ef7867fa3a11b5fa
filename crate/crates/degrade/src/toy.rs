//! The reference toy detector: normalized high-frequency energy.
//!
//! Scores the mean absolute 4-neighbour Laplacian of the gray plane,
//! normalized into [0, 1]. Heavily textured ("fake") images score high,
//! smooth ("real") ones near zero; blurring pulls scores down and noise
//! floods both classes upward. It is a *sanity* detector for exercising
//! the harness, not a forgery detector.

use std::path::{Path, PathBuf};

use crate::detector::{ScoreBatch, Scorer};
use crate::error::Result;
use crate::raster::{load_image, ImageBuffer};

/// Laplacian magnitude that maps to score 1.0. Chosen so the synthetic
/// fake corpus lands around 0.4–0.6 and smooth images near 0.1.
pub const HF_NORM: f64 = 80.0;

/// Square root of the mean |4-neighbour Laplacian| of the gray plane
/// over [`HF_NORM`], clamped to [0, 1]. The root stretches the low end
/// so a fixed 0.5 threshold lands between the synthetic classes; being
/// monotone, it leaves AUC untouched.
pub fn high_freq_score(img: &ImageBuffer) -> f64 {
    let (w, h) = (img.width() as usize, img.height() as usize);
    if w < 3 || h < 3 {
        return 0.0;
    }
    let gray: Vec<f64> = img
        .pixels()
        .chunks_exact(3)
        .map(|p| (p[0] as f64 + p[1] as f64 + p[2] as f64) / 3.0)
        .collect();
    let mut total = 0.0;
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let c = gray[y * w + x];
            let lap = 4.0 * c
                - gray[y * w + x - 1]
                - gray[y * w + x + 1]
                - gray[(y - 1) * w + x]
                - gray[(y + 1) * w + x];
            total += lap.abs();
        }
    }
    let mean = total / ((w - 2) * (h - 2)) as f64;
    (mean / HF_NORM).sqrt().clamp(0.0, 1.0)
}

/// In-process [`Scorer`] wrapping [`high_freq_score`]; the same math the
/// `degrade toy-detector` subcommand speaks over the wire protocol.
#[derive(Debug, Default)]
pub struct HighFreqDetector;

impl Scorer for HighFreqDetector {
    fn name(&self) -> &str {
        "toy-hf"
    }

    fn score_images(&mut self, items: &[(String, PathBuf)]) -> Result<ScoreBatch> {
        let mut scores = Vec::with_capacity(items.len());
        for (id, path) in items {
            let img = load_image(path)?;
            scores.push((id.clone(), high_freq_score(&img)));
        }
        Ok(ScoreBatch {
            scores,
            failed: Vec::new(),
        })
    }
}

/// Score a single file; the unit the NDJSON subcommand answers per request.
pub fn score_file(path: impl AsRef<Path>) -> Result<f64> {
    Ok(high_freq_score(&load_image(path)?))
}
