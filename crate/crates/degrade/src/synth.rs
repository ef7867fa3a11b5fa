//! Synthetic test imagery: a deterministic photo-like image for codec and
//! severity checks, and a separable real/fake corpus for exercising the
//! benchmark end to end without any external dataset.
//!
//! Corpus construction: both classes share the same smooth per-item base
//! (random gradient plus a slow sinusoid). "Real" items add a mild
//! low-frequency texture; "fake" items add a stronger fine texture at
//! periods 2 and 4 pixels. A high-frequency-energy scorer separates the
//! classes perfectly on clean data, and loses separation as blur removes
//! the fine texture or noise floods both classes — the directional
//! behaviour the benchmark's sanity checks rely on.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::raster::{save_image, ImageBuffer, SaveFormat};
use crate::rng::RngStream;

/// Deterministic 3-channel "natural" image: smooth shading, mid-frequency
/// texture, and a few hard edges. Same bytes on every call with the same
/// dimensions.
pub fn natural_test_image(width: u32, height: u32) -> ImageBuffer {
    let (wf, hf) = (width as f64, height as f64);
    ImageBuffer::from_fn(width, height, |x, y| {
        let (xf, yf) = (x as f64 / wf, y as f64 / hf);
        let base_r = 120.0 + 70.0 * (2.0 * PI * (1.3 * xf + 0.2)).sin() * (2.0 * PI * 0.7 * yf).cos();
        let base_g = 110.0 + 60.0 * (2.0 * PI * (0.9 * yf + 0.6)).sin() + 25.0 * (2.0 * PI * 1.1 * xf).cos();
        let base_b = 100.0 + 80.0 * (2.0 * PI * (0.6 * xf + 0.8 * yf)).sin();
        let texture = 14.0 * (2.0 * PI * 11.0 * xf).sin() * (2.0 * PI * 9.0 * yf).cos()
            + 7.0 * (2.0 * PI * 23.0 * (xf + 0.5 * yf)).sin();
        // A bright square and a dark disk give the codec real edges to chew on.
        let in_square = (0.15..0.40).contains(&xf) && (0.20..0.45).contains(&yf);
        let dx = xf - 0.68;
        let dy = yf - 0.62;
        let in_disk = (dx * dx + dy * dy).sqrt() < 0.18;
        let edge = if in_square {
            55.0
        } else if in_disk {
            -65.0
        } else {
            0.0
        };
        [
            (base_r + texture + edge).round().clamp(0.0, 255.0) as u8,
            (base_g + texture + edge).round().clamp(0.0, 255.0) as u8,
            (base_b + 0.6 * texture + edge).round().clamp(0.0, 255.0) as u8,
        ]
    })
}

fn smooth_base(width: u32, height: u32, rng: &mut RngStream) -> Vec<f64> {
    let (wf, hf) = (width as f64, height as f64);
    let gx = rng.uniform_in(-0.8, 0.8);
    let gy = rng.uniform_in(-0.8, 0.8);
    let offset = rng.uniform_in(90.0, 160.0);
    let amp = rng.uniform_in(15.0, 35.0);
    let phase = rng.uniform_in(0.0, 2.0 * PI);
    let mut plane = Vec::with_capacity((width * height) as usize);
    for y in 0..height {
        for x in 0..width {
            let (xf, yf) = (x as f64 / wf, y as f64 / hf);
            let v = offset
                + 60.0 * (gx * xf + gy * yf)
                + amp * (2.0 * PI * (0.8 * xf + 0.6 * yf) + phase).sin();
            plane.push(v);
        }
    }
    plane
}

fn plane_to_rgb(width: u32, height: u32, plane: &[f64]) -> ImageBuffer {
    let mut pixels = Vec::with_capacity(plane.len() * 3);
    for &v in plane {
        let v = v.round().clamp(0.0, 255.0) as u8;
        pixels.extend_from_slice(&[v, v, v]);
    }
    ImageBuffer::from_pixels(width, height, pixels).expect("plane dimensions")
}

/// A smooth "real" sample: just the shared base. Its high-frequency
/// energy comes only from the base's gentle curvature, and varies per
/// item through the sampled base parameters.
pub fn smooth_real(width: u32, height: u32, rng: &mut RngStream) -> ImageBuffer {
    let plane = smooth_base(width, height, rng);
    plane_to_rgb(width, height, &plane)
}

/// A textured "fake" sample: the shared base plus texture at periods 2,
/// 4 and 8 pixels. The three scales die under progressively wider blur
/// kernels, so class separation degrades gradually along the blur axis.
pub fn textured_fake(width: u32, height: u32, rng: &mut RngStream) -> ImageBuffer {
    let mut plane = smooth_base(width, height, rng);
    let fine = rng.uniform_in(12.0, 30.0);
    let mid = rng.uniform_in(8.0, 20.0);
    let coarse = rng.uniform_in(3.0, 12.0);
    let phase = rng.uniform_in(0.0, 2.0 * PI);
    for y in 0..height {
        for x in 0..width {
            let (xf, yf) = (x as f64, y as f64);
            let t = fine * (PI * xf).sin() * (PI * yf).sin()
                + mid * (PI * xf / 2.0 + phase).sin() * (PI * yf / 2.0).sin()
                + coarse * (PI * xf / 4.0 + phase).cos() * (PI * yf / 4.0).sin();
            plane[(y * width + x) as usize] += t;
        }
    }
    plane_to_rgb(width, height, &plane)
}

/// Write `n_real + n_fake` PNG samples plus a `manifest.csv` into `dir`
/// and return the manifest path. Item ids are the file stems; every image
/// is `size`×`size`.
pub fn write_synthetic_corpus(
    dir: impl AsRef<Path>,
    n_real: usize,
    n_fake: usize,
    size: u32,
    seed: u64,
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let mut rows = String::from("path,label,id\n");
    for i in 0..n_real {
        let id = format!("real_{i:03}");
        let mut rng = RngStream::derive(seed, &id, "synth");
        let img = smooth_real(size, size, &mut rng);
        let name = format!("{id}.png");
        save_image(&img, dir.join(&name), SaveFormat::Png)?;
        rows.push_str(&format!("{name},real,{id}\n"));
    }
    for i in 0..n_fake {
        let id = format!("fake_{i:03}");
        let mut rng = RngStream::derive(seed, &id, "synth");
        let img = textured_fake(size, size, &mut rng);
        let name = format!("{id}.png");
        save_image(&img, dir.join(&name), SaveFormat::Png)?;
        rows.push_str(&format!("{name},fake,{id}\n"));
    }

    let manifest = dir.join("manifest.csv");
    std::fs::write(&manifest, rows).map_err(|e| Error::io(&manifest, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_image_is_deterministic() {
        assert_eq!(natural_test_image(64, 64), natural_test_image(64, 64));
    }

    #[test]
    fn corpus_layout() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_synthetic_corpus(dir.path(), 3, 2, 32, 9).unwrap();
        let text = std::fs::read_to_string(&manifest).unwrap();
        assert_eq!(text.lines().count(), 6); // header + 5 rows
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 6); // 5 png + manifest
    }
}
