//! Deterministic corruption operators and the severity grid.
//!
//! Six families of test-time degradations: additive noise (Gaussian and
//! signal-dependent Poissonian-Gaussian), smoothing (Gaussian, average and
//! median filters), baseline JPEG round trips, resolution reduction, and
//! intensity enhancement (gamma and linear adjustment), plus ordered
//! compositions of any of these.
//!
//! Conventions shared by all operators:
//! - input and output are 8-bit RGB; width, height and channel count are
//!   always preserved;
//! - filtering uses reflect-101 borders (`edge | body | edge` without
//!   repeating the edge sample);
//! - stochastic operators draw from the supplied [`RngStream`] in
//!   row-major, interleaved-RGB sample order; deterministic ones never
//!   touch it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{self, ImageBuffer, CHANNELS};
use crate::rng::RngStream;

/// Smoothing filter selector for [`blur`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlurFilter {
    Gaussian,
    Average,
    Median,
}

const MIN_KERNEL: u32 = 3;
const MAX_KERNEL: u32 = 31;

/// Additive zero-mean Gaussian noise with standard deviation `sigma`
/// (8-bit units), clamped per sample: `clamp(round(v + sigma * z))`.
pub fn gaussian_noise(img: &ImageBuffer, sigma: f64, rng: &mut RngStream) -> Result<ImageBuffer> {
    if !sigma.is_finite() || sigma < 0.0 {
        return Err(Error::Param(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let mut out = img.clone();
    for v in out.pixels_mut() {
        let noisy = *v as f64 + sigma * rng.normal();
        *v = noisy.round().clamp(0.0, 255.0) as u8;
    }
    Ok(out)
}

/// Signal-dependent Poissonian-Gaussian noise: with `y = v / 255`, the
/// sample becomes `clamp(round(255 * (y + sqrt(a*y + b) * z)))`, i.e. the
/// noise variance is affine in intensity.
pub fn poisson_gaussian_noise(
    img: &ImageBuffer,
    a: f64,
    b: f64,
    rng: &mut RngStream,
) -> Result<ImageBuffer> {
    if !a.is_finite() || !b.is_finite() || a < 0.0 || b < 0.0 {
        return Err(Error::Param(format!(
            "poisson-gaussian coefficients must be >= 0, got a={a} b={b}"
        )));
    }
    let mut out = img.clone();
    for v in out.pixels_mut() {
        let y = *v as f64 / 255.0;
        let noisy = 255.0 * (y + (a * y + b).sqrt() * rng.normal());
        *v = noisy.round().clamp(0.0, 255.0) as u8;
    }
    Ok(out)
}

/// Reflect-101 index: `-1 -> 1`, `n -> n-2`. Folds repeatedly for kernels
/// wider than the image.
#[inline]
fn reflect101(mut i: i64, n: i64) -> usize {
    if n == 1 {
        return 0;
    }
    while i < 0 || i >= n {
        if i < 0 {
            i = -i;
        }
        if i >= n {
            i = 2 * (n - 1) - i;
        }
    }
    i as usize
}

fn check_kernel(kernel: u32) -> Result<usize> {
    if kernel.is_multiple_of(2) || !(MIN_KERNEL..=MAX_KERNEL).contains(&kernel) {
        return Err(Error::Param(format!(
            "blur kernel must be odd and in [{MIN_KERNEL}, {MAX_KERNEL}], got {kernel}"
        )));
    }
    Ok(kernel as usize)
}

/// Normalized 1-D Gaussian taps for a k×k kernel, with the kernel-size
/// convention `sigma = 0.15*k + 0.35`.
pub(crate) fn gaussian_kernel(kernel: usize) -> Vec<f64> {
    let sigma = 0.15 * kernel as f64 + 0.35;
    let center = (kernel / 2) as f64;
    let mut taps: Vec<f64> = (0..kernel)
        .map(|i| {
            let d = i as f64 - center;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    taps
}

/// 2-D smoothing with one of the three filters. `kernel` must be odd and
/// in `[3, 31]`.
pub fn blur(img: &ImageBuffer, filter: BlurFilter, kernel: u32) -> Result<ImageBuffer> {
    let k = check_kernel(kernel)?;
    match filter {
        BlurFilter::Gaussian => Ok(convolve_separable(img, &gaussian_kernel(k))),
        BlurFilter::Average => Ok(average_blur(img, k)),
        BlurFilter::Median => Ok(median_blur(img, k)),
    }
}

/// Separable convolution with the same normalized taps in both axes,
/// f64 accumulation, one rounding at the end.
fn convolve_separable(img: &ImageBuffer, taps: &[f64]) -> ImageBuffer {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let k = taps.len();
    let r = k / 2;
    let src = img.pixels();

    // Horizontal pass into f64 planes.
    let mut mid = vec![0.0f64; w * h * CHANNELS];
    let xmap: Vec<usize> = (0..w + 2 * r)
        .map(|i| reflect101(i as i64 - r as i64, w as i64))
        .collect();
    for y in 0..h {
        let row = y * w;
        for x in 0..w {
            for c in 0..CHANNELS {
                let mut acc = 0.0;
                for (j, &t) in taps.iter().enumerate() {
                    acc += t * src[(row + xmap[x + j]) * CHANNELS + c] as f64;
                }
                mid[(row + x) * CHANNELS + c] = acc;
            }
        }
    }

    // Vertical pass.
    let ymap: Vec<usize> = (0..h + 2 * r)
        .map(|i| reflect101(i as i64 - r as i64, h as i64))
        .collect();
    let mut out = vec![0u8; w * h * CHANNELS];
    for y in 0..h {
        for x in 0..w {
            for c in 0..CHANNELS {
                let mut acc = 0.0;
                for (j, &t) in taps.iter().enumerate() {
                    acc += t * mid[(ymap[y + j] * w + x) * CHANNELS + c];
                }
                out[(y * w + x) * CHANNELS + c] = acc.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    ImageBuffer::from_pixels(img.width(), img.height(), out).expect("blur preserves dimensions")
}

/// Uniform k×k mean with exact integer window sums; `round(sum / k²)` is
/// exact because an odd k² never lands the true mean on a half.
fn average_blur(img: &ImageBuffer, k: usize) -> ImageBuffer {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let r = k / 2;
    let src = img.pixels();
    let norm = (k * k) as f64;

    let xmap: Vec<usize> = (0..w + 2 * r)
        .map(|i| reflect101(i as i64 - r as i64, w as i64))
        .collect();
    let mut hsum = vec![0u64; w * h * CHANNELS];
    let mut prefix = vec![0u64; w + 2 * r + 1];
    for y in 0..h {
        let row = y * w;
        for c in 0..CHANNELS {
            for i in 0..w + 2 * r {
                prefix[i + 1] = prefix[i] + src[(row + xmap[i]) * CHANNELS + c] as u64;
            }
            for x in 0..w {
                hsum[(row + x) * CHANNELS + c] = prefix[x + k] - prefix[x];
            }
        }
    }

    let ymap: Vec<usize> = (0..h + 2 * r)
        .map(|i| reflect101(i as i64 - r as i64, h as i64))
        .collect();
    let mut out = vec![0u8; w * h * CHANNELS];
    let mut col_prefix = vec![0u64; h + 2 * r + 1];
    for x in 0..w {
        for c in 0..CHANNELS {
            for i in 0..h + 2 * r {
                col_prefix[i + 1] = col_prefix[i] + hsum[(ymap[i] * w + x) * CHANNELS + c];
            }
            for y in 0..h {
                let total = col_prefix[y + k] - col_prefix[y];
                out[(y * w + x) * CHANNELS + c] = (total as f64 / norm).round() as u8;
            }
        }
    }
    ImageBuffer::from_pixels(img.width(), img.height(), out).expect("blur preserves dimensions")
}

/// Per-channel k×k window median, sliding a 256-bin histogram along each
/// row (add/remove one column per step).
fn median_blur(img: &ImageBuffer, k: usize) -> ImageBuffer {
    let (w, h) = (img.width() as usize, img.height() as usize);
    let r = k / 2;
    let src = img.pixels();
    let rank = (k * k).div_ceil(2) as u32; // median position, 1-based

    let xmap: Vec<usize> = (0..w + 2 * r)
        .map(|i| reflect101(i as i64 - r as i64, w as i64))
        .collect();
    let ymap: Vec<usize> = (0..h + 2 * r)
        .map(|i| reflect101(i as i64 - r as i64, h as i64))
        .collect();

    let mut out = vec![0u8; w * h * CHANNELS];
    let mut hist = [0u32; 256];
    for c in 0..CHANNELS {
        for y in 0..h {
            hist.fill(0);
            for wy in 0..k {
                let row = ymap[y + wy] * w;
                for wx in 0..k {
                    hist[src[(row + xmap[wx]) * CHANNELS + c] as usize] += 1;
                }
            }
            out[(y * w) * CHANNELS + c] = hist_median(&hist, rank);
            for x in 1..w {
                for wy in 0..k {
                    let row = ymap[y + wy] * w;
                    hist[src[(row + xmap[x - 1]) * CHANNELS + c] as usize] -= 1;
                    hist[src[(row + xmap[x + k - 1]) * CHANNELS + c] as usize] += 1;
                }
                out[(y * w + x) * CHANNELS + c] = hist_median(&hist, rank);
            }
        }
    }
    ImageBuffer::from_pixels(img.width(), img.height(), out).expect("blur preserves dimensions")
}

#[inline]
fn hist_median(hist: &[u32; 256], rank: u32) -> u8 {
    let mut seen = 0u32;
    for (value, &count) in hist.iter().enumerate() {
        seen += count;
        if seen >= rank {
            return value as u8;
        }
    }
    255
}

/// Encode as baseline JPEG at `quality` and decode back. Dimensions are
/// preserved; pixel damage is exactly what any consumer of the file sees.
pub fn jpeg_round_trip(img: &ImageBuffer, quality: u8) -> Result<ImageBuffer> {
    let bytes = raster::encode_jpeg(img, quality)?;
    let back = raster::decode_image(&bytes)?;
    debug_assert_eq!((back.width(), back.height()), (img.width(), img.height()));
    Ok(back)
}

/// Downscale by `1/factor` with exact box (block-average) filtering, then
/// bilinear-upscale back to the original size. `factor` must be one of
/// {2, 4, 8, 16} and no larger than either dimension.
pub fn resize_degrade(img: &ImageBuffer, factor: u32) -> Result<ImageBuffer> {
    if ![2, 4, 8, 16].contains(&factor) {
        return Err(Error::Param(format!(
            "resize factor must be one of 2, 4, 8, 16, got {factor}"
        )));
    }
    if img.width() < factor || img.height() < factor {
        return Err(Error::Param(format!(
            "image {}x{} smaller than resize factor {factor}",
            img.width(),
            img.height()
        )));
    }
    let small = box_downscale(img, factor);
    Ok(bilinear_upscale(&small, img.width(), img.height()))
}

fn box_downscale(img: &ImageBuffer, factor: u32) -> ImageBuffer {
    let f = factor as usize;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (dw, dh) = (w / f, h / f);
    let src = img.pixels();
    let norm = (f * f) as f64;
    let mut out = vec![0u8; dw * dh * CHANNELS];
    for y in 0..dh {
        for x in 0..dw {
            for c in 0..CHANNELS {
                let mut sum = 0u64;
                for sy in y * f..(y + 1) * f {
                    for sx in x * f..(x + 1) * f {
                        sum += src[(sy * w + sx) * CHANNELS + c] as u64;
                    }
                }
                out[(y * dw + x) * CHANNELS + c] = (sum as f64 / norm).round() as u8;
            }
        }
    }
    ImageBuffer::from_pixels(dw as u32, dh as u32, out).expect("downscale dimensions")
}

/// Half-pixel-center bilinear resampling to (dst_w, dst_h).
fn bilinear_upscale(img: &ImageBuffer, dst_w: u32, dst_h: u32) -> ImageBuffer {
    let (sw, sh) = (img.width() as usize, img.height() as usize);
    let (dw, dh) = (dst_w as usize, dst_h as usize);
    let src = img.pixels();

    // Per-axis source taps: index pair and interpolation weight.
    let axis = |dst: usize, srcn: usize| -> Vec<(usize, usize, f64)> {
        let scale = srcn as f64 / dst as f64;
        (0..dst)
            .map(|i| {
                let s = ((i as f64 + 0.5) * scale - 0.5).max(0.0);
                let i0 = (s.floor() as usize).min(srcn - 1);
                let i1 = (i0 + 1).min(srcn - 1);
                (i0, i1, s - i0 as f64)
            })
            .collect()
    };
    let xs = axis(dw, sw);
    let ys = axis(dh, sh);

    let mut out = vec![0u8; dw * dh * CHANNELS];
    for (y, &(y0, y1, fy)) in ys.iter().enumerate() {
        for (x, &(x0, x1, fx)) in xs.iter().enumerate() {
            for c in 0..CHANNELS {
                let p00 = src[(y0 * sw + x0) * CHANNELS + c] as f64;
                let p01 = src[(y0 * sw + x1) * CHANNELS + c] as f64;
                let p10 = src[(y1 * sw + x0) * CHANNELS + c] as f64;
                let p11 = src[(y1 * sw + x1) * CHANNELS + c] as f64;
                let top = p00 + fx * (p01 - p00);
                let bottom = p10 + fx * (p11 - p10);
                let v = top + fy * (bottom - top);
                out[(y * dw + x) * CHANNELS + c] = v.round().clamp(0.0, 255.0) as u8;
            }
        }
    }
    ImageBuffer::from_pixels(dst_w, dst_h, out).expect("upscale dimensions")
}

/// Pointwise power-law intensity transform `round(255 * (v/255)^g)`.
pub fn gamma(img: &ImageBuffer, g: f64) -> Result<ImageBuffer> {
    if !g.is_finite() || g <= 0.0 {
        return Err(Error::Param(format!("gamma must be > 0, got {g}")));
    }
    let lut: Vec<u8> = (0..256)
        .map(|v| (255.0 * (v as f64 / 255.0).powf(g)).round() as u8)
        .collect();
    Ok(apply_lut(img, &lut))
}

/// Contrast/brightness line `clamp(round(alpha * v + beta))`.
pub fn linear_adjust(img: &ImageBuffer, alpha: f64, beta: f64) -> Result<ImageBuffer> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Param(format!("linear alpha must be > 0, got {alpha}")));
    }
    if !beta.is_finite() {
        return Err(Error::Param(format!("linear beta must be finite, got {beta}")));
    }
    let lut: Vec<u8> = (0..256)
        .map(|v| (alpha * v as f64 + beta).round().clamp(0.0, 255.0) as u8)
        .collect();
    Ok(apply_lut(img, &lut))
}

fn apply_lut(img: &ImageBuffer, lut: &[u8]) -> ImageBuffer {
    let mut out = img.clone();
    for v in out.pixels_mut() {
        *v = lut[*v as usize];
    }
    out
}

// ---------------------------------------------------------------------------
// Named corruption specs and the severity grid
// ---------------------------------------------------------------------------

/// One corruption with its parameters, e.g. `{"kind": "gaussian_noise",
/// "params": {"sigma": 30.0}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum CorruptionKind {
    GaussianNoise { sigma: f64 },
    PoissonGaussianNoise { a: f64, b: f64 },
    GaussianBlur { kernel: u32 },
    AverageBlur { kernel: u32 },
    MedianBlur { kernel: u32 },
    Jpeg { quality: u8 },
    ResizeDegrade { factor: u32 },
    Gamma { g: f64 },
    LinearAdjust { alpha: f64, beta: f64 },
    Compose { children: Vec<CorruptionSpec> },
}

impl CorruptionKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CorruptionKind::GaussianNoise { .. } => "gaussian_noise",
            CorruptionKind::PoissonGaussianNoise { .. } => "poisson_gaussian_noise",
            CorruptionKind::GaussianBlur { .. } => "gaussian_blur",
            CorruptionKind::AverageBlur { .. } => "average_blur",
            CorruptionKind::MedianBlur { .. } => "median_blur",
            CorruptionKind::Jpeg { .. } => "jpeg",
            CorruptionKind::ResizeDegrade { .. } => "resize_degrade",
            CorruptionKind::Gamma { .. } => "gamma",
            CorruptionKind::LinearAdjust { .. } => "linear_adjust",
            CorruptionKind::Compose { .. } => "compose",
        }
    }

    /// The principal severity scalar for sweep plots, if the kind has one.
    pub fn severity(&self) -> Option<f64> {
        match *self {
            CorruptionKind::GaussianNoise { sigma } => Some(sigma),
            CorruptionKind::PoissonGaussianNoise { a, .. } => Some(a),
            CorruptionKind::GaussianBlur { kernel }
            | CorruptionKind::AverageBlur { kernel }
            | CorruptionKind::MedianBlur { kernel } => Some(kernel as f64),
            CorruptionKind::Jpeg { quality } => Some(quality as f64),
            CorruptionKind::ResizeDegrade { factor } => Some(factor as f64),
            CorruptionKind::Gamma { g } => Some(g),
            CorruptionKind::LinearAdjust { alpha, .. } => Some(alpha),
            CorruptionKind::Compose { .. } => None,
        }
    }

    /// Whether the *final* pixel-producing step is a JPEG encode, in which
    /// case materialized outputs should be the JPEG bytes themselves.
    pub fn ends_with_jpeg(&self) -> Option<u8> {
        match self {
            CorruptionKind::Jpeg { quality } => Some(*quality),
            CorruptionKind::Compose { children } => {
                children.last().and_then(|c| c.kind.ends_with_jpeg())
            }
            _ => None,
        }
    }
}

/// A labeled [`CorruptionKind`], the unit the grid and reports speak in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorruptionSpec {
    pub label: String,
    #[serde(flatten)]
    pub kind: CorruptionKind,
}

impl CorruptionSpec {
    pub fn new(label: impl Into<String>, kind: CorruptionKind) -> Self {
        Self {
            label: label.into(),
            kind,
        }
    }

    /// Check parameter ranges (recursively for compositions).
    pub fn validate(&self) -> Result<()> {
        if self.label.trim().is_empty() {
            return Err(Error::Param("corruption label must be nonempty".into()));
        }
        match &self.kind {
            CorruptionKind::GaussianNoise { sigma } => {
                if !sigma.is_finite() || *sigma < 0.0 {
                    return Err(Error::Param(format!(
                        "{}: sigma must be >= 0, got {sigma}",
                        self.label
                    )));
                }
            }
            CorruptionKind::PoissonGaussianNoise { a, b } => {
                if !a.is_finite() || !b.is_finite() || *a < 0.0 || *b < 0.0 {
                    return Err(Error::Param(format!(
                        "{}: coefficients must be >= 0, got a={a} b={b}",
                        self.label
                    )));
                }
            }
            CorruptionKind::GaussianBlur { kernel }
            | CorruptionKind::AverageBlur { kernel }
            | CorruptionKind::MedianBlur { kernel } => {
                check_kernel(*kernel).map_err(|_| {
                    Error::Param(format!(
                        "{}: kernel must be odd in [{MIN_KERNEL}, {MAX_KERNEL}], got {kernel}",
                        self.label
                    ))
                })?;
            }
            CorruptionKind::Jpeg { quality } => {
                if !(1..=100).contains(quality) {
                    return Err(Error::Param(format!(
                        "{}: jpeg quality must be in [1, 100], got {quality}",
                        self.label
                    )));
                }
            }
            CorruptionKind::ResizeDegrade { factor } => {
                if ![2, 4, 8, 16].contains(factor) {
                    return Err(Error::Param(format!(
                        "{}: resize factor must be one of 2, 4, 8, 16, got {factor}",
                        self.label
                    )));
                }
            }
            CorruptionKind::Gamma { g } => {
                if !g.is_finite() || *g <= 0.0 {
                    return Err(Error::Param(format!(
                        "{}: gamma must be > 0, got {g}",
                        self.label
                    )));
                }
            }
            CorruptionKind::LinearAdjust { alpha, beta } => {
                if !alpha.is_finite() || *alpha <= 0.0 || !beta.is_finite() {
                    return Err(Error::Param(format!(
                        "{}: need alpha > 0 and finite beta, got alpha={alpha} beta={beta}",
                        self.label
                    )));
                }
            }
            CorruptionKind::Compose { children } => {
                if children.len() < 2 {
                    return Err(Error::Param(format!(
                        "{}: compose needs at least 2 children, got {}",
                        self.label,
                        children.len()
                    )));
                }
                for child in children {
                    child.validate()?;
                }
            }
        }
        Ok(())
    }
}

/// Apply a named corruption. Compositions run left to right, child `i`
/// drawing from the sub-stream `rng.child(i)`.
pub fn apply_spec(
    img: &ImageBuffer,
    spec: &CorruptionSpec,
    rng: &mut RngStream,
) -> Result<ImageBuffer> {
    spec.validate()?;
    apply_kind(img, &spec.kind, rng)
}

fn apply_kind(img: &ImageBuffer, kind: &CorruptionKind, rng: &mut RngStream) -> Result<ImageBuffer> {
    match kind {
        CorruptionKind::GaussianNoise { sigma } => gaussian_noise(img, *sigma, rng),
        CorruptionKind::PoissonGaussianNoise { a, b } => poisson_gaussian_noise(img, *a, *b, rng),
        CorruptionKind::GaussianBlur { kernel } => blur(img, BlurFilter::Gaussian, *kernel),
        CorruptionKind::AverageBlur { kernel } => blur(img, BlurFilter::Average, *kernel),
        CorruptionKind::MedianBlur { kernel } => blur(img, BlurFilter::Median, *kernel),
        CorruptionKind::Jpeg { quality } => jpeg_round_trip(img, *quality),
        CorruptionKind::ResizeDegrade { factor } => resize_degrade(img, *factor),
        CorruptionKind::Gamma { g } => gamma(img, *g),
        CorruptionKind::LinearAdjust { alpha, beta } => linear_adjust(img, *alpha, *beta),
        CorruptionKind::Compose { children } => {
            let mut current = img.clone();
            for (i, child) in children.iter().enumerate() {
                let mut sub = rng.child(&i.to_string());
                current = apply_kind(&current, &child.kind, &mut sub)?;
            }
            Ok(current)
        }
    }
}

/// Label of the distinguished pass-through cell present in every grid.
pub const UNALTERED: &str = "unaltered";

/// An ordered corruption × severity evaluation grid. The `unaltered`
/// pass-through cell is always present and always first; the remaining
/// cells are uniquely labeled corruption specs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeverityGrid {
    cells: Vec<CorruptionSpec>,
}

impl SeverityGrid {
    /// Build from corruption cells (not including `unaltered`, which is
    /// implicit). Labels must be unique and none may claim `unaltered`.
    pub fn new(cells: Vec<CorruptionSpec>) -> Result<Self> {
        let grid = Self { cells };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for cell in &self.cells {
            cell.validate()?;
            if cell.label == UNALTERED {
                return Err(Error::Param(
                    "the unaltered cell is implicit, no spec may use its label".into(),
                ));
            }
            if !seen.insert(cell.label.as_str()) {
                return Err(Error::Param(format!("duplicate cell label {:?}", cell.label)));
            }
        }
        Ok(())
    }

    /// The corruption cells, in grid order (without `unaltered`).
    pub fn corruptions(&self) -> &[CorruptionSpec] {
        &self.cells
    }

    /// All cell labels, `unaltered` first.
    pub fn labels(&self) -> Vec<String> {
        std::iter::once(UNALTERED.to_owned())
            .chain(self.cells.iter().map(|c| c.label.clone()))
            .collect()
    }

    /// Total cell count including `unaltered`.
    pub fn len(&self) -> usize {
        self.cells.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false // unaltered is always present
    }

    pub fn spec(&self, label: &str) -> Option<&CorruptionSpec> {
        self.cells.iter().find(|c| c.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grid serializes")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let grid: SeverityGrid =
            serde_json::from_str(json).map_err(|e| Error::Param(format!("grid json: {e}")))?;
        grid.validate()?;
        Ok(grid)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// The default evaluation grid: unaltered plus 32 corruption cells
/// spanning every builtin family, with combination cells at mid
/// severities (sigma 30, kernel 7, gamma 0.75, JPEG quality 60).
pub fn builtin_grid() -> SeverityGrid {
    use CorruptionKind::*;

    let mut cells = Vec::new();
    for q in [95u8, 60, 30] {
        cells.push(CorruptionSpec::new(format!("JPEG {q}"), Jpeg { quality: q }));
    }
    for sigma in [5.0, 10.0, 20.0, 30.0, 40.0, 50.0] {
        cells.push(CorruptionSpec::new(
            format!("Gau Noise {sigma:.0}"),
            GaussianNoise { sigma },
        ));
    }
    cells.push(CorruptionSpec::new(
        "Pois-Gau Noise",
        PoissonGaussianNoise { a: 0.01, b: 1e-4 },
    ));
    for k in [3u32, 7, 11] {
        cells.push(CorruptionSpec::new(format!("Gau Blur {k}"), GaussianBlur { kernel: k }));
    }
    for k in [3u32, 7, 11] {
        cells.push(CorruptionSpec::new(format!("Avg Blur {k}"), AverageBlur { kernel: k }));
    }
    for k in [3u32, 7, 11] {
        cells.push(CorruptionSpec::new(format!("Med Blur {k}"), MedianBlur { kernel: k }));
    }
    for g in [0.1, 0.75, 2.5] {
        cells.push(CorruptionSpec::new(format!("Gamma Corr {g}"), Gamma { g }));
    }
    for (alpha, beta) in [(0.5, 0.0), (1.5, 0.0), (1.0, -50.0), (1.0, 50.0)] {
        cells.push(CorruptionSpec::new(
            format!("Linear {alpha:.1} {beta:+.0}"),
            LinearAdjust { alpha, beta },
        ));
    }
    for f in [4u32, 8, 16] {
        cells.push(CorruptionSpec::new(format!("Resize x{f}"), ResizeDegrade { factor: f }));
    }

    let noise = CorruptionSpec::new("Gau Noise 30", GaussianNoise { sigma: 30.0 });
    let blur7 = CorruptionSpec::new("Gau Blur 7", GaussianBlur { kernel: 7 });
    let gamma075 = CorruptionSpec::new("Gamma Corr 0.75", Gamma { g: 0.75 });
    let jpeg60 = CorruptionSpec::new("JPEG 60", Jpeg { quality: 60 });
    cells.push(CorruptionSpec::new(
        "GN+GB",
        Compose {
            children: vec![noise.clone(), blur7.clone()],
        },
    ));
    cells.push(CorruptionSpec::new(
        "GB+GN+GC",
        Compose {
            children: vec![blur7.clone(), noise.clone(), gamma075.clone()],
        },
    ));
    cells.push(CorruptionSpec::new(
        "All",
        Compose {
            children: vec![gamma075, blur7, noise, jpeg60],
        },
    ));

    SeverityGrid::new(cells).expect("builtin grid is valid")
}
