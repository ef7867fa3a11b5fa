//! 8-bit interleaved RGB raster buffer and PNG/JPEG file I/O.
//!
//! [`ImageBuffer`] is the single pixel currency of the crate: three
//! channels, row-major, one byte per sample. Decoders expand grayscale and
//! drop alpha at the boundary so every operator sees the same layout.
//!
//! JPEG encoding is baseline (ITU-T T.81) with the classical IJG quality
//! scaling and fixed 4:2:0 chroma subsampling at every quality, so a given
//! (pixels, quality) pair always produces the same bytes.

use std::io::Cursor;
use std::path::Path;

use image::ImageReader;

use crate::error::{Error, Result};

/// Channels per pixel. Fixed; the whole crate speaks interleaved RGB.
pub const CHANNELS: usize = 3;

/// An owned width × height × 3 block of 8-bit samples, row-major RGB.
#[derive(Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish()
    }
}

impl ImageBuffer {
    /// Wrap raw interleaved RGB samples. Length must be `width * height * 3`
    /// and both dimensions must be at least 1.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Param(format!(
                "image dimensions must be >= 1, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize * CHANNELS;
        if pixels.len() != expected {
            return Err(Error::Param(format!(
                "pixel buffer length {} does not match {width}x{height}x3 = {expected}",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// A width × height image with every sample set to `value`.
    pub fn constant(width: u32, height: u32, value: u8) -> Self {
        Self::from_pixels(
            width,
            height,
            vec![value; width as usize * height as usize * CHANNELS],
        )
        .expect("constant image dimensions")
    }

    /// Build an image by evaluating `f(x, y) -> [r, g, b]` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width as usize * height as usize * CHANNELS);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        Self::from_pixels(width, height, pixels).expect("from_fn dimensions")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Flat index of sample (x, y, channel).
    #[inline]
    pub fn index(&self, x: u32, y: u32, channel: usize) -> usize {
        (y as usize * self.width as usize + x as usize) * CHANNELS + channel
    }

    #[inline]
    pub fn sample(&self, x: u32, y: u32, channel: usize) -> u8 {
        self.pixels[self.index(x, y, channel)]
    }

    /// Mean over all samples, in [0, 255].
    pub fn mean(&self) -> f64 {
        let sum: u64 = self.pixels.iter().map(|&v| v as u64).sum();
        sum as f64 / self.pixels.len() as f64
    }
}

/// On-disk format selector for [`save_image`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaveFormat {
    Png,
    /// Baseline JPEG at the given quality, 1..=100.
    Jpeg { quality: u8 },
}

/// Decode a PNG or JPEG file into an [`ImageBuffer`].
///
/// Grayscale inputs are replicated to three channels; alpha is dropped.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let reader = ImageReader::open(path).map_err(|e| Error::io(path, e))?;
    let decoded = reader
        .decode()
        .map_err(|e| Error::format(path, e.to_string()))?;
    let rgb = decoded.into_rgb8();
    ImageBuffer::from_pixels(rgb.width(), rgb.height(), rgb.into_raw())
}

/// Decode PNG or JPEG bytes (format sniffed from magic numbers).
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::format("<memory>", e.to_string()))?;
    let decoded = reader
        .decode()
        .map_err(|e| Error::format("<memory>", e.to_string()))?;
    let rgb = decoded.into_rgb8();
    ImageBuffer::from_pixels(rgb.width(), rgb.height(), rgb.into_raw())
}

/// Write an image as PNG (lossless) or baseline JPEG.
pub fn save_image(img: &ImageBuffer, path: impl AsRef<Path>, format: SaveFormat) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_image(img, format)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Encode to in-memory PNG or JPEG bytes.
pub fn encode_image(img: &ImageBuffer, format: SaveFormat) -> Result<Vec<u8>> {
    match format {
        SaveFormat::Png => encode_png(img),
        SaveFormat::Jpeg { quality } => encode_jpeg(img, quality),
    }
}

fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let encoder = image::codecs::png::PngEncoder::new(&mut out);
    image::ImageEncoder::write_image(
        encoder,
        img.pixels(),
        img.width(),
        img.height(),
        image::ExtendedColorType::Rgb8,
    )
    .map_err(|e| Error::format("<png encode>", e.to_string()))?;
    Ok(out)
}

/// Encode as baseline JPEG: IJG quality scaling of the Annex K tables,
/// 4:2:0 chroma subsampling. The encoder defaults to 4:4:4 above quality
/// 90, so the factor is pinned explicitly.
pub fn encode_jpeg(img: &ImageBuffer, quality: u8) -> Result<Vec<u8>> {
    if !(1..=100).contains(&quality) {
        return Err(Error::Param(format!(
            "jpeg quality must be in [1, 100], got {quality}"
        )));
    }
    if img.width() > u16::MAX as u32 || img.height() > u16::MAX as u32 {
        return Err(Error::Param(format!(
            "jpeg dimensions limited to 65535, got {}x{}",
            img.width(),
            img.height()
        )));
    }
    let mut out = Vec::new();
    let mut encoder = jpeg_encoder::Encoder::new(&mut out, quality);
    encoder.set_sampling_factor(jpeg_encoder::SamplingFactor::F_2_2);
    encoder
        .encode(
            img.pixels(),
            img.width() as u16,
            img.height() as u16,
            jpeg_encoder::ColorType::Rgb,
        )
        .map_err(|e| Error::format("<jpeg encode>", e.to_string()))?;
    Ok(out)
}

/// Peak signal-to-noise ratio in dB between two same-sized images.
/// Identical images give `f64::INFINITY`.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    if a.width() != b.width() || a.height() != b.height() {
        return Err(Error::Param(format!(
            "psnr requires equal dimensions, got {}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    let sq_sum: u64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    if sq_sum == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sq_sum as f64 / a.pixels().len() as f64;
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pixels_rejects_bad_lengths() {
        assert!(ImageBuffer::from_pixels(2, 2, vec![0; 11]).is_err());
        assert!(ImageBuffer::from_pixels(0, 2, vec![]).is_err());
        assert!(ImageBuffer::from_pixels(2, 2, vec![0; 12]).is_ok());
    }

    #[test]
    fn load_missing_file_is_io_error() {
        let err = load_image("/nonexistent/dir/img.png").unwrap_err();
        assert!(matches!(err, Error::Io { .. }), "got {err:?}");
    }

    #[test]
    fn undecodable_bytes_are_format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.png");
        std::fs::write(&path, b"not an image at all").unwrap();
        let err = load_image(&path).unwrap_err();
        assert!(matches!(err, Error::Format { .. }), "got {err:?}");
    }

    #[test]
    fn all_white_png_decodes_to_255s() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("white.png");
        save_image(&ImageBuffer::constant(2, 2, 255), &path, SaveFormat::Png).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.pixels(), &[255u8; 12][..]);
    }

    // Oracle: encode a known 4x3 byte pattern with the reference PNG codec
    // (the `image` crate writing from its own RgbImage type), then check our
    // loader returns the identical 36 samples.
    #[test]
    fn known_rgb_png_decodes_byte_for_byte() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pattern.png");
        let bytes: Vec<u8> = (0..36u8).map(|i| i.wrapping_mul(7)).collect();
        let reference = image::RgbImage::from_raw(4, 3, bytes.clone()).unwrap();
        reference.save(&path).unwrap();

        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height()), (4, 3));
        assert_eq!(img.pixels(), &bytes[..]);
    }

    #[test]
    fn grayscale_and_alpha_normalize_to_rgb() {
        let dir = tempfile::tempdir().unwrap();

        let gray_path = dir.path().join("gray.png");
        image::GrayImage::from_raw(2, 1, vec![10, 200])
            .unwrap()
            .save(&gray_path)
            .unwrap();
        let gray = load_image(&gray_path).unwrap();
        assert_eq!(gray.pixels(), &[10, 10, 10, 200, 200, 200]);

        let rgba_path = dir.path().join("rgba.png");
        image::RgbaImage::from_raw(1, 1, vec![1, 2, 3, 128])
            .unwrap()
            .save(&rgba_path)
            .unwrap();
        let rgba = load_image(&rgba_path).unwrap();
        assert_eq!(rgba.pixels(), &[1, 2, 3]);
    }

    #[test]
    fn jpeg_quality_zero_rejected() {
        let img = ImageBuffer::constant(8, 8, 128);
        let err = encode_jpeg(&img, 0).unwrap_err();
        assert!(matches!(err, Error::Param(_)));
    }

    #[test]
    fn jpeg_95_round_trip_psnr_on_natural_image() {
        let img = crate::synth::natural_test_image(128, 128);
        let bytes = encode_jpeg(&img, 95).unwrap();
        let back = decode_image(&bytes).unwrap();
        let db = psnr(&img, &back).unwrap();
        assert!(db >= 35.0, "psnr {db:.2} dB below 35 dB at quality 95");
    }

    #[test]
    fn psnr_infinite_on_identical() {
        let img = ImageBuffer::constant(4, 4, 7);
        assert!(psnr(&img, &img).unwrap().is_infinite());
    }
}
