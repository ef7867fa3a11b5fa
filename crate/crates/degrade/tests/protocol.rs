//! Wire-protocol integration tests driving the real `degrade` binary's
//! reference plug-ins over stdin/stdout.

use std::path::PathBuf;

use degrade::corrupt::{gaussian_noise, BlurFilter};
use degrade::detector::{score_images, transform_images, DetectorEndpoint};
use degrade::raster::{load_image, save_image, SaveFormat};
use degrade::synth::natural_test_image;
use degrade::toy::high_freq_score;
use degrade::{Error, ImageBuffer, RngStream};

fn bin() -> String {
    env!("CARGO_BIN_EXE_degrade").to_owned()
}

fn endpoint(name: &str, extra: &[&str]) -> DetectorEndpoint {
    let mut command = vec![bin(), "toy-detector".to_owned()];
    command.extend(extra.iter().map(|s| s.to_string()));
    DetectorEndpoint::new(name, command)
}

fn transform_endpoint(extra: &[&str]) -> DetectorEndpoint {
    let mut command = vec![bin(), "toy-transform".to_owned()];
    command.extend(extra.iter().map(|s| s.to_string()));
    DetectorEndpoint::new("toy-transform", command)
}

fn write_images(dir: &std::path::Path, count: usize) -> Vec<(String, PathBuf)> {
    (0..count)
        .map(|i| {
            let img = natural_test_image(32 + 4 * i as u32, 32);
            let path = dir.join(format!("img{i}.png"));
            save_image(&img, &path, SaveFormat::Png).unwrap();
            (format!("img{i}"), path)
        })
        .collect()
}

#[test]
fn constant_detector_scores_everything_the_same() {
    let dir = tempfile::tempdir().unwrap();
    let items = write_images(dir.path(), 3);
    let ep = endpoint("const", &["--constant", "0.5"]);
    let batch = score_images(&ep, &items).unwrap();
    assert_eq!(batch.scores.len(), 3);
    assert!(batch.scores.iter().all(|(_, s)| *s == 0.5));
    assert!(batch.failed.is_empty());
}

#[test]
fn subprocess_scores_match_in_process_math() {
    let dir = tempfile::tempdir().unwrap();
    let items = write_images(dir.path(), 4);
    let ep = endpoint("toy", &[]);
    let batch = score_images(&ep, &items).unwrap();
    for (id, score) in &batch.scores {
        let (_, path) = items.iter().find(|(i, _)| i == id).unwrap();
        let expect = high_freq_score(&load_image(path).unwrap());
        assert_eq!(score, &expect, "{id}");
    }
}

#[test]
fn out_of_range_score_is_a_protocol_error_naming_the_item() {
    let dir = tempfile::tempdir().unwrap();
    let items = write_images(dir.path(), 2);
    let ep = endpoint("rogue", &["--constant", "1.5"]);
    let err = score_images(&ep, &items).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Protocol(_)), "{msg}");
    assert!(msg.contains("img0") && msg.contains("1.5"), "{msg}");
}

#[test]
fn detector_death_reports_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let items = write_images(dir.path(), 3);
    let mut ep = endpoint("dies", &["--fail-after", "1"]);
    ep.batch_size = 1;
    let err = score_images(&ep, &items).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Detector(_)), "{msg}");
    assert!(msg.contains("1 of 3"), "{msg}");
}

#[test]
fn slow_detector_items_are_excluded_with_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let items = write_images(dir.path(), 2);
    let mut ep = endpoint("slow", &["--delay-ms", "2000"]);
    ep.timeout_secs = 0.3;
    let batch = score_images(&ep, &items).unwrap();
    assert!(batch.scores.len() < 2);
    assert!(!batch.failed.is_empty());
    assert_eq!(batch.scores.len() + batch.failed.len(), 2);
}

#[test]
fn identity_transform_outputs_byte_equal_files() {
    let dir = tempfile::tempdir().unwrap();
    let items = write_images(dir.path().to_path_buf().as_path(), 2);
    let out_dir = dir.path().join("out");
    let ep = transform_endpoint(&["--op", "identity", "--out-dir", out_dir.to_str().unwrap()]);
    let batch = transform_images(&ep, &items).unwrap();
    assert_eq!(batch.outputs.len(), 2);
    for (id, out_path) in &batch.outputs {
        let (_, in_path) = items.iter().find(|(i, _)| i == id).unwrap();
        assert_ne!(out_path, in_path, "transform must write a new file");
        assert_eq!(
            std::fs::read(out_path).unwrap(),
            std::fs::read(in_path).unwrap(),
            "{id}"
        );
    }
}

#[test]
fn missing_transform_output_is_a_protocol_error() {
    let dir = tempfile::tempdir().unwrap();
    let items = write_images(dir.path(), 1);
    let out_dir = dir.path().join("out");
    let ep = transform_endpoint(&["--op", "missing", "--out-dir", out_dir.to_str().unwrap()]);
    let err = transform_images(&ep, &items).unwrap_err();
    assert!(matches!(err, Error::Protocol(_)), "{err}");
    assert!(err.to_string().contains("img0"), "{err}");
}

// External median filtering undoes most of the additive noise on a
// constant image: the noise stddev after the round trip must shrink.
#[test]
fn external_median_filter_reduces_noise_stddev() {
    fn stddev(img: &ImageBuffer) -> f64 {
        let mean = img.mean();
        (img.pixels()
            .iter()
            .map(|&v| (v as f64 - mean).powi(2))
            .sum::<f64>()
            / img.pixels().len() as f64)
            .sqrt()
    }

    let dir = tempfile::tempdir().unwrap();
    let base = ImageBuffer::constant(96, 96, 128);
    let mut rng = RngStream::derive(11, "median-chain", "noise");
    let noisy = gaussian_noise(&base, 30.0, &mut rng).unwrap();
    let noisy_path = dir.path().join("noisy.png");
    save_image(&noisy, &noisy_path, SaveFormat::Png).unwrap();

    let out_dir = dir.path().join("out");
    let ep = transform_endpoint(&[
        "--op",
        "median",
        "--kernel",
        "3",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    let items = vec![("noisy".to_owned(), noisy_path)];
    let batch = transform_images(&ep, &items).unwrap();
    let denoised = load_image(&batch.outputs[0].1).unwrap();

    let (before, after) = (stddev(&noisy), stddev(&denoised));
    assert!(
        after < before * 0.75,
        "median filter should cut noise stddev: {before:.2} -> {after:.2}"
    );

    // Sanity: the in-process median gives the same pixels.
    let direct = degrade::corrupt::blur(&noisy, BlurFilter::Median, 3).unwrap();
    assert_eq!(denoised, direct);
}
