//! End-to-end CLI tests: flags, outputs, determinism and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use degrade::synth::write_synthetic_corpus;

fn degrade(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degrade"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn corrupt_identity_spec_copies_inputs_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("in"), 2, 1, 32, 5).unwrap();
    let out = degrade(
        &["corrupt", "--input", "in", "--spec", "gamma:g=1", "--seed", "3", "--out", "out"],
        dir.path(),
    );
    assert_success(&out);

    let mut cells: Vec<_> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(cells.len(), 1);
    let cell_dir = cells.pop().unwrap();
    for name in ["real_000.png", "real_001.png", "fake_000.png"] {
        let original = std::fs::read(dir.path().join("in").join(name)).unwrap();
        let copied = std::fs::read(cell_dir.join(name)).unwrap();
        assert_eq!(original, copied, "{name}");
    }
}

#[test]
fn corrupt_builtin_grid_writes_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("in"), 2, 1, 32, 5).unwrap();
    let before: Vec<(std::path::PathBuf, Vec<u8>)> = std::fs::read_dir(dir.path().join("in"))
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();

    let out = degrade(
        &["corrupt", "--input", "in", "--grid", "builtin", "--seed", "3", "--out", "out", "--jobs", "4"],
        dir.path(),
    );
    assert_success(&out);

    // Inputs are never mutated.
    for (path, bytes) in &before {
        assert_eq!(&std::fs::read(path).unwrap(), bytes, "{path:?} changed");
    }

    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("cell ")).count(), 32);

    let mut files = 0usize;
    for cell in std::fs::read_dir(dir.path().join("out")).unwrap() {
        files += std::fs::read_dir(cell.unwrap().path()).unwrap().count();
    }
    assert_eq!(files, 32 * 3, "every corruption cell holds one file per input");
}

#[test]
fn corrupt_missing_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = degrade(
        &["corrupt", "--input", "nope", "--spec", "gamma:g=1", "--out", "out"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn corrupt_requires_spec_or_grid() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("in"), 1, 1, 32, 5).unwrap();
    let out = degrade(&["corrupt", "--input", "in", "--out", "out"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn augment_is_deterministic_and_traces_parse() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("in"), 3, 3, 32, 5).unwrap();
    for run in ["a", "b"] {
        let out = degrade(
            &[
                "augment", "--input", "in", "--preset", "paper-default", "--seed", "9",
                "--out", &format!("out-{run}"), "--trace", &format!("trace-{run}.jsonl"),
            ],
            dir.path(),
        );
        assert_success(&out);
    }
    let trace_a = std::fs::read(dir.path().join("trace-a.jsonl")).unwrap();
    let trace_b = std::fs::read(dir.path().join("trace-b.jsonl")).unwrap();
    assert_eq!(trace_a, trace_b);

    for entry in std::fs::read_dir(dir.path().join("out-a")).unwrap() {
        let path = entry.unwrap().path();
        let other = dir.path().join("out-b").join(path.file_name().unwrap());
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&other).unwrap());
    }

    let text = String::from_utf8(trace_a).unwrap();
    assert_eq!(text.lines().count(), 6);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["item_id"].is_string());
        for stage in ["enhance", "blur", "noise", "jpeg"] {
            assert!(v.get(stage).is_some(), "missing {stage} in {line}");
        }
    }
}

#[test]
fn augment_non_stochastic_applies_all_stages_every_time() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("in"), 2, 2, 32, 5).unwrap();
    let out = degrade(
        &[
            "augment", "--input", "in", "--preset", "non-stochastic", "--seed", "4",
            "--out", "out", "--trace", "trace.jsonl",
        ],
        dir.path(),
    );
    assert_success(&out);
    let text = std::fs::read_to_string(dir.path().join("trace.jsonl")).unwrap();
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for stage in ["enhance", "blur", "noise", "jpeg"] {
            assert!(!v[stage].is_null(), "{stage} skipped in {line}");
        }
    }
}

#[test]
fn bench_with_bad_detector_exits_3_naming_the_cell() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("corpus"), 2, 2, 32, 5).unwrap();
    std::fs::write(
        dir.path().join("bench.json"),
        serde_json::json!({
            "seed": 1,
            "manifest": "corpus/manifest.csv",
            "detector": { "name": "broken", "command": ["/no/such/detector"] },
            "report": "report.csv"
        })
        .to_string(),
    )
    .unwrap();
    let out = degrade(&["bench", "--config", "bench.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unaltered"), "cell label missing: {stderr}");
}

#[test]
fn bench_report_and_sweep_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("corpus"), 4, 4, 48, 5).unwrap();
    std::fs::write(
        dir.path().join("bench.json"),
        serde_json::json!({
            "seed": 17,
            "manifest": "corpus/manifest.csv",
            "grid": "builtin",
            "detector": {
                "name": "toy-hf",
                "command": [env!("CARGO_BIN_EXE_degrade"), "toy-detector"]
            },
            "workdir": "work",
            "report": "report.csv",
            "jobs": 4
        })
        .to_string(),
    )
    .unwrap();
    let out = degrade(&["bench", "--config", "bench.json"], dir.path());
    assert_success(&out);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("unaltered"), "{stdout}");

    // 33 cells + header in the report; clean synthetic data separates
    // perfectly, so the unaltered row carries auc = 1.0.
    let report = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert_eq!(report.lines().count(), 34);
    let unaltered = report
        .lines()
        .find(|l| l.starts_with("toy-hf,unaltered,"))
        .expect("unaltered row");
    let auc: f64 = unaltered.split(',').nth(4).unwrap().parse().unwrap();
    assert_eq!(auc, 1.0, "unaltered AUC in {unaltered}");

    // Companion sweep emitted alongside.
    assert!(dir.path().join("report_sweep.csv").exists());

    // Merge + gaussian-noise sweep: 6 points.
    let out = degrade(
        &["report", "report.csv", "--sweep", "gaussian_noise", "--out", "noise_sweep.csv"],
        dir.path(),
    );
    assert_success(&out);
    let sweep = std::fs::read_to_string(dir.path().join("noise_sweep.csv")).unwrap();
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines.len(), 7, "header + 6 noise levels: {sweep}");
    assert_eq!(lines[0], "detector,family,severity,cell,auc");
    let severities: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(severities, vec![5.0, 10.0, 20.0, 30.0, 40.0, 50.0]);
}

#[test]
fn report_with_no_files_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = degrade(&["report", "--out", "s.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_writes_manifest_and_images() {
    let dir = tempfile::tempdir().unwrap();
    let out = degrade(
        &["synth", "--out", "corpus", "--real", "2", "--fake", "3", "--size", "32", "--seed", "8"],
        dir.path(),
    );
    assert_success(&out);
    let manifest = std::fs::read_to_string(dir.path().join("corpus/manifest.csv")).unwrap();
    assert_eq!(manifest.lines().count(), 6);
}

#[test]
fn custom_grid_file_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    write_synthetic_corpus(dir.path().join("in"), 1, 1, 32, 5).unwrap();
    let grid = serde_json::json!({
        "cells": [
            { "label": "soft jpeg", "kind": "jpeg", "params": { "quality": 80 } },
            { "label": "mild noise", "kind": "gaussian_noise", "params": { "sigma": 10.0 } }
        ]
    });
    std::fs::write(dir.path().join("grid.json"), grid.to_string()).unwrap();
    let out = degrade(
        &["corrupt", "--input", "in", "--grid", "grid.json", "--seed", "2", "--out", "out"],
        dir.path(),
    );
    assert_success(&out);
    let cells: Vec<String> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(cells.len(), 2);
    assert!(cells.iter().any(|c| c.starts_with("soft_jpeg")), "{cells:?}");
    assert!(cells.iter().any(|c| c.starts_with("mild_noise")), "{cells:?}");
}
