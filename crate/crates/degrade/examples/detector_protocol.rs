//! The detector wire protocol from both sides.
//!
//! ```bash
//! cargo run --example detector_protocol
//! ```
//!
//! Run normally, this example writes a few images and drives a detector
//! child process; run with `--serve`, it *is* that detector. A conforming
//! detector fits in the ~20 lines of `serve`: read one JSON object per
//! line, answer `{"id", "score"}` per request, exit on closed stdin.

use std::io::{BufRead, Write};

use degrade::detector::{score_images, DetectorEndpoint};
use degrade::raster::{load_image, save_image, SaveFormat};
use degrade::synth::{natural_test_image, smooth_real};
use degrade::toy::high_freq_score;
use degrade::{Result, RngStream};

fn serve() -> Result<()> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    for line in stdin.lock().lines() {
        let line = line.expect("readable stdin");
        if line.trim().is_empty() {
            continue;
        }
        let request: serde_json::Value = serde_json::from_str(&line).expect("json request");
        let path = request["path"].as_str().expect("path field");
        let score = high_freq_score(&load_image(path)?);
        let reply = serde_json::json!({ "id": request["id"], "score": score });
        let mut out = stdout.lock();
        writeln!(out, "{reply}").expect("writable stdout");
        out.flush().ok();
    }
    Ok(())
}

fn main() -> Result<()> {
    if std::env::args().any(|a| a == "--serve") {
        return serve();
    }

    let dir = std::env::temp_dir().join("degrade-examples/detector_protocol");
    std::fs::create_dir_all(&dir).unwrap();
    let mut items = Vec::new();
    for (name, img) in [
        ("textured", natural_test_image(64, 64)),
        ("smooth", smooth_real(64, 64, &mut RngStream::derive(3, "smooth", "gen"))),
    ] {
        let path = dir.join(format!("{name}.png"));
        save_image(&img, &path, SaveFormat::Png)?;
        items.push((name.to_owned(), path));
    }

    // Spawn ourselves as the detector child.
    let me = std::env::current_exe().expect("own path");
    let endpoint = DetectorEndpoint::new(
        "self-serve",
        vec![me.to_string_lossy().into_owned(), "--serve".to_owned()],
    );
    let batch = score_images(&endpoint, &items)?;
    for (id, score) in &batch.scores {
        println!("{id}: score {score:.4}");
    }
    println!("(same protocol works from any language: one JSON object per line)");
    Ok(())
}
