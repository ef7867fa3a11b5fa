//! Run the stochastic augmentation chain and replay its traces.
//!
//! ```bash
//! cargo run --example augment_chain
//! ```
//!
//! Augments the same image under several item ids, prints which stages
//! fired with what parameters, then proves a recorded trace replays to
//! the identical bytes.

use degrade::augment::{apply_trace, augment, AugmentConfig};
use degrade::synth::natural_test_image;
use degrade::{Result, RngStream};

fn main() -> Result<()> {
    let cfg = AugmentConfig::default(); // the paper-default preset
    let img = natural_test_image(96, 96);

    println!("stage probabilities: enhance 0.5, blur 0.5, noise 0.3, jpeg 0.7\n");
    for i in 0..8 {
        let item_id = format!("frame_{i:03}");
        let mut rng = RngStream::derive(42, &item_id, "augment");
        let (out, trace) = augment(&img, &cfg, &mut rng)?;

        let describe = [
            trace
                .enhance
                .map(|e| format!("enhance[{:?} x{:.2}]", e.kind, e.factor)),
            trace
                .blur
                .map(|b| format!("blur[{:?} k={}]", b.kind, b.kernel)),
            trace.noise.map(|n| format!("noise[sigma={:.1}]", n.sigma)),
            trace.jpeg.map(|j| format!("jpeg[q={}]", j.quality)),
        ]
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
        let chain = if describe.is_empty() {
            "untouched".to_owned()
        } else {
            describe.join(" -> ")
        };
        println!("{item_id}: {chain}");

        // Replay: the trace plus the same stream reproduce the pixels.
        let mut replay_rng = RngStream::derive(42, &item_id, "augment");
        let _ = degrade::augment::sample_chain(&cfg, &mut replay_rng)?; // advance past the sampling draws
        let replayed = apply_trace(&img, &trace, &mut replay_rng)?;
        assert_eq!(out, replayed, "trace replay must be bitwise identical");
    }

    println!("\nall traces replayed bitwise; same seeds will do so on any machine");
    Ok(())
}
