//! Score-based metrics in isolation: ACC, AUC and F1.
//!
//! ```bash
//! cargo run --example metrics_quickstart
//! ```

use degrade::metrics::{auc, confusion, evaluate, Label, ScoredSample, ThresholdPolicy};
use degrade::Result;

fn main() -> Result<()> {
    // A small detector output: fakes mostly high, one miss at 0.35.
    let samples: Vec<ScoredSample> = [
        (Label::Fake, 0.92),
        (Label::Fake, 0.81),
        (Label::Fake, 0.35),
        (Label::Fake, 0.67),
        (Label::Real, 0.40),
        (Label::Real, 0.12),
        (Label::Real, 0.58),
        (Label::Real, 0.05),
    ]
    .into_iter()
    .map(|(label, score)| ScoredSample::new(label, score))
    .collect();

    println!("auc = {:.4} (threshold-free)", auc(&samples)?);

    let c = confusion(&samples, 0.5);
    println!(
        "confusion at 0.5: tp={} fp={} tn={} fn={}",
        c.true_pos, c.false_pos, c.true_neg, c.false_neg
    );

    let fixed = evaluate(&samples, ThresholdPolicy::Fixed { value: 0.5 })?;
    println!(
        "fixed(0.5):  acc={:.3} auc={:.3} f1={:.3}",
        fixed.acc, fixed.auc, fixed.f1
    );

    let youden = evaluate(&samples, ThresholdPolicy::Youden)?;
    println!(
        "youden:      acc={:.3} auc={:.3} f1={:.3} (picked threshold {})",
        youden.acc, youden.auc, youden.f1, youden.threshold
    );
    Ok(())
}
