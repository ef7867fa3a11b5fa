//! A complete benchmark run without any external process: synthetic
//! corpus, builtin grid, in-process high-frequency toy detector.
//!
//! ```bash
//! cargo run --example toy_benchmark
//! ```
//!
//! Prints the per-cell AUC table and writes report + sweep CSVs. Note the
//! degradation trend: clean separation on unaltered data, collapse under
//! heavy blur and noise.

use degrade::bench::{run_grid, RunOptions};
use degrade::corrupt::builtin_grid;
use degrade::manifest::load_manifest;
use degrade::report::{emit_report, ReportFormat};
use degrade::synth::write_synthetic_corpus;
use degrade::toy::HighFreqDetector;
use degrade::Result;

fn main() -> Result<()> {
    let base = std::env::temp_dir().join("degrade-examples/toy_benchmark");
    std::fs::create_dir_all(&base).unwrap();

    let manifest_path = write_synthetic_corpus(base.join("corpus"), 10, 10, 64, 42)?;
    let entries = load_manifest(&manifest_path)?;
    println!("corpus: {} images at {}", entries.len(), manifest_path.display());

    let grid = builtin_grid();
    let run = run_grid(
        &entries,
        &grid,
        &mut HighFreqDetector,
        77,
        base.join("work"),
        &RunOptions {
            jobs: 4,
            ..RunOptions::default()
        },
    )?;

    println!("\n{:<16} {:>3} {:>7} {:>7} {:>7}", "cell", "n", "acc", "auc", "f1");
    for row in &run.rows {
        println!(
            "{:<16} {:>3} {:>7.3} {:>7.3} {:>7.3}",
            row.cell, row.n, row.acc, row.auc, row.f1
        );
    }

    let report_path = base.join("report.csv");
    emit_report(&run.rows, ReportFormat::Csv, &report_path, &grid)?;
    println!("\nreport: {}", report_path.display());
    println!("sweep:  {}", degrade::report::sweep_path(&report_path).display());
    Ok(())
}
