//! Walk the builtin severity grid over a single image.
//!
//! ```bash
//! cargo run --example severity_grid
//! ```
//!
//! Shows every cell label, its corruption kind, the principal severity
//! scalar, and the PSNR damage it causes; one PNG per cell lands in a
//! temp directory.

use degrade::corrupt::{apply_spec, builtin_grid};
use degrade::raster::{psnr, save_image, SaveFormat};
use degrade::synth::natural_test_image;
use degrade::{Result, RngStream};

fn main() -> Result<()> {
    let out_dir = std::env::temp_dir().join("degrade-examples/severity_grid");
    std::fs::create_dir_all(&out_dir).unwrap();

    let img = natural_test_image(160, 160);
    let grid = builtin_grid();
    println!(
        "builtin grid: {} cells (incl. unaltered)\n{:<16} {:<22} {:>8} {:>10}",
        grid.len(),
        "label",
        "kind",
        "severity",
        "psnr (dB)"
    );

    for spec in grid.corruptions() {
        // Same stream derivation the benchmark uses: (seed, item, cell).
        let mut rng = RngStream::derive(7, "demo-image", &spec.label);
        let corrupted = apply_spec(&img, spec, &mut rng)?;
        let severity = spec
            .kind
            .severity()
            .map(|s| format!("{s}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<16} {:<22} {:>8} {:>10.2}",
            spec.label,
            spec.kind.kind_name(),
            severity,
            psnr(&img, &corrupted)?
        );
        let file = spec.label.replace([' ', '+'], "_");
        save_image(&corrupted, out_dir.join(format!("{file}.png")), SaveFormat::Png)?;
    }
    println!("\nimages written to {}", out_dir.display());
    Ok(())
}
