//! Define, serialize and reload a custom severity grid.
//!
//! ```bash
//! cargo run --example custom_grid
//! ```
//!
//! Grids are plain JSON, so any file following the schema can replace the
//! builtin grid via `SeverityGrid::load` or `degrade bench`'s `grid` key.

use degrade::corrupt::{apply_spec, CorruptionKind, CorruptionSpec, SeverityGrid};
use degrade::synth::natural_test_image;
use degrade::{Result, RngStream};

fn main() -> Result<()> {
    let grid = SeverityGrid::new(vec![
        CorruptionSpec::new("webcam jpeg", CorruptionKind::Jpeg { quality: 45 }),
        CorruptionSpec::new("low light", CorruptionKind::LinearAdjust { alpha: 0.6, beta: -20.0 }),
        CorruptionSpec::new(
            "noisy upload",
            CorruptionKind::Compose {
                children: vec![
                    CorruptionSpec::new("sensor", CorruptionKind::PoissonGaussianNoise {
                        a: 0.01,
                        b: 1e-4,
                    }),
                    CorruptionSpec::new("recompress", CorruptionKind::Jpeg { quality: 55 }),
                ],
            },
        ),
    ])?;

    let path = std::env::temp_dir().join("degrade-examples/custom_grid.json");
    std::fs::create_dir_all(path.parent().unwrap()).unwrap();
    std::fs::write(&path, grid.to_json()).unwrap();
    println!("wrote {}\n{}", path.display(), grid.to_json());

    let reloaded = SeverityGrid::load(&path)?;
    assert_eq!(grid, reloaded);

    let img = natural_test_image(96, 96);
    for spec in reloaded.corruptions() {
        let mut rng = RngStream::derive(1, "demo", &spec.label);
        let out = apply_spec(&img, spec, &mut rng)?;
        println!(
            "applied {:?}: psnr {:.2} dB",
            spec.label,
            degrade::raster::psnr(&img, &out)?
        );
    }
    Ok(())
}
