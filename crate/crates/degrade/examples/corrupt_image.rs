//! Apply individual corruption operators to one image.
//!
//! ```bash
//! cargo run --example corrupt_image
//! ```
//!
//! Writes the original and one PNG per operator into a temp directory and
//! prints the PSNR cost of each corruption.

use degrade::corrupt::{
    blur, gamma, gaussian_noise, jpeg_round_trip, linear_adjust, resize_degrade, BlurFilter,
};
use degrade::raster::{psnr, save_image, SaveFormat};
use degrade::synth::natural_test_image;
use degrade::{Result, RngStream};

fn main() -> Result<()> {
    let out_dir = std::env::temp_dir().join("degrade-examples/corrupt_image");
    std::fs::create_dir_all(&out_dir).unwrap();

    let img = natural_test_image(192, 192);
    save_image(&img, out_dir.join("original.png"), SaveFormat::Png)?;

    let mut rng = RngStream::derive(2024, "demo-image", "noise");
    let variants = vec![
        ("gaussian_noise_30", gaussian_noise(&img, 30.0, &mut rng)?),
        ("gaussian_blur_7", blur(&img, BlurFilter::Gaussian, 7)?),
        ("average_blur_7", blur(&img, BlurFilter::Average, 7)?),
        ("median_blur_7", blur(&img, BlurFilter::Median, 7)?),
        ("jpeg_q30", jpeg_round_trip(&img, 30)?),
        ("resize_x8", resize_degrade(&img, 8)?),
        ("gamma_0.5", gamma(&img, 0.5)?),
        ("brighter_1.3x", linear_adjust(&img, 1.3, 0.0)?),
    ];

    println!("{:<18} {:>9}", "corruption", "psnr (dB)");
    for (name, variant) in &variants {
        save_image(variant, out_dir.join(format!("{name}.png")), SaveFormat::Png)?;
        println!("{:<18} {:>9.2}", name, psnr(&img, variant)?);
    }
    println!("\nimages written to {}", out_dir.display());
    Ok(())
}
