//! Sample a parallelogram SWF and write it as a 16-bit PGM heat map.
//!
//!     cargo run --release --example field_pgm -- out.pgm

use polyscar::cli::output::pgm16;
use polyscar::exact::Ratio;
use polyscar::geometry::BilliardSpec;
use polyscar::wavefunction::{sample_field, samples_per_wavelength, ModeKind, ModeOptions, WaveMode};

fn main() -> polyscar::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "parallelogram.pgm".into());
    let spec = BilliardSpec::parallelogram(Ratio::integer(4))?;
    let mode = WaveMode::new(&spec, ModeKind::SwfBranch1, 5, 1, ModeOptions::default())?;
    let grid = 400;
    println!("{:.1} samples per wavelength", samples_per_wavelength(&mode, grid));
    let field = sample_field(&mode, grid)?;
    println!("{}: max |Ψ| = {:.4}", field.label, field.max_abs());
    std::fs::write(&path, pgm16(&field))?;
    println!("wrote {path}");
    Ok(())
}
