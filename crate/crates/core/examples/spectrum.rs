//! Lowest semiclassical levels of the triangle on the aperiodic skeleton and
//! the ratios of three high-lying ones.

use polyscar::exact::Ratio;
use polyscar::geometry::{period_lattice, Approximation, BilliardSpec, Variant};
use polyscar::quantization::{spectrum_aperiodic, spectrum_listing, SkeletonKind};

fn main() -> polyscar::Result<()> {
    let spec = BilliardSpec::bs_triangle();
    let approx = Approximation::new(&Ratio::new(3363, 2378), Variant::U)?;
    let lattice = period_lattice(&spec, Some(&approx))?;

    for e in spectrum_listing(&spec, &lattice, SkeletonKind::Aperiodic, 6)?.iter().take(8) {
        println!("(m,n) = ({:>2},{:>2})  E = {:.6e}", e.m, e.n, e.energy);
    }

    let e: Vec<f64> = [121, 191, 266]
        .iter()
        .map(|&m| spectrum_aperiodic(&spec, &lattice, m, 1).map(|s| s.energy))
        .collect::<polyscar::Result<_>>()?;
    println!("E191/E121 = {:.4}", e[1] / e[0]);
    println!("E266/E191 = {:.4}", e[2] / e[1]);
    Ok(())
}
