//! Rectangle levels on the (1,1) periodic skeleton and the aperiodic quantum
//! numbers they map back to.

use polyscar::exact::Surd;
use polyscar::geometry::{period_lattice, BilliardSpec};
use polyscar::quantization::{
    aperiodic_counterpart, check_compatibility, spectrum_aperiodic, spectrum_listing, SkeletonDirection, SkeletonKind,
};

fn main() -> polyscar::Result<()> {
    let spec = BilliardSpec::rectangle(Surd::int(1), Surd::sqrt(2))?;
    let lattice = period_lattice(&spec, None)?;
    let dir = SkeletonDirection::Rectangle { q: 1, r: 1 };
    let report = check_compatibility(&spec, dir)?;
    println!("{}: (k,l) = {:?}", report.constraint, report.coprime);

    for e in spectrum_listing(&spec, &lattice, SkeletonKind::Periodic(dir), 3)?.iter().take(10) {
        let (m2, n2) = aperiodic_counterpart(e)?;
        let flat = spectrum_aperiodic(&spec, &lattice, m2, n2)?;
        println!(
            "m = {:>2} n = {}  E = {:>10.4}  ->  ({m2},{n2})  E = {:>10.4}",
            e.m, e.n, e.energy, flat.energy
        );
    }

    let bad = BilliardSpec::rectangle(Surd::int(1), &Surd::int(1) + &Surd::sqrt(2))?;
    match spectrum_listing(&bad, &period_lattice(&bad, None)?, SkeletonKind::Periodic(dir), 3) {
        Err(e) => println!("a = 1, b = 1+√2: [{}] {e}", e.code()),
        Ok(_) => println!("unexpectedly compatible"),
    }
    Ok(())
}
