//! Period lattices of the four billiard families, with the Euclid certificates
//! that D1/q is itself a period.

use polyscar::exact::{Ratio, Surd};
use polyscar::geometry::{period_lattice, triangle_lattices, BilliardSpec};

fn main() -> polyscar::Result<()> {
    let specs = [
        BilliardSpec::parallelogram(Ratio::integer(4))?,
        BilliardSpec::rectangle(Surd::int(1), Surd::frac(3, 2))?,
        BilliardSpec::l_shape(Surd::int(2), Surd::int(1), Surd::int(1), Surd::int(1))?,
    ];
    for spec in &specs {
        println!("{} (genus {})", spec.family, spec.genus()?);
        println!("{}\n", period_lattice(spec, None)?);
    }

    let tri = BilliardSpec::bs_triangle();
    println!("triangle (genus {})", tri.genus()?);
    let (u, q) = triangle_lattices(&Ratio::new(3363, 2378))?;
    for lattice in [&u, &q] {
        println!("{lattice}");
        for (label, i, cert) in lattice.certificates()?.iter().take(2) {
            println!(
                "  {label}[{i}]: remainders {:?} certify {}·D",
                cert.remainders().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
                cert.certified
            );
        }
        println!();
    }
    Ok(())
}
