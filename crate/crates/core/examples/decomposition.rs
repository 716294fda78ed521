//! Superscar decompositions: each SWF written as a sum of Bogomolny–Schmit
//! states, checked pointwise.

use polyscar::exact::{Ratio, Surd};
use polyscar::geometry::BilliardSpec;
use polyscar::wavefunction::{verify_decomposition, DecompositionCase};

fn main() -> polyscar::Result<()> {
    let cases = [
        (BilliardSpec::bs_triangle(), DecompositionCase::Triangle { u: 3363, q: 2378, m: 121, n: 1 }),
        (BilliardSpec::parallelogram(Ratio::integer(4))?, DecompositionCase::Parallelogram { m: 5, n: 1 }),
        (BilliardSpec::rectangle(Surd::int(1), Surd::sqrt(2))?, DecompositionCase::Rectangle { q: 1, r: 2, c: 2, n: 3 }),
        (
            BilliardSpec::l_shape(Surd::int(2), Surd::int(1), Surd::int(1), Surd::int(1))?,
            DecompositionCase::LShape { gamma: 2, n2: 1 },
        ),
    ];
    for (spec, case) in &cases {
        for r in verify_decomposition(spec, *case, 30)? {
            println!("{:<5} {:>9.2e}  {}", if r.pass { "ok" } else { "FAIL" }, r.max_abs, r.check);
        }
    }
    Ok(())
}
