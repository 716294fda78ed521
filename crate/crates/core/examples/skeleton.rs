//! Periodic skeletons: the triangle's vertical POCs and the bounces of
//! rectangle singular diagonals.

use polyscar::exact::Surd;
use polyscar::geometry::{BilliardSpec, Epp, Vec2};
use polyscar::skeleton::{rectangle_diagonal, skeleton};

fn main() -> polyscar::Result<()> {
    let epp = Epp::new(&BilliardSpec::bs_triangle())?;
    let sk = skeleton(&epp, &Vec2::ints(0, 1))?;
    println!("triangle: {} POCs in {} cylinders, area {}", sk.pocs.len(), sk.cylinders.len(), sk.total_area());
    for p in &sk.pocs {
        println!(
            "  poc {} (cylinder {}): width {:.6}, period {}, {} folded cells",
            p.id,
            p.cylinder,
            p.width,
            p.period_vector,
            p.folded_cells.len()
        );
    }

    let rect = Epp::new(&BilliardSpec::rectangle(Surd::int(1), Surd::int(1))?)?;
    for (q, r) in [(1, 2), (2, 3), (3, 5)] {
        let sd = rectangle_diagonal(&rect, q, r)?;
        println!("rectangle ({q},{r}): bounces {:?}, ends at {:?}", sd.bounce_counts, sd.terminal_vertex.map(|v| v.to_string()));
    }
    Ok(())
}
