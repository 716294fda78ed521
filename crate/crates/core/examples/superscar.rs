//! A folded Bogomolny–Schmit state against the SWF at the same point of the
//! folded singular diagonal x = 1.

use polyscar::geometry::BilliardSpec;
use polyscar::wavefunction::{one_sided_limits, strips, ModeKind, ModeOptions, WaveMode};

fn main() -> polyscar::Result<()> {
    let spec = BilliardSpec::bs_triangle();
    for s in strips(&spec)? {
        println!("poc {}: cylinder {}, width {:.4}, period {:.4}", s.poc, s.cylinder, s.width, s.period);
    }
    let (p, normal) = ([1.0, 0.2], [1.0, 0.0]);
    for poc in [0, 4] {
        let folded = WaveMode::new(&spec, ModeKind::BsFolded { poc }, 3, 2, ModeOptions::default())?;
        let l = one_sided_limits(&folded, p, normal)?;
        println!(
            "bs-folded({poc}): Ψ- = {:.6} Ψ+ = {:.6} value jump {:.2e}, normal-derivative jump {:.4}",
            l.minus, l.plus, l.value_jump, l.derivative_jump
        );
    }
    let swf = WaveMode::new(&spec, ModeKind::SwfU, 3, 2, ModeOptions { approximation: Some((3363, 2378)), skeleton: None })?;
    let l = one_sided_limits(&swf, p, normal)?;
    println!("swf-u: value jump {:.2e}, derivative jump {:.2e}", l.value_jump, l.derivative_jump);
    Ok(())
}
