//! Where the triangle SWF is small: its values along the folded singular
//! diagonals compared with an ordinary line, and the nodal set of a
//! low-lying state.

use polyscar::geometry::BilliardSpec;
use polyscar::wavefunction::{
    default_nodal_threshold, line_max_abs, nodal_lines, sample_field, triangle_folded_diagonals, triangle_side_bound,
    ModeKind, ModeOptions, WaveMode,
};

fn main() -> polyscar::Result<()> {
    let spec = BilliardSpec::bs_triangle();
    let opts = ModeOptions { approximation: Some((3363, 2378)), skeleton: None };
    let mode = WaveMode::new(&spec, ModeKind::SwfU, 121, 1, opts)?;
    println!("bound {:.4}", triangle_side_bound(3363, 121, 1));
    for (label, a, b) in triangle_folded_diagonals(121, 1) {
        println!("  {label:<20} max |Ψ| = {:.4}", line_max_abs(&mode, a, b, 10_000));
    }
    println!("  {:<20} max |Ψ| = {:.4}", "x = 0.8", line_max_abs(&mode, [0.8, 0.0], [0.8, 0.8 * (2f64.sqrt() - 1.0)], 10_000));

    // With u/q = 3/2 the wavelengths are long enough to resolve on a grid.
    let low = WaveMode::new(&spec, ModeKind::SwfU, 3, 1, ModeOptions { approximation: Some((3, 2)), skeleton: None })?;
    let field = sample_field(&low, 200)?;
    let points = nodal_lines(&field, default_nodal_threshold(&field))?;
    println!("{}: {} nodal points", field.label, points.len());
    Ok(())
}
