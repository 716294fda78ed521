//! Continued-fraction convergents of √2 and the error window they sit in.

use polyscar::exact::{convergents, Constant};

fn main() -> polyscar::Result<()> {
    let cf = convergents(&Constant::Sqrt2, 10)?;
    println!("sqrt2 = {}", cf.digits);
    println!("{:>6} {:>6} {:>12} {:>12} {:>12}", "u", "q", "|sqrt2-u/q|", "1/(3√2q²)", "1/(2q²)");
    for (k, c) in cf.convergents.iter().enumerate() {
        let q = c.denom_i64().unwrap() as f64;
        println!(
            "{:>6} {:>6} {:>12.4e} {:>12.4e} {:>12.4e}",
            c.numer(),
            c.denom(),
            cf.epsilon_f64(k),
            1.0 / (3.0 * 2f64.sqrt() * q * q),
            1.0 / (2.0 * q * q)
        );
    }
    // 3363/2378 is closer to √2 than 1/u².
    let last = cf.last();
    let u = last.numer_i64().unwrap() as f64;
    println!("{last}: eps·u² = {:.4}", cf.epsilon_f64(cf.convergents.len() - 1) * u * u);
    Ok(())
}
