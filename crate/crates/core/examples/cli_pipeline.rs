//! The command functions behind the binary, driven from a config string.

use polyscar::cli::{cmd_ratio_check, cmd_verify, RunConfig};

fn main() -> polyscar::Result<()> {
    let cfg = RunConfig::parse("family = rectangle\na = 1\nb = sqrt2\nskeleton = 1,1\nm = 3\nn = 2\n")?;
    print!("{}", String::from_utf8_lossy(&cmd_verify(&cfg)?.bytes));
    let tri = RunConfig::parse("approximation = 3363/2378\nformat = json\n")?;
    print!("{}", String::from_utf8_lossy(&cmd_ratio_check(&tri)?.bytes));
    Ok(())
}
