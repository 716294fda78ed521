use clap::Parser;

use polyscar::cli::{configure_threads, run, Cli};

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error[{}]: {e}", e.code());
        std::process::exit(e.exit_code());
    }
    std::process::exit(run(&cli));
}
