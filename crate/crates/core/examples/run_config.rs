//! Driving the command-line tool from code: load a run configuration and
//! produce the same table `swlab rho --config ... --format csv` prints.
//!
//! ```bash
//! cargo run --example run_config -- crates/core/examples/configs/hermite1d.json
//! ```

use std::path::PathBuf;

use schrodinger_weights::cli;
use schrodinger_weights::config::RunConfig;
use schrodinger_weights::io::Format;
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/hermite1d.json")));
    let cfg = RunConfig::load(&path)?;
    let out = cli::rho(&cfg)?;
    out.write_to(std::io::stdout(), Format::Csv)?;
    eprintln!("summary: {}", out.summary);
    Ok(())
}
