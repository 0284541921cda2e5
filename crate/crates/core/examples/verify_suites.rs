//! Runs every verification suite plus the planted-bug controls and prints
//! one line per check.
//!
//! ```bash
//! cargo run --release --example verify_suites
//! ```

use schrodinger_weights::harness::{run_suite, Suite, SuiteConfig};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let cfg = SuiteConfig {
        trial_scale: 0.25,
        ..SuiteConfig::default()
    };
    let report = run_suite(Suite::All, &cfg, 1)?;
    for c in &report.checks {
        println!("{c}");
    }
    println!("{} passed, {} failed", report.passed(), report.failed());
    Ok(())
}
