//! Fitted constants under grid refinement: a stable constant grows less
//! than 10% per doubling, a planted wrong Gaussian constant does not.
//!
//! ```bash
//! cargo run --release --example refinement_sweep
//! ```

use schrodinger_weights::harness::{refinement_sweep, SweepCheck};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let cases = [
        (SweepCheck::HeatDomination, vec![128, 256, 512]),
        (SweepCheck::HeatKernel, vec![256, 512, 1024]),
        (SweepCheck::HeatKernelWrongGaussian, vec![256, 512, 1024]),
        (SweepCheck::FracDomination, vec![128, 256, 512]),
        (SweepCheck::TwoWeight, vec![256, 512, 1024]),
    ];
    for (check, cells) in cases {
        let t = refinement_sweep(check, &cells)?;
        let fits: Vec<String> = t.rows.iter().map(|r| format!("N={}: {:.4e}", r.n, r.fitted)).collect();
        println!("{check}: {} | growth {:.3} | stable {}", fits.join(", "), t.max_growth, t.stable);
    }
    Ok(())
}
