//! Critical radius of `-Δ + V` for a few potentials.
//!
//! For `V = |x|²` the product `ρ(x)(1 + |x|)` stays in a narrow band, and a
//! constant potential has a closed form at the origin.
//!
//! ```bash
//! cargo run --example critical_radius
//! ```

use schrodinger_weights::grid::point;
use schrodinger_weights::potential::{regularity_diagnostics, CriticalRadius, Potential};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let hermite = CriticalRadius::new(Potential::Hermite, 1)?;
    println!("{:>6} {:>12} {:>12}", "x", "rho", "(1+|x|)rho");
    for k in 0..=8 {
        let x = k as f64;
        let rho = hermite.at(&point(&[x]))?;
        println!("{x:>6.1} {rho:>12.6} {:>12.6}", (1.0 + x) * rho);
    }

    let half = CriticalRadius::new(Potential::Constant { value: 0.5 }, 1)?;
    let origin = point(&[0.0]);
    println!("\nV = 1/2, n = 1: rho(0) = {:.9}, residual {:.2e}", half.at(&origin)?, half.residual(&origin)?);

    let samples: Vec<_> = (0..16).map(|k| point(&[-4.0 + 0.5 * k as f64])).collect();
    let diag = regularity_diagnostics(&hermite, &samples)?;
    println!(
        "hermite diagnostics: residual {:.2e}, doubling order {:?}, best comparability {:?}",
        diag.max_residual, diag.doubling_order, diag.best
    );
    Ok(())
}
