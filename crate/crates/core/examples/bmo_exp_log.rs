//! The adapted BMO space and its exponential link to weights.
//!
//! `|x|²` is not in classical BMO, yet it has finite adapted norm, and
//! `exp(η|x|²)` has a bounded adapted `A_2` bracket for small `η`.
//!
//! ```bash
//! cargo run --example bmo_exp_log
//! ```

use std::sync::Arc;

use schrodinger_weights::bmo::{bmo_theta_norm, exp_log_backward, exp_log_forward};
use schrodinger_weights::grid::{enumerate_cubes, Grid, Strategy};
use schrodinger_weights::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use schrodinger_weights::weights::{ExponentSet, Weight};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid)?);
    let f = grid.sample(|x| x[0] * x[0]);

    for theta in [0.0, 1.0, 2.0, 4.0] {
        let psi = PsiFunctional::new(field.clone(), theta, PsiMode::Centered)?;
        let rep = bmo_theta_norm(&f, &psi, &cubes)?;
        println!("theta = {theta}: ||x^2||_BMO = {:.4}", rep.value);
    }

    let theta = 4.0;
    let psi = PsiFunctional::new(field, theta, PsiMode::Centered)?;
    let e = ExponentSet::classical(1.0, 2.0, theta)?;
    let etas: Vec<f64> = (1..=10).map(|k| 0.2 * k as f64).collect();
    let back = exp_log_backward(&f, &etas, &e, &psi, &cubes, 10.0)?;
    for (eta, c) in &back.sweep {
        println!("eta = {eta:.1}: [exp(eta x^2)] = {c:.4e}");
    }
    println!("largest eta under the ceiling: {:?}", back.best_eta);

    let w = Weight::power(&grid, 0.5)?;
    let fwd = exp_log_forward(&w, &e, &psi, &cubes)?;
    println!("\n|x|^0.5: BMO norm of log w {:.4} <= bound {:.4}: {}", fwd.norm, fwd.bound, fwd.holds);
    Ok(())
}
