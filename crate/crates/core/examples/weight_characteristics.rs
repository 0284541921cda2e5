//! Adapted against classical weight characteristics.
//!
//! `w = exp(η|x|²)` is far outside `A_2` once `η` is moderate, but the
//! penalty `(1 + ℓ(Q)/ρ)^θ` built from `V = |x|²` keeps the adapted bracket
//! small.
//!
//! ```bash
//! cargo run --example weight_characteristics
//! ```

use std::sync::Arc;

use schrodinger_weights::grid::{enumerate_cubes, Grid, Strategy};
use schrodinger_weights::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use schrodinger_weights::weights::{ap_theta, restricted_ap, ExponentSet, Weight};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid)?);
    let theta = 4.0;
    let psi = PsiFunctional::new(field, theta, PsiMode::Centered)?;
    let e = ExponentSet::classical(1.0, 2.0, theta)?;

    println!("{:>5} {:>14} {:>14}", "eta", "adapted", "classical");
    for k in 1..=8 {
        let eta = 0.25 * k as f64;
        let w = Weight::exponential(&grid, eta)?;
        let adapted = ap_theta(&w, &e, &psi, &cubes)?;
        let classical = restricted_ap(&w, 2.0, &cubes)?;
        println!("{eta:>5.2} {:>14.4e} {:>14.4e}", adapted.value, classical.value);
    }

    let w = Weight::power(&grid, 0.5)?;
    let rep = ap_theta(&w, &e, &psi, &cubes)?;
    println!("\n|x|^0.5: adapted {:.4} attained on cube {:?}", rep.value, rep.argmax_cube);
    Ok(())
}
