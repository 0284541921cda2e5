//! Two-weight bounds for the stratified fractional integral under entropy
//! bump conditions.
//!
//! ```bash
//! cargo run --release --example two_weight_bumps
//! ```

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schrodinger_weights::grid::{build_lattice, Grid};
use schrodinger_weights::operators::{standard_probes, stratify};
use schrodinger_weights::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use schrodinger_weights::twoweight::{bump_characteristic, two_weight_check, EntropyFunction, EntropyPair};
use schrodinger_weights::weights::{ExponentSet, Weight};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let eps = EntropyFunction::new(2.0, 1.0)?;
    println!("entropy normalization for p = 2: {:.9}", eps.normalization());

    let grid = Grid::new(1, 4.0, 128)?;
    let e = ExponentSet::from_p(1.0, 1.25, 0.6, 2.0)?;
    let sigma = Weight::power(&grid, -0.2)?;
    let w = Weight::power(&grid, 0.3)?;
    let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid)?);
    let psi = PsiFunctional::new(field, e.theta, PsiMode::Sup)?;
    let strat = stratify(&build_lattice(&grid, grid.max_depth(), 0)?, e.theta, &psi)?;
    let bump = bump_characteristic(&sigma, &w, &e, &EntropyPair::new(&e, 1.0)?, &strat, &psi)?;

    let probes = standard_probes(&grid, &w, e.p, 4, &mut ChaCha8Rng::seed_from_u64(7))?;
    let rep = two_weight_check(&sigma, &w, &e, &bump, &strat, &probes, 10.0)?;
    println!("{:>3} {:>6} {:>12} {:>12} {:>8}", "r", "cubes", "bump", "bound", "ratio");
    for row in &bump.strata {
        let ratio = rep.rows.iter().find(|t| t.r == row.r).map_or(0.0, |t| t.ratio);
        println!("{:>3} {:>6} {:>12.4e} {:>12.4e} {:>8.4}", row.r, row.cubes, row.characteristic, row.bound, ratio);
    }
    println!("global bump {:.4e}, composed ratio {:.4} (budget {:.2}), holds {}", bump.global, rep.composed_ratio, rep.composed_budget, rep.holds);
    Ok(())
}
