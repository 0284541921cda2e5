//! Negative powers of `-Δ + V` against stratified dyadic fractional
//! integrals.
//!
//! The spectral `L^{-α/2} f` is bounded pointwise by the sum over three
//! shifted lattices of the penalized dyadic operator.
//!
//! ```bash
//! cargo run --release --example fractional_domination
//! ```

use std::sync::Arc;

use schrodinger_weights::grid::{build_lattice, Grid};
use schrodinger_weights::operators::{domination_check, stratify};
use schrodinger_weights::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use schrodinger_weights::semigroup::{Boundary, DiscreteOperator};
use schrodinger_weights::weights::ExponentSet;
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let grid = Grid::new(1, 4.0, 256)?;
    let e = ExponentSet::from_p(1.0, 1.5, 0.5, 1.0)?;
    let lattices = (0..3).map(|s| build_lattice(&grid, grid.max_depth(), s)).collect::<Result<Vec<_>>>()?;

    for v in [Potential::Zero, Potential::Hermite, Potential::Constant { value: 4.0 }] {
        let op = DiscreteOperator::new(&grid, v, Boundary::Dirichlet)?;
        let field = Arc::new(RadiusField::for_potential(v, &grid)?);
        let f = grid.sample(|x| (-(x[0] - 1.0).powi(2)).exp());
        let rep = domination_check(&op, &field, &f, &e, &lattices)?;
        println!("{}: C = {:.4} at x = {:.3}", v.label(), rep.fitted_constant, rep.argmax);
    }

    let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid)?);
    let psi = PsiFunctional::new(field, e.theta, PsiMode::Sup)?;
    let strat = stratify(&lattices[0], e.theta, &psi)?;
    println!("\nstrata of the hermite lattice:");
    for (r, cubes) in strat.strata() {
        println!("  r = {r}: {} cubes", cubes.len());
    }
    Ok(())
}
