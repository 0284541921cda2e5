//! The heat semigroup of `-Δ + V` against the adapted maximal function, and
//! the Gaussian upper bound of its kernel.
//!
//! ```bash
//! cargo run --release --example heat_domination
//! ```

use std::sync::Arc;

use schrodinger_weights::grid::{enumerate_cubes, Grid, Strategy};
use schrodinger_weights::numerics::logspace;
use schrodinger_weights::operators::heat_domination_check;
use schrodinger_weights::potential::{Potential, RadiusField};
use schrodinger_weights::semigroup::{heat_kernel_bound_check, Boundary, DiscreteOperator, DEFAULT_GAUSSIAN_C};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let grid = Grid::new(1, 8.0, 256)?;
    let op = DiscreteOperator::new(&grid, Potential::Hermite, Boundary::Dirichlet)?;
    println!("lowest eigenvalues: {:?}", &op.eigenvalues()[..4]);

    let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid)?);
    let cubes = enumerate_cubes(&grid, Strategy::Combined { depth: None })?;
    let f = grid.sample(|x| (-(x[0] - 1.0).powi(2)).exp());
    let times = logspace(1e-4, 1e2, 25);
    for theta in [0.0, 1.0, 2.0, 4.0] {
        let rep = heat_domination_check(&op, &field, &f, theta, &times, &cubes)?;
        println!(
            "theta = {theta}: C = {:.4} at x = {:.3}, t = {:.3e}",
            rep.fitted_constant, rep.argmax.0, rep.argmax.1
        );
    }

    let kernel = heat_kernel_bound_check(&op, &field, &logspace(0.05, 10.0, 9), 2.0, DEFAULT_GAUSSIAN_C)?;
    println!(
        "\nGaussian bound with c = {}: fitted constant {:.4}, dominated by the free kernel: {}",
        DEFAULT_GAUSSIAN_C, kernel.fitted_constant, kernel.dominated_by_free
    );
    Ok(())
}
