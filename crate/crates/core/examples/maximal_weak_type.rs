//! The adapted maximal function and its weak-type bound.
//!
//! On a nested lattice the stopping cubes are disjoint, so the weak-type
//! ratio of `M^θ` never exceeds 1 for any weight.
//!
//! ```bash
//! cargo run --example maximal_weak_type
//! ```

use std::sync::Arc;

use schrodinger_weights::grid::{build_lattice, Grid};
use schrodinger_weights::operators::{maximal_adapted, maximal_restricted, weak_type_check};
use schrodinger_weights::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use schrodinger_weights::weights::{ExponentSet, Weight};
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = build_lattice(&grid, grid.max_depth(), 0)?.to_collection()?;
    let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid)?);
    let f = grid.sample(|x| if (x[0] - 1.0).abs() < 0.5 { 1.0 } else { 0.0 });

    println!("{:>8} {:>10} {:>10} {:>10}", "x", "f", "M f", "M^2 f");
    let theta = 2.0;
    let psi = PsiFunctional::new(field, theta, PsiMode::Centered)?;
    let e = ExponentSet::classical(1.0, 2.0, theta)?;
    let m = maximal_restricted(&f, &cubes)?.function;
    let mt = maximal_adapted(&f, &e, &psi, &cubes)?.function;
    for i in (0..grid.len()).step_by(8) {
        println!(
            "{:>8.3} {:>10.4} {:>10.4} {:>10.4}",
            grid.center(i)[0],
            f.samples()[i],
            m.samples()[i],
            mt.samples()[i]
        );
    }

    for (label, w) in [("|x|^0.5", Weight::power(&grid, 0.5)?), ("exp(x^2)", Weight::exponential(&grid, 1.0)?)] {
        let rep = weak_type_check(&f, &w, &e, &psi, &cubes, None)?;
        println!("{label}: weak-type ratio {:.4} (holds: {})", rep.ratio, rep.holds);
    }
    Ok(())
}
