//! Rubio de Francia iteration: a majorant `G >= g` with comparable norm
//! whose product with `v` lands in a smaller weight class.
//!
//! ```bash
//! cargo run --example rubio_de_francia
//! ```

use schrodinger_weights::grid::{build_lattice, Grid};
use schrodinger_weights::operators::{rdf_iterate, RdfNormalization};
use schrodinger_weights::weights::Weight;
use schrodinger_weights::Result;

fn main() -> Result<()> {
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = build_lattice(&grid, grid.max_depth(), 0)?.to_collection()?;
    let g = grid.sample(|x| (-x[0] * x[0]).exp());

    for delta in [0.0, 0.3, -0.3] {
        let v = Weight::power(&grid, delta)?;
        let out = rdf_iterate(&g, &v, 1.0, 2.0, &cubes, 60, RdfNormalization::Rigorous)?;
        let r = &out.report;
        println!(
            "v = |x|^{delta}: terms {}, ||G|| / ||g|| = {:.4}, [Gv] / [v] = {:.4}, dominates {}, doubling {}",
            r.terms,
            r.majorant_norm / r.g_norm,
            r.characteristic_ratio,
            r.dominates,
            r.norm_doubling
        );
    }
    Ok(())
}
