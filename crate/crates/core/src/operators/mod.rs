//! Maximal operators, dyadic fractional integrals and the inequality checks
//! built on them.
//!
//! Every operator is a supremum or sum over a declared [`CubeCollection`].
//! Per-cube quantities are computed in parallel, then spread onto the cells
//! each cube covers.

pub mod fractional;
pub mod maximal;
pub mod norms;
pub mod rdf;

pub use fractional::*;
pub use maximal::*;
pub use norms::*;
pub use rdf::*;

use crate::error::{Error, Result};
use crate::grid::{CubeCollection, Grid, GridFunction};

/// A grid function together with the cells no cube reached.
#[derive(Debug, Clone)]
pub struct Covered {
    pub function: GridFunction,
    /// Cells contained in no cube of the collection; their value is 0.
    pub uncovered: usize,
}

/// Pointwise maximum of per-cube values over the cubes containing each cell.
pub(crate) fn spread_max(cubes: &CubeCollection, values: &[f64]) -> Covered {
    let grid = *cubes.grid();
    let mut out = vec![f64::NEG_INFINITY; grid.len()];
    for (range, v) in cubes.ranges().iter().zip(values) {
        for i in range.indices() {
            if *v > out[i] {
                out[i] = *v;
            }
        }
    }
    let uncovered = out.iter().filter(|v| **v == f64::NEG_INFINITY).count();
    for v in &mut out {
        if *v == f64::NEG_INFINITY {
            *v = 0.0;
        }
    }
    Covered {
        function: GridFunction::new(grid, out).expect("finite cube values"),
        uncovered,
    }
}

/// Pointwise sum of per-cube values over the cubes containing each cell.
pub(crate) fn spread_sum(cubes: &CubeCollection, values: &[f64]) -> GridFunction {
    let grid = *cubes.grid();
    let mut out = vec![0.0; grid.len()];
    for (range, v) in cubes.ranges().iter().zip(values) {
        for i in range.indices() {
            out[i] += v;
        }
    }
    GridFunction::new(grid, out).expect("finite cube values")
}

/// `|Q|` as cell count times `h^n`.
pub(crate) fn measure(grid: &Grid, count: usize) -> f64 {
    count as f64 * grid.cell_volume()
}

pub(crate) fn same_grid(a: &Grid, b: &Grid, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::InvalidArgument(format!("{what} live on different grids")));
    }
    Ok(())
}

pub(crate) fn require_nested(cubes: &CubeCollection) -> Result<()> {
    if !cubes.is_nested() {
        return Err(Error::Unsupported(format!(
            "collection `{}` is not nested; use a single dyadic lattice",
            cubes.tag()
        )));
    }
    Ok(())
}

/// Distribution-function supremum `sup_λ λ^e · μ({g > λ})`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LevelSup {
    pub value: f64,
    pub lambda: f64,
}

/// With `lambdas = None` the supremum is exact: it is approached as `λ`
/// increases to one of the values of `g`, where the level set is
/// `{g >= λ}`. With an explicit grid, `{g > λ}` is used at each `λ`.
pub fn level_set_sup(values: &[f64], masses: &[f64], exponent: f64, lambdas: Option<&[f64]>) -> LevelSup {
    let mut best = LevelSup { value: 0.0, lambda: 0.0 };
    match lambdas {
        Some(ls) => {
            for &l in ls {
                if !(l > 0.0) {
                    continue;
                }
                let m: f64 = values.iter().zip(masses).filter(|(v, _)| **v > l).map(|(_, m)| m).sum();
                let r = l.powf(exponent) * m;
                if r > best.value {
                    best = LevelSup { value: r, lambda: l };
                }
            }
        }
        None => {
            let mut order: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.0).collect();
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
            let mut cum = 0.0;
            let mut k = 0;
            while k < order.len() {
                let v = values[order[k]];
                while k < order.len() && values[order[k]] == v {
                    cum += masses[order[k]];
                    k += 1;
                }
                let r = v.powf(exponent) * cum;
                if r > best.value {
                    best = LevelSup { value: r, lambda: v };
                }
            }
        }
    }
    best
}
