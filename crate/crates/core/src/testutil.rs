use rand::Rng;

use crate::grid::{Grid, GridFunction};

/// Independent uniform samples on `[lo, hi)`.
pub fn uniform<R: Rng>(grid: &Grid, lo: f64, hi: f64, rng: &mut R) -> GridFunction {
    GridFunction::new(*grid, (0..grid.len()).map(|_| rng.gen_range(lo..hi)).collect()).unwrap()
}
