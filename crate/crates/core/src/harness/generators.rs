//! Random potentials, weights and test functions for the suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::grid::{Grid, GridFunction};
use crate::potential::Potential;
use crate::weights::Weight;

/// Zero, a constant in `[0.25, 4]`, or Hermite, with equal odds.
pub fn random_potential<R: Rng>(rng: &mut R) -> Potential {
    match rng.gen_range(0..3) {
        0 => Potential::Zero,
        1 => Potential::Constant {
            value: rng.gen_range(0.25..4.0),
        },
        _ => Potential::Hermite,
    }
}

/// A weight from one of the families constant, two-valued, `|x|^δ`,
/// `e^{±η|x|²}` and log-uniform noise, with its family label.
pub fn random_weight<R: Rng>(grid: &Grid, rng: &mut R) -> Result<(String, Weight)> {
    let n = grid.dim() as f64;
    let r2 = grid.half_extent().powi(2);
    Ok(match rng.gen_range(0..5) {
        0 => {
            let c = rng.gen_range(0.1..10.0);
            (format!("constant({c:.4})"), Weight::constant(grid, c)?)
        }
        1 => {
            let a = rng.gen_range(1.0..8.0);
            (format!("two-valued({a:.4})"), Weight::two_valued(grid, a)?)
        }
        2 => {
            let d = rng.gen_range(-0.4 * n..0.8 * n);
            (format!("power({d:.4})"), Weight::power(grid, d)?)
        }
        3 => {
            let eta = rng.gen_range(-1.0..1.0) * 2.0 / r2;
            (format!("exponential({eta:.4})"), Weight::exponential(grid, eta)?)
        }
        _ => {
            let s = rng.gen_range(0.1..2.0);
            (format!("log-uniform({s:.4})"), Weight::log_uniform(grid, s, rng)?)
        }
    })
}

/// A nonnegative function: uniform noise, a few spikes, or a Gaussian bump.
pub fn random_function<R: Rng>(grid: &Grid, rng: &mut R) -> GridFunction {
    match rng.gen_range(0..3) {
        0 => {
            let v = (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            GridFunction::new(*grid, v).expect("finite samples")
        }
        1 => {
            let mut v = vec![0.0; grid.len()];
            let mut cells: Vec<usize> = (0..grid.len()).collect();
            cells.shuffle(rng);
            for i in cells.iter().take(rng.gen_range(1..=4)) {
                v[*i] = rng.gen_range(0.5..5.0);
            }
            GridFunction::new(*grid, v).expect("finite samples")
        }
        _ => gaussian_bump(grid, rng),
    }
}

/// A Gaussian bump with random center and width.
pub fn gaussian_bump<R: Rng>(grid: &Grid, rng: &mut R) -> GridFunction {
    let r = grid.half_extent();
    let c: Vec<f64> = (0..grid.dim()).map(|_| rng.gen_range(-0.8 * r..0.8 * r)).collect();
    let width = r * rng.gen_range(0.05..0.5);
    grid.sample(|x| {
        let d2: f64 = c.iter().enumerate().map(|(k, ck)| (x[k] - ck).powi(2)).sum();
        (-d2 / (width * width)).exp()
    })
}

/// Uniform samples in `[-1, 1]`.
pub fn random_signed<R: Rng>(grid: &Grid, rng: &mut R) -> GridFunction {
    let v = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    GridFunction::new(*grid, v).expect("finite samples")
}
