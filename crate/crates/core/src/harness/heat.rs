//! Heat-semigroup suite: pointwise domination of `e^{-tL} f` by `M^θ f`
//! and the Gaussian upper bound for the heat kernel.

use std::sync::Arc;

use serde_json::json;

use super::{max_growth, CheckRecord, SuiteConfig, STABILITY_TOLERANCE};
use crate::error::Result;
use crate::grid::{enumerate_cubes, Grid, Strategy};
use crate::numerics::logspace;
use crate::operators::heat_domination_check;
use crate::potential::{Potential, RadiusField};
use crate::semigroup::{heat_kernel_bound_check, Boundary, DiscreteOperator, KernelBoundReport, DEFAULT_GAUSSIAN_C};

pub const HEAT_THETAS: [f64; 3] = [1.0, 2.0, 4.0];
pub const HEAT_CELLS: [usize; 3] = [128, 256, 512];
pub const HEAT_HALF_EXTENT: f64 = 8.0;
pub const KERNEL_CELLS: [usize; 3] = [256, 512, 1024];
pub const KERNEL_DECAY: f64 = 2.0;
pub const KERNEL_BUDGET: f64 = 10.0;

/// `{0}` together with 25 log-spaced times in `[1e-4, 1e2]`.
pub fn heat_times() -> Vec<f64> {
    let mut t = vec![0.0];
    t.extend(logspace(1e-4, 1e2, 25));
    t
}

/// The two potentials of the domination check.
pub fn domination_potentials() -> [Potential; 2] {
    [Potential::Hermite, Potential::Constant { value: 1.0 }]
}

/// Fitted `C_θ` for each `θ` in [`HEAT_THETAS`], with a Gaussian bump
/// centered at `x = 1` and the combined collection.
pub fn domination_constants(potential: Potential, cells: usize) -> Result<Vec<f64>> {
    let grid = Grid::new(1, HEAT_HALF_EXTENT, cells)?;
    let op = DiscreteOperator::new(&grid, potential, Boundary::Dirichlet)?;
    let field = Arc::new(RadiusField::for_potential(potential, &grid)?);
    let cubes = enumerate_cubes(&grid, Strategy::Combined { depth: None })?;
    let f = grid.sample(|x| (-(x[0] - 1.0).powi(2)).exp());
    let times = heat_times();
    HEAT_THETAS
        .iter()
        .map(|&theta| Ok(heat_domination_check(&op, &field, &f, theta, &times, &cubes)?.fitted_constant))
        .collect()
}

/// `C_θ` table: `table[k][j]` is the constant at `HEAT_CELLS[k]` and
/// `HEAT_THETAS[j]`.
pub fn domination_table(potential: Potential) -> Result<Vec<Vec<f64>>> {
    HEAT_CELLS.iter().map(|&n| domination_constants(potential, n)).collect()
}

/// Finite and refinement-stable for every `θ`.
pub fn domination_stable_record(potential: Potential, table: &[Vec<f64>]) -> CheckRecord {
    let per_theta: Vec<Vec<f64>> = (0..HEAT_THETAS.len()).map(|j| table.iter().map(|row| row[j]).collect()).collect();
    let growth = per_theta.iter().map(|col| max_growth(col)).fold(0.0, f64::max);
    let finite = table.iter().flatten().all(|c| c.is_finite());
    let worst = table.iter().flatten().fold(0.0f64, |a, b| a.max(*b));
    CheckRecord::assertion(
        format!("heat.domination-stable[{}]", potential.label()),
        json!({"thetas": HEAT_THETAS, "cells": HEAT_CELLS, "constants": table, "max_growth": growth}),
        Some(worst),
        finite && growth < STABILITY_TOLERANCE,
    )
}

/// `C_θ` nonincreasing in `θ` at every resolution.
pub fn domination_monotone_record(potential: Potential, table: &[Vec<f64>]) -> CheckRecord {
    let mut witness = None;
    for (row, n) in table.iter().zip(HEAT_CELLS) {
        for j in 1..row.len() {
            if row[j] > row[j - 1] && witness.is_none() {
                witness = Some(format!(
                    "N={n}: C({})={:.6e} > C({})={:.6e}",
                    HEAT_THETAS[j],
                    row[j],
                    HEAT_THETAS[j - 1],
                    row[j - 1]
                ));
            }
        }
    }
    let worst = table
        .iter()
        .flat_map(|row| row.windows(2).map(|w| w[1] / w[0]))
        .fold(0.0f64, f64::max);
    let record = CheckRecord::assertion(
        format!("heat.domination-monotone[{}]", potential.label()),
        json!({"thetas": HEAT_THETAS, "cells": HEAT_CELLS, "constants": table}),
        Some(worst),
        witness.is_none(),
    );
    match witness {
        Some(w) => record.with_witness(w),
        None => record,
    }
}

/// Heat-kernel times: `t/h² >= 50` at the coarsest kernel grid, where the
/// lattice kernel has Gaussian tails.
pub fn kernel_times() -> Vec<f64> {
    logspace(0.05, 10.0, 9)
}

/// Gaussian-bound report for the Hermite heat kernel at one resolution.
pub fn kernel_report(cells: usize, gaussian_c: f64) -> Result<KernelBoundReport> {
    let grid = Grid::new(1, HEAT_HALF_EXTENT, cells)?;
    let op = DiscreteOperator::new(&grid, Potential::Hermite, Boundary::Dirichlet)?;
    let field = RadiusField::for_potential(Potential::Hermite, &grid)?;
    heat_kernel_bound_check(&op, &field, &kernel_times(), KERNEL_DECAY, gaussian_c)
}

pub fn kernel_constant(cells: usize, gaussian_c: f64) -> Result<f64> {
    Ok(kernel_report(cells, gaussian_c)?.fitted_constant)
}

/// Kernel bound with Gaussian constant `c` over [`KERNEL_CELLS`]: fitted
/// constants, and whether they stay under budget and stable.
pub fn kernel_bound(gaussian_c: f64) -> Result<(Vec<KernelBoundReport>, bool)> {
    let reps: Vec<KernelBoundReport> =
        KERNEL_CELLS.iter().map(|&n| kernel_report(n, gaussian_c)).collect::<Result<_>>()?;
    let fits: Vec<f64> = reps.iter().map(|r| r.fitted_constant).collect();
    let ok = fits.iter().all(|f| *f <= KERNEL_BUDGET) && max_growth(&fits) < STABILITY_TOLERANCE;
    Ok((reps, ok))
}

pub fn kernel_bound_record() -> Result<CheckRecord> {
    let (reps, ok) = kernel_bound(DEFAULT_GAUSSIAN_C)?;
    let fits: Vec<f64> = reps.iter().map(|r| r.fitted_constant).collect();
    let dominated = reps.iter().all(|r| r.dominated_by_free);
    let last = reps.last().expect("nonempty resolution list");
    let (t, x, y) = last.argmax;
    Ok(CheckRecord::assertion(
        "heat.kernel-bound",
        json!({
            "potential": "hermite", "gaussian_c": DEFAULT_GAUSSIAN_C, "decay": KERNEL_DECAY,
            "cells": KERNEL_CELLS, "times": kernel_times(), "constants": fits, "budget": KERNEL_BUDGET,
            "dominated_by_free": dominated,
        }),
        Some(last.fitted_constant),
        ok && dominated,
    )
    .with_witness(format!("t={t:.4e} x={x:.4} y={y:.4}")))
}

pub fn suite(_cfg: &SuiteConfig, _seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for v in domination_potentials() {
        let table = domination_table(v)?;
        out.push(domination_stable_record(v, &table));
        out.push(domination_monotone_record(v, &table));
    }
    out.push(kernel_bound_record()?);
    Ok(out)
}
