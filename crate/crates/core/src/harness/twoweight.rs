//! Two-weight suite: bump-controlled bounds for the stratified fractional
//! integral, refinement stability, normalization of the entropy functions
//! and the change-of-measure identity.

use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use super::generators::{random_function, random_weight};
use super::{max_growth, rng_for, CheckRecord, SuiteConfig, STABILITY_TOLERANCE};
use crate::error::Result;
use crate::grid::{build_lattice, Grid, GridFunction};
use crate::numerics::conjugate;
use crate::operators::{standard_probes, stratify, RestrictedFracInt};
use crate::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use crate::twoweight::{
    bump_characteristic, change_of_measure_check, two_weight_check, EntropyFunction, EntropyPair, TwoWeightReport,
};
use crate::weights::{ExponentSet, Weight};

pub const TWO_WEIGHT_BUDGET: f64 = 10.0;
pub const TWO_WEIGHT_TRIALS: usize = 50;
pub const ENTROPY_DELTA: f64 = 1.0;
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;
/// The stratified sums converge like `h^α`, so stability is measured on
/// fine grids.
pub const STABILITY_P: f64 = 1.25;
pub const STABILITY_ALPHA: f64 = 0.6;
pub const STABILITY_CELLS: [usize; 3] = [256, 512, 1024];

pub fn suite(cfg: &SuiteConfig, seed: u64) -> Result<Vec<CheckRecord>> {
    Ok(vec![
        random_instances(cfg, seed)?,
        stability_record()?,
        entropy_normalization(cfg)?,
        change_of_measure(cfg, seed)?,
    ])
}

/// Bump table and ratio check for one pair on one lattice of the grid.
pub fn two_weight_instance(
    sigma: &Weight,
    w: &Weight,
    e: &ExponentSet,
    potential: Potential,
    probes: &[GridFunction],
) -> Result<TwoWeightReport> {
    let grid = *w.grid();
    let field = Arc::new(RadiusField::for_potential(potential, &grid)?);
    let psi = PsiFunctional::new(field, e.theta, PsiMode::Sup)?;
    let lattice = build_lattice(&grid, grid.max_depth(), 0)?;
    let strat = stratify(&lattice, e.theta, &psi)?;
    let eps = EntropyPair::new(e, ENTROPY_DELTA)?;
    let bump = bump_characteristic(sigma, w, e, &eps, &strat, &psi)?;
    two_weight_check(sigma, w, e, &bump, &strat, probes, TWO_WEIGHT_BUDGET)
}

/// Random pairs on `N = 32` under the Hermite stratification.
pub fn random_instances(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "twoweight.random-instances";
    let mut rng = rng_for(seed, id);
    let grid = Grid::new(1, 4.0, 32)?;
    let trials = cfg.trials(TWO_WEIGHT_TRIALS);
    let (mut worst, mut worst_composed, mut violations, mut witness) = (0.0f64, 0.0f64, 0usize, String::new());
    for k in 0..trials {
        let (ls, sigma) = random_weight(&grid, &mut rng)?;
        let (lw, w) = random_weight(&grid, &mut rng)?;
        let p = cfg.p_values[rng.gen_range(0..cfg.p_values.len())];
        let theta = cfg.theta_values[rng.gen_range(0..cfg.theta_values.len())];
        let e = ExponentSet::from_p(1.0, p, 1.0 / (2.0 * p), theta)?;
        let probes: Vec<GridFunction> = (0..8).map(|_| random_function(&grid, &mut rng)).collect();
        let rep = two_weight_instance(&sigma, &w, &e, Potential::Hermite, &probes)?;
        if !rep.holds {
            violations += 1;
        }
        worst_composed = worst_composed.max(rep.composed_ratio / rep.composed_budget);
        if rep.max_ratio > worst {
            worst = rep.max_ratio;
            witness = format!("trial {k}: σ={ls} w={lw} p={p} θ={theta}");
        }
    }
    Ok(CheckRecord::assertion(
        id,
        json!({"trials": trials, "cells": 32, "budget": TWO_WEIGHT_BUDGET, "violations": violations, "composed_over_budget": worst_composed}),
        Some(worst),
        violations == 0,
    )
    .with_witness(witness))
}

/// Largest ratio for a fixed power-weight pair at one resolution.
pub fn stability_constant(cells: usize) -> Result<f64> {
    let grid = Grid::new(1, 4.0, cells)?;
    let sigma = Weight::power(&grid, -0.2)?;
    let w = Weight::power(&grid, 0.3)?;
    let e = ExponentSet::from_p(1.0, STABILITY_P, STABILITY_ALPHA, 2.0)?;
    let mut unused = rng_for(0, "twoweight.stability");
    let probes = standard_probes(&grid, &w, e.p, 0, &mut unused)?;
    Ok(two_weight_instance(&sigma, &w, &e, Potential::Hermite, &probes)?.max_ratio)
}

pub fn stability_record() -> Result<CheckRecord> {
    let fits: Vec<f64> = STABILITY_CELLS.iter().map(|&n| stability_constant(n)).collect::<Result<_>>()?;
    let growth = max_growth(&fits);
    Ok(CheckRecord::assertion(
        "twoweight.refinement-stable",
        json!({"sigma": "power(-0.2)", "w": "power(0.3)", "p": STABILITY_P, "alpha": STABILITY_ALPHA, "cells": STABILITY_CELLS, "constants": fits, "max_growth": growth}),
        fits.last().copied(),
        fits.iter().all(|f| *f <= TWO_WEIGHT_BUDGET) && growth < STABILITY_TOLERANCE,
    ))
}

/// `∫_1^∞ dt / (t ε(t))^p = 1` for every `p` in the matrix, its conjugate,
/// and several `δ`.
pub fn entropy_normalization(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let deltas = [0.1, 0.5, 1.0, 2.0];
    let mut worst = 0.0f64;
    for &p in &cfg.p_values {
        for q in [p, conjugate(p)] {
            for d in deltas {
                worst = worst.max((EntropyFunction::new(q, d)?.normalization() - 1.0).abs());
            }
        }
    }
    Ok(CheckRecord::assertion(
        "twoweight.entropy-normalization",
        json!({"p_values": cfg.p_values, "deltas": deltas}),
        Some(worst),
        worst <= NORMALIZATION_TOLERANCE,
    ))
}

/// Both formulations of the weighted norm of `I_α` agree.
pub fn change_of_measure(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "twoweight.change-of-measure";
    let mut rng = rng_for(seed, id);
    let grid = Grid::new(1, 2.0, 32)?;
    let cubes = build_lattice(&grid, grid.max_depth(), 0)?.to_collection()?;
    let trials = cfg.trials(10);
    let mut worst = 0.0f64;
    let mut holds = true;
    for _ in 0..trials {
        let p = cfg.p_values[rng.gen_range(0..cfg.p_values.len())];
        let alpha = 1.0 / (2.0 * p);
        let op = RestrictedFracInt {
            alpha,
            cubes: cubes.clone(),
        };
        let (_, v) = random_weight(&grid, &mut rng)?;
        let (_, w) = random_weight(&grid, &mut rng)?;
        let probes: Vec<GridFunction> = (0..6).map(|_| super::generators::random_signed(&grid, &mut rng)).collect();
        let rep = change_of_measure_check(&op, &v, &w, p, 2.0 * p, &probes)?;
        worst = worst.max(rep.max_relative_gap);
        holds &= rep.holds;
    }
    Ok(CheckRecord::assertion(id, json!({"trials": trials}), Some(worst), holds))
}
