//! BMO suite: the forward bound from `A_p^θ` to `BMO_{pθ}` on random
//! weights, and John–Nirenberg integrability of `log|x|`.

use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use super::generators::{random_potential, random_weight};
use super::{rng_for, CheckRecord, SuiteConfig};
use crate::bmo::{bmo_theta_norm, exp_log_forward, john_nirenberg_profile};
use crate::error::Result;
use crate::grid::{enumerate_cubes, Grid, Strategy};
use crate::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use crate::weights::ExponentSet;

pub const FORWARD_TRIALS: usize = 100;
/// Penalty exponents of the forward check.
pub const FORWARD_THETAS: [f64; 2] = [1.0, 2.0];

pub fn suite(cfg: &SuiteConfig, seed: u64) -> Result<Vec<CheckRecord>> {
    Ok(vec![forward_bound(cfg, seed)?, john_nirenberg()?])
}

/// `‖log w‖_{BMO_{pθ}} <= [w] max{[w], (p-1)[w]^{1/(p-1)}}` over random
/// weights, potentials, `p` from the config and `θ ∈ {1, 2}`.
pub fn forward_bound(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "bmo.forward-bound";
    let mut rng = rng_for(seed, id);
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let trials = cfg.trials(FORWARD_TRIALS);
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let mut violations = 0usize;
    for k in 0..trials {
        let v = random_potential(&mut rng);
        let (label, w) = random_weight(&grid, &mut rng)?;
        let p = cfg.p_values[rng.gen_range(0..cfg.p_values.len())];
        let theta = FORWARD_THETAS[rng.gen_range(0..FORWARD_THETAS.len())];
        let field = Arc::new(RadiusField::for_potential(v, &grid)?);
        let psi = PsiFunctional::new(field, theta, PsiMode::Centered)?;
        let r = exp_log_forward(&w, &ExponentSet::classical(1.0, p, theta)?, &psi, &cubes)?;
        if !r.holds {
            violations += 1;
        }
        let ratio = r.norm / r.bound;
        if ratio > worst {
            worst = ratio;
            witness = format!("trial {k}: {} {label} p={p} θ={theta}", v.label());
        }
    }
    Ok(CheckRecord::assertion(
        id,
        json!({"trials": trials, "cells": 64, "thetas": FORWARD_THETAS, "violations": violations}),
        Some(worst),
        violations == 0,
    )
    .with_witness(witness))
}

/// Exponential integrability average of `log|x|` on the domain, normalized
/// by its BMO norm; reported.
pub fn john_nirenberg() -> Result<CheckRecord> {
    let grid = Grid::new(1, 1.0, 1024)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: Some(8) })?;
    let field = Arc::new(RadiusField::for_potential(Potential::Zero, &grid)?);
    let psi = PsiFunctional::new(field, 0.0, PsiMode::Centered)?;
    let f = grid.sample(|x| x[0].abs().ln());
    let norm = bmo_theta_norm(&f, &psi, &cubes)?.value;
    let lambdas: Vec<f64> = (0..12).map(|k| 0.5 * k as f64).collect();
    let prof = john_nirenberg_profile(&f, &grid.domain(), &psi, norm, &lambdas)?;
    let mut record = CheckRecord::report(
        "bmo.john-nirenberg",
        json!({"function": "log|x|", "norm": norm, "decay_rate": prof.decay_rate, "gamma": prof.gamma}),
        prof.exponential_average,
    );
    record.pass &= prof.decay_rate.is_some_and(|r| r > 0.0);
    Ok(record)
}
