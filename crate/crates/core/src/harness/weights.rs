//! Weight-class suite: degeneration to the classical classes, the Hermite
//! exhibit separating the adapted class from the classical one, the
//! centered/sup ordering and duality.

use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use super::generators::{random_function, random_potential, random_weight};
use super::{rng_for, CheckRecord, SuiteConfig};
use crate::error::Result;
use crate::grid::{enumerate_cubes, Grid, Strategy};
use crate::numerics::conjugate;
use crate::operators::{maximal_adapted, maximal_restricted};
use crate::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use crate::weights::{ap_theta, restricted_ap, restricted_apq, tilde_comparison, ExponentSet, Weight};
use crate::bmo::exp_log_backward;

pub const DEGENERATION_TOLERANCE: f64 = 1e-9;
pub const MAXIMAL_AGREEMENT: f64 = 1e-12;
pub const EXHIBIT_CEILING: f64 = 10.0;
pub const EXHIBIT_CLASSICAL_FLOOR: f64 = 1e3;
pub const EXHIBIT_THETA: f64 = 4.0;

pub fn suite(cfg: &SuiteConfig, seed: u64) -> Result<Vec<CheckRecord>> {
    Ok(vec![
        classical_degeneration(cfg, seed)?,
        hermite_exhibit()?,
        tilde_ordering(cfg, seed)?,
        duality(cfg, seed)?,
    ])
}

/// With `V ≡ 0`: `ψ ≡ 1`, `[1] = 1` and `M^θ = M` on exhaustive collections.
pub fn classical_degeneration(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "weights.classical-degeneration";
    let mut rng = rng_for(seed, id);
    let (mut psi_dev, mut one_dev, mut max_dev) = (0.0f64, 0.0f64, 0.0f64);
    for n in [8usize, 16, 32] {
        let grid = Grid::new(1, 1.0, n)?;
        let cubes = enumerate_cubes(&grid, Strategy::ExhaustiveSmall)?;
        let field = Arc::new(RadiusField::for_potential(Potential::Zero, &grid)?);
        let one = Weight::constant(&grid, 1.0)?;
        for &theta in &cfg.theta_values {
            for mode in [PsiMode::Centered, PsiMode::Sup] {
                let psi = PsiFunctional::new(field.clone(), theta, mode)?;
                psi_dev = psi.values(&cubes)?.iter().map(|v| (v - 1.0).abs()).fold(psi_dev, f64::max);
                for &p in &cfg.p_values {
                    let e = ExponentSet::classical(1.0, p, theta)?;
                    one_dev = one_dev.max((ap_theta(&one, &e, &psi, &cubes)?.value - 1.0).abs());
                }
                let f = random_function(&grid, &mut rng);
                let e = ExponentSet::classical(1.0, 2.0, theta)?;
                let a = maximal_adapted(&f, &e, &psi, &cubes)?.function;
                let b = maximal_restricted(&f, &cubes)?.function;
                max_dev = a
                    .samples()
                    .iter()
                    .zip(b.samples())
                    .map(|(x, y)| (x - y).abs())
                    .fold(max_dev, f64::max);
            }
        }
    }
    let pass = psi_dev == 0.0 && one_dev <= DEGENERATION_TOLERANCE && max_dev <= MAXIMAL_AGREEMENT;
    Ok(CheckRecord::assertion(
        id,
        json!({"cells": [8, 16, 32], "psi_deviation": psi_dev, "unit_weight_deviation": one_dev, "maximal_deviation": max_dev}),
        Some(one_dev.max(max_dev)),
        pass,
    ))
}

/// Outcome of the `e^{η|x|²}` sweep for Hermite `V`.
#[derive(Debug, Clone)]
pub struct Exhibit {
    /// `(η, adapted bracket, classical bracket)` per tested `η`.
    pub sweep: Vec<(f64, f64, f64)>,
    /// An `η` with adapted bracket under the ceiling and classical bracket
    /// over the floor.
    pub witness: Option<f64>,
}

pub fn exhibit_sweep() -> Result<Exhibit> {
    let grid = Grid::new(1, 4.0, 256)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid)?);
    let psi = PsiFunctional::new(field, EXHIBIT_THETA, PsiMode::Centered)?;
    let e = ExponentSet::classical(1.0, 2.0, EXHIBIT_THETA)?;
    let f = grid.sample(|x| x[0] * x[0]);
    let etas: Vec<f64> = (1..=20).map(|k| 0.1 * k as f64).collect();
    let back = exp_log_backward(&f, &etas, &e, &psi, &cubes, EXHIBIT_CEILING)?;
    let mut sweep = Vec::new();
    let mut witness = None;
    for (eta, adapted) in back.sweep {
        let w = Weight::exponential(&grid, eta)?;
        let classical = restricted_ap(&w, 2.0, &cubes)?.value;
        if adapted <= EXHIBIT_CEILING && classical > EXHIBIT_CLASSICAL_FLOOR {
            witness = Some(witness.map_or(eta, |w: f64| w.max(eta)));
        }
        sweep.push((eta, adapted, classical));
    }
    Ok(Exhibit { sweep, witness })
}

pub fn hermite_exhibit() -> Result<CheckRecord> {
    let ex = exhibit_sweep()?;
    let at = ex.witness.and_then(|eta| ex.sweep.iter().find(|row| row.0 == eta).copied());
    let record = CheckRecord::assertion(
        "weights.hermite-exhibit",
        json!({
            "cells": 256, "half_extent": 4.0, "theta": EXHIBIT_THETA,
            "ceiling": EXHIBIT_CEILING, "classical_floor": EXHIBIT_CLASSICAL_FLOOR,
            "sweep": ex.sweep,
        }),
        at.map(|row| row.1),
        at.is_some(),
    );
    Ok(match at {
        Some((eta, _, classical)) => record.with_witness(format!("eta={eta} classical={classical:.6e}")),
        None => record,
    })
}

/// Centered penalty at `θ` never exceeds the sup-radius penalty at `θ`,
/// cube by cube.
pub fn tilde_ordering(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "weights.tilde-ordering";
    let mut rng = rng_for(seed, id);
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let trials = cfg.trials(30);
    let mut violations = Vec::new();
    let mut worst = 0.0f64;
    for k in 0..trials {
        let v = random_potential(&mut rng);
        let field = Arc::new(RadiusField::for_potential(v, &grid)?);
        let theta = cfg.theta_values[rng.gen_range(0..cfg.theta_values.len())];
        let p = cfg.p_values[rng.gen_range(0..cfg.p_values.len())];
        let (label, w) = random_weight(&grid, &mut rng)?;
        let psi = PsiFunctional::new(field, theta, PsiMode::Centered)?;
        let cmp = tilde_comparison(&w, &ExponentSet::classical(1.0, p, theta)?, &psi, &cubes)?;
        worst = worst.max(cmp.rhs / cmp.tilde_same_theta);
        if !cmp.ordering_holds {
            violations.push(format!("trial {k}: {} {label} p={p} θ={theta}", v.label()));
        }
    }
    let record = CheckRecord::assertion(
        id,
        json!({"trials": trials, "violations": violations.len()}),
        Some(worst),
        violations.is_empty(),
    );
    Ok(match violations.first() {
        Some(w) => record.with_witness(w.clone()),
        None => record,
    })
}

/// `[w^{-1}]_{A_{q',p'}} = [w]_{A_{p,q}}^{p'/q}` on random weights.
pub fn duality(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "weights.duality";
    let mut rng = rng_for(seed, id);
    let grid = Grid::new(1, 2.0, 32)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let trials = cfg.trials(20);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (_, w) = random_weight(&grid, &mut rng)?;
        let p = cfg.p_values[rng.gen_range(0..cfg.p_values.len())];
        let q = p * rng.gen_range(1.0..3.0);
        let (pp, qp) = (conjugate(p), conjugate(q));
        let a = restricted_apq(&w, p, q, &cubes)?.log_value;
        let b = restricted_apq(&w.pow(-1.0), qp, pp, &cubes)?.log_value;
        worst = worst.max((b - a * pp / q).abs());
    }
    Ok(CheckRecord::assertion(
        id,
        json!({"trials": trials}),
        Some(worst),
        worst <= 1e-9,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_suite_passes() {
        for c in suite(&SuiteConfig::default(), 3).unwrap() {
            assert!(c.pass, "{c}");
        }
    }

    #[test]
    fn exhibit_classical_bracket_grows_with_eta() {
        let ex = exhibit_sweep().unwrap();
        assert!(ex.sweep.windows(2).all(|w| w[1].2 >= w[0].2));
    }
}
