//! Planted bugs the harness must catch: a Gaussian constant too small for
//! the heat kernel, and a maximal function whose penalty exponent is one
//! less than the one in the weight characteristic.

use std::sync::Arc;

use serde_json::json;

use super::heat::{kernel_bound, KERNEL_BUDGET, KERNEL_CELLS};
use super::{CheckRecord, SuiteConfig};
use crate::error::Result;
use crate::grid::{build_lattice, Grid, GridFunction};
use crate::operators::{level_set_sup, maximal_adapted, weak_type_check, WEAK_TYPE_TOLERANCE};
use crate::potential::{Potential, PsiFunctional, PsiMode, RadiusField};
use crate::weights::{ap_theta, ExponentSet, Weight};

pub const WRONG_GAUSSIAN_C: f64 = 1.0;
/// Strong constant potential: `ρ` is comparable to the cell width, so every
/// cube carries a visible penalty.
pub const CONTROL_POTENTIAL: Potential = Potential::Constant { value: 100.0 };

pub fn suite(cfg: &SuiteConfig, _seed: u64) -> Result<Vec<CheckRecord>> {
    Ok(vec![wrong_gaussian()?, off_by_one_penalty(cfg)?])
}

/// The kernel bound with `c = 1` must blow the budget or drift under
/// refinement.
pub fn wrong_gaussian() -> Result<CheckRecord> {
    let (reps, ok) = kernel_bound(WRONG_GAUSSIAN_C)?;
    let fits: Vec<f64> = reps.iter().map(|r| r.fitted_constant).collect();
    Ok(CheckRecord::control(
        "control.wrong-gaussian-constant",
        json!({"gaussian_c": WRONG_GAUSSIAN_C, "cells": KERNEL_CELLS, "constants": fits, "budget": KERNEL_BUDGET}),
        fits.iter().copied().reduce(f64::max),
        !ok,
    ))
}

/// Weak-type ratio with `M` built at exponent `θ - 1` while `[w]` uses `θ`.
/// With `f ≡ w ≡ 1` the correct ratio is exactly 1 and the planted one is
/// `(1 + h/ρ)^p`.
pub fn planted_weak_ratio(p: f64, theta: f64) -> Result<(f64, f64)> {
    let grid = Grid::new(1, 2.0, 64)?;
    let cubes = build_lattice(&grid, grid.max_depth(), 0)?.to_collection()?;
    let field = Arc::new(RadiusField::for_potential(CONTROL_POTENTIAL, &grid)?);
    let psi = PsiFunctional::new(field, theta, PsiMode::Centered)?;
    let e = ExponentSet::classical(1.0, p, theta)?;
    let f = GridFunction::constant(grid, 1.0);
    let w = Weight::constant(&grid, 1.0)?;
    let correct = weak_type_check(&f, &w, &e, &psi, &cubes, None)?.ratio;

    let lowered = theta - 1.0;
    let m = maximal_adapted(&f, &e.with_theta(lowered), &psi.with_theta(lowered)?, &cubes)?.function;
    let characteristic = ap_theta(&w, &e, &psi, &cubes)?.value;
    let masses = vec![grid.cell_volume(); grid.len()];
    let sup = level_set_sup(m.samples(), &masses, p, None);
    let planted = sup.value / (characteristic * w.weighted_lp_power(&f, p));
    Ok((correct, planted))
}

pub fn off_by_one_penalty(cfg: &SuiteConfig) -> Result<CheckRecord> {
    let mut rows = Vec::new();
    let mut detected = false;
    let mut worst = 0.0f64;
    for &p in &cfg.p_values {
        for &theta in cfg.theta_values.iter().filter(|t| **t >= 1.0) {
            let (correct, planted) = planted_weak_ratio(p, theta)?;
            detected |= planted > 1.0 + WEAK_TYPE_TOLERANCE;
            worst = worst.max(planted);
            rows.push(json!({"p": p, "theta": theta, "correct": correct, "planted": planted}));
        }
    }
    Ok(CheckRecord::control(
        "control.penalty-exponent-off-by-one",
        json!({"potential": CONTROL_POTENTIAL.label(), "rows": rows}),
        Some(worst),
        detected,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_ratio_matches_closed_form() {
        let (correct, planted) = planted_weak_ratio(2.0, 2.0).unwrap();
        let h = 4.0 / 64.0;
        let rho = 1.0 / (2.0 * 100.0f64).sqrt();
        assert!((correct - 1.0).abs() < 1e-9, "{correct}");
        assert!((planted - (1.0 + h / rho).powi(2)).abs() < 1e-6 * planted, "{planted}");
    }

    #[test]
    fn both_controls_are_detected() {
        for c in suite(&SuiteConfig::default(), 0).unwrap() {
            assert!(c.pass, "{c}");
        }
    }
}
