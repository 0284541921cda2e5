//! Maximal-function suite: weak type with constant 1 on a nested lattice,
//! majorization of the fractional sup-radius operator, and monotonicity of
//! `M^θ` in `θ`.

use std::sync::Arc;

use rand::Rng;
use serde_json::json;

use super::generators::{random_function, random_potential, random_signed, random_weight};
use super::{rng_for, CheckRecord, SuiteConfig};
use crate::error::Result;
use crate::grid::{build_lattice, enumerate_cubes, Grid, Strategy};
use crate::operators::{majorization_check, maximal_adapted, weak_type_check};
use crate::potential::{PsiFunctional, PsiMode, RadiusField};
use crate::weights::ExponentSet;

pub const WEAK_TYPE_TRIALS: usize = 200;
pub const MAJORIZATION_TRIALS: usize = 30;

pub fn suite(cfg: &SuiteConfig, seed: u64) -> Result<Vec<CheckRecord>> {
    Ok(vec![
        weak_type(cfg, seed)?,
        majorization(cfg, seed)?,
        theta_monotonicity(cfg, seed)?,
    ])
}

/// `sup_λ λ^p w({M^θ f > λ}) <= [w]_{A_p^θ} ‖f‖^p_{L^p(w)}` on one dyadic
/// lattice, with the exact supremum over levels.
pub fn weak_type(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "maximal.weak-type";
    let mut rng = rng_for(seed, id);
    let trials = cfg.trials(WEAK_TYPE_TRIALS);
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let mut violations = 0usize;
    for k in 0..trials {
        let n = [32usize, 64, 128][rng.gen_range(0..3)];
        let grid = Grid::new(1, rng.gen_range(1.0..6.0), n)?;
        let cubes = build_lattice(&grid, grid.max_depth(), 0)?.to_collection()?;
        let v = random_potential(&mut rng);
        let (label, w) = random_weight(&grid, &mut rng)?;
        let f = random_function(&grid, &mut rng);
        let p = cfg.p_values[rng.gen_range(0..cfg.p_values.len())];
        let theta = cfg.theta_values[rng.gen_range(0..cfg.theta_values.len())];
        let field = Arc::new(RadiusField::for_potential(v, &grid)?);
        let psi = PsiFunctional::new(field, theta, PsiMode::Centered)?;
        let r = weak_type_check(&f, &w, &ExponentSet::classical(1.0, p, theta)?, &psi, &cubes, None)?;
        if !r.holds {
            violations += 1;
        }
        if r.ratio > worst {
            worst = r.ratio;
            witness = format!("trial {k}: N={n} {} {label} p={p} θ={theta} λ={:.6e}", v.label(), r.lambda);
        }
    }
    Ok(CheckRecord::assertion(
        id,
        json!({"trials": trials, "violations": violations, "collection": "dyadic lattice, shift 0"}),
        Some(worst),
        violations == 0,
    )
    .with_witness(witness))
}

/// Pointwise majorization of `M̃^{θ,α} f` by the two-weight composition.
pub fn majorization(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "maximal.majorization";
    let mut rng = rng_for(seed, id);
    let grid = Grid::new(1, 2.0, 32)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let trials = cfg.trials(MAJORIZATION_TRIALS);
    let mut worst = 0.0f64;
    let mut witness = String::new();
    let mut violations = 0usize;
    for k in 0..trials {
        let v = random_potential(&mut rng);
        let (label, w) = random_weight(&grid, &mut rng)?;
        let f = random_signed(&grid, &mut rng);
        let p = cfg.p_values[rng.gen_range(0..cfg.p_values.len())];
        let theta = cfg.theta_values[rng.gen_range(0..cfg.theta_values.len())];
        let alpha = rng.gen_range(0.0..0.5 / p);
        let e = ExponentSet::from_p(1.0, p, alpha, theta)?;
        let field = Arc::new(RadiusField::for_potential(v, &grid)?);
        let psi = PsiFunctional::new(field, theta, PsiMode::Sup)?;
        let r = majorization_check(&f, &w, &e, &psi, &cubes)?;
        if !r.holds {
            violations += 1;
        }
        let ratio = r.cube_ratio.max(r.pointwise_ratio);
        if ratio > worst {
            worst = ratio;
            witness = format!("trial {k}: {} {label} p={p} α={alpha:.4} θ={theta}", v.label());
        }
    }
    Ok(CheckRecord::assertion(
        id,
        json!({"trials": trials, "violations": violations}),
        Some(worst),
        violations == 0,
    )
    .with_witness(witness))
}

/// `M^{θ'} f <= M^θ f` pointwise whenever `θ <= θ'`.
pub fn theta_monotonicity(cfg: &SuiteConfig, seed: u64) -> Result<CheckRecord> {
    let id = "maximal.theta-monotonicity";
    let mut rng = rng_for(seed, id);
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = enumerate_cubes(&grid, Strategy::Combined { depth: None })?;
    let mut thetas = cfg.theta_values.clone();
    thetas.sort_by(f64::total_cmp);
    let trials = cfg.trials(10);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let field = Arc::new(RadiusField::for_potential(random_potential(&mut rng), &grid)?);
        let f = random_function(&grid, &mut rng);
        let mut prev: Option<Vec<f64>> = None;
        for &theta in &thetas {
            let psi = PsiFunctional::new(field.clone(), theta, PsiMode::Centered)?;
            let m = maximal_adapted(&f, &ExponentSet::classical(1.0, 2.0, theta)?, &psi, &cubes)?.function;
            if let Some(prev) = &prev {
                for (a, b) in m.samples().iter().zip(prev) {
                    if *b > 0.0 {
                        worst = worst.max(a / b);
                    }
                }
            }
            prev = Some(m.into_samples());
        }
    }
    Ok(CheckRecord::assertion(
        id,
        json!({"trials": trials, "thetas": thetas}),
        Some(worst),
        worst <= 1.0 + 1e-12,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximal_suite_passes() {
        let cfg = SuiteConfig {
            trial_scale: 0.25,
            ..SuiteConfig::default()
        };
        for c in suite(&cfg, 9).unwrap() {
            assert!(c.pass, "{c}");
        }
    }
}
