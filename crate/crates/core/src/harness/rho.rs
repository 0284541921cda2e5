//! Critical-radius suite: closed forms, residuals, Hermite asymptotics,
//! scaling and the reverse Hölder constant.

use rand::Rng;
use serde_json::json;

use super::{rng_for, CheckRecord, SuiteConfig};
use crate::error::Result;
use crate::grid::{enumerate_cubes, point, Grid, Strategy};
use crate::potential::{reverse_holder_check, CriticalRadius, Potential, PsiFunctional, PsiMode, RadiusField};
use std::sync::Arc;

pub const RHO_CLOSED_FORM_TOLERANCE: f64 = 1e-3;
pub const RESIDUAL_TOLERANCE: f64 = 1e-6;
pub const RESIDUAL_SAMPLES: usize = 50;
pub const HERMITE_BAND: f64 = 10.0;
/// Allowed relative change of the Hermite band ratio when sampling doubles.
pub const HERMITE_REFINEMENT_SLACK: f64 = 0.01;

pub fn suite(_cfg: &SuiteConfig, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut out = closed_forms(seed)?;
    out.extend(hermite_asymptotics()?);
    out.push(scaling()?);
    out.push(zero_potential_penalty()?);
    out.extend(reverse_holder()?);
    Ok(out)
}

/// `ρ(0) = 1` for `V ≡ 3/(4π)` in 3-D and `V ≡ 1/2` in 1-D, and
/// `|F(ρ(x)) - 1|` at random points.
pub fn closed_forms(seed: u64) -> Result<Vec<CheckRecord>> {
    let cases = [
        (3usize, Potential::Constant {
            value: 3.0 / (4.0 * std::f64::consts::PI),
        }),
        (1, Potential::Constant { value: 0.5 }),
    ];
    let mut out = Vec::new();
    for (dim, v) in cases {
        let id = format!("rho.closed-form[n={dim}]");
        let mut rng = rng_for(seed, &id);
        let radius = CriticalRadius::new(v, dim)?;
        let rho0 = radius.at(&point(&[0.0; 3][..dim]))?;
        let mut worst = 0.0f64;
        for _ in 0..RESIDUAL_SAMPLES {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect();
            worst = worst.max(radius.residual(&point(&x))?);
        }
        let pass = (rho0 - 1.0).abs() <= RHO_CLOSED_FORM_TOLERANCE && worst <= RESIDUAL_TOLERANCE;
        out.push(CheckRecord::assertion(
            id,
            json!({"potential": v.label(), "dim": dim, "rho_at_origin": rho0, "samples": RESIDUAL_SAMPLES}),
            Some(worst),
            pass,
        ));
    }
    Ok(out)
}

/// `max/min` of `ρ(x)(1 + |x|)` over `|x| <= 8`.
fn band_ratio(values: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (x, rho) in values {
        let v = rho * (1.0 + x.abs());
        lo = lo.min(v);
        hi = hi.max(v);
    }
    hi / lo
}

/// Band ratio per sampling density for `n = 1` (grid cells) and `n = 3`
/// (points along a ray; the Hermite radius is radial).
pub fn hermite_band(dim: usize, samples: usize) -> Result<f64> {
    if dim == 1 {
        let grid = Grid::new(1, 8.0, samples)?;
        let field = RadiusField::for_potential(Potential::Hermite, &grid)?;
        Ok(band_ratio((0..grid.len()).map(|i| (grid.center(i)[0], field.cells()[i]))))
    } else {
        let radius = CriticalRadius::new(Potential::Hermite, dim)?;
        let pts: Vec<(f64, f64)> = (0..=samples)
            .map(|k| {
                let s = 8.0 * k as f64 / samples as f64;
                let mut x = [0.0; 3];
                x[0] = s;
                radius.at(&x).map(|r| (s, r))
            })
            .collect::<Result<_>>()?;
        Ok(band_ratio(pts.into_iter()))
    }
}

pub fn hermite_asymptotics() -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    for (dim, coarse) in [(1usize, 256usize), (3, 64)] {
        let a = hermite_band(dim, coarse)?;
        let b = hermite_band(dim, 2 * coarse)?;
        let pass = a < HERMITE_BAND && b < HERMITE_BAND && b <= a * (1.0 + HERMITE_REFINEMENT_SLACK);
        out.push(CheckRecord::assertion(
            format!("rho.hermite-band[n={dim}]"),
            json!({"samples": [coarse, 2 * coarse], "ratios": [a, b], "band": HERMITE_BAND}),
            Some(b),
            pass,
        ));
    }
    Ok(out)
}

/// Doubling `c` in `V ≡ c` divides `ρ` by `√2` in 1-D.
pub fn scaling() -> Result<CheckRecord> {
    let a = CriticalRadius::new(Potential::Constant { value: 0.7 }, 1)?.at(&point(&[0.3]))?;
    let b = CriticalRadius::new(Potential::Constant { value: 1.4 }, 1)?.at(&point(&[0.3]))?;
    let err = (a / b - std::f64::consts::SQRT_2).abs();
    Ok(CheckRecord::assertion(
        "rho.constant-scaling",
        json!({"rho_c": a, "rho_2c": b}),
        Some(err),
        err <= 1e-6,
    ))
}

/// `V ≡ 0` gives `ψ ≡ 1` on every cube, in both modes.
pub fn zero_potential_penalty() -> Result<CheckRecord> {
    let grid = Grid::new(1, 4.0, 32)?;
    let field = Arc::new(RadiusField::for_potential(Potential::Zero, &grid)?);
    let cubes = enumerate_cubes(&grid, Strategy::Combined { depth: None })?;
    let mut worst = 0.0f64;
    for mode in [PsiMode::Centered, PsiMode::Sup] {
        let psi = PsiFunctional::new(field.clone(), 3.0, mode)?;
        for v in psi.values(&cubes)? {
            worst = worst.max((v - 1.0).abs());
        }
    }
    Ok(CheckRecord::assertion(
        "rho.zero-potential-penalty",
        json!({"cubes": cubes.len(), "theta": 3.0}),
        Some(worst),
        worst == 0.0,
    ))
}

/// Reverse Hölder constants: exactly 1 for constants, finite and stable for
/// Hermite (`σ = 2`, 1-D).
pub fn reverse_holder() -> Result<Vec<CheckRecord>> {
    let grid = Grid::new(1, 4.0, 64)?;
    let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
    let c = reverse_holder_check(&Potential::Constant { value: 2.0 }, 2.0, &cubes)?
        .constant
        .unwrap_or(f64::NAN);
    let constant = CheckRecord::assertion(
        "rho.reverse-holder-constant",
        json!({"sigma": 2.0}),
        Some(c),
        (c - 1.0).abs() <= 1e-12,
    );
    let mut fits = Vec::new();
    for n in [64usize, 128] {
        let grid = Grid::new(1, 4.0, n)?;
        let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None })?;
        fits.push(reverse_holder_check(&Potential::Hermite, 2.0, &cubes)?.constant.unwrap_or(f64::INFINITY));
    }
    let growth = super::max_growth(&fits);
    let hermite = CheckRecord::assertion(
        "rho.reverse-holder-hermite",
        json!({"sigma": 2.0, "cells": [64, 128], "constants": fits}),
        Some(fits[1]),
        fits.iter().all(|f| f.is_finite()) && growth < super::STABILITY_TOLERANCE,
    );
    Ok(vec![constant, hermite])
}
