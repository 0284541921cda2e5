//! Penalized BMO norms, the passage between `A_p`-type weights and `log w`,
//! and John–Nirenberg level-set profiles.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Cube, CubeCollection, GridFunction};
use crate::numerics::fit_slope;
use crate::potential::PsiFunctional;
use crate::weights::{ap_theta, ExponentSet, Weight};

#[derive(Debug, Clone, Serialize)]
pub struct BmoReport {
    pub value: f64,
    pub argmax_cube: Cube,
    pub theta: f64,
    pub collection: String,
}

/// `sup_Q (ψ_θ(Q)|Q|)^{-1} ∫_Q |f - ⟨f⟩_Q|` over the collection.
pub fn bmo_theta_norm(f: &GridFunction, psi: &PsiFunctional, cubes: &CubeCollection) -> Result<BmoReport> {
    cubes.ensure_nonempty()?;
    if f.grid() != cubes.grid() {
        return Err(Error::InvalidArgument("function and collection live on different grids".into()));
    }
    let penalties = psi.values(cubes)?;
    let samples = f.samples();
    let per_cube: Vec<f64> = cubes
        .ranges()
        .par_iter()
        .zip(penalties.par_iter())
        .map(|(range, pen)| {
            let avg = f.average_range(range);
            let osc = range.indices().map(|i| (samples[i] - avg).abs()).sum::<f64>() / range.count() as f64;
            osc / pen
        })
        .collect();
    let (k, value) = per_cube
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, v)| (k, *v))
        .ok_or(Error::EmptyCollection)?;
    Ok(BmoReport {
        value,
        argmax_cube: cubes.cubes()[k],
        theta: psi.theta(),
        collection: cubes.tag().to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ForwardReport {
    /// `‖log w‖_{BMO_{pθ}}`.
    pub norm: f64,
    /// `[w]_{A_p^θ}`.
    pub characteristic: f64,
    /// `[w] · max{[w], (p-1)[w]^{1/(p-1)}}`.
    pub bound: f64,
    /// `[w] + [w]` for `p <= 2`, `[w] + (p-1)[w]^{1/(p-1)}` otherwise; the
    /// sum the cube-by-cube estimate actually produces.
    pub sum_bound: f64,
    pub holds: bool,
    pub sum_holds: bool,
}

/// Bounds the BMO norm of `log w` at exponent `pθ` by the `A_p^θ` bracket.
pub fn exp_log_forward(
    w: &Weight,
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
) -> Result<ForwardReport> {
    let c = ap_theta(w, e, psi, cubes)?.value;
    let log_w = GridFunction::new(*w.grid(), w.log_samples().to_vec())?;
    let norm = bmo_theta_norm(&log_w, &psi.with_theta(e.p * e.theta)?, cubes)?.value;
    let p = e.p;
    let second = (p - 1.0) * c.powf(1.0 / (p - 1.0));
    let bound = c * c.max(second);
    let sum_bound = c + if p <= 2.0 { c } else { second };
    Ok(ForwardReport {
        norm,
        characteristic: c,
        bound,
        sum_bound,
        holds: norm <= bound * (1.0 + 1e-12),
        sum_holds: norm <= sum_bound * (1.0 + 1e-12),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BackwardReport {
    /// `(η, [e^{ηf}]_{A_p^θ})` for every tested `η`.
    pub sweep: Vec<(f64, f64)>,
    pub ceiling: f64,
    /// Largest tested `η > 0` whose characteristic is below the ceiling.
    pub best_eta: Option<f64>,
}

/// Sweeps `η` and records the `A_p^θ` bracket of `e^{ηf}`.
pub fn exp_log_backward(
    f: &GridFunction,
    etas: &[f64],
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
    ceiling: f64,
) -> Result<BackwardReport> {
    let mut sweep = Vec::with_capacity(etas.len());
    for &eta in etas {
        let w = Weight::from_log(*f.grid(), f.samples().iter().map(|v| eta * v).collect())?;
        sweep.push((eta, ap_theta(&w, e, psi, cubes)?.value));
    }
    let best_eta = sweep
        .iter()
        .filter(|(eta, c)| *eta > 0.0 && *c <= ceiling)
        .map(|(eta, _)| *eta)
        .fold(None, |acc: Option<f64>, eta| Some(acc.map_or(eta, |a| a.max(eta))));
    Ok(BackwardReport { sweep, ceiling, best_eta })
}

#[derive(Debug, Clone, Serialize)]
pub struct JohnNirenbergProfile {
    /// `(λ, |{x ∈ Q : |f - ⟨f⟩_Q| > λ}| / |Q|)`.
    pub table: Vec<(f64, f64)>,
    /// `-d log(fraction)/dλ` over the nonzero part of the table.
    pub decay_rate: Option<f64>,
    pub gamma: f64,
    /// `avg_Q exp(γ |f - ⟨f⟩_Q| / (‖f‖ ψ_{θ'}(Q)))`.
    pub exponential_average: f64,
}

/// Level-set decay of `f - ⟨f⟩_Q` and the exponential integrability average
/// with `γ = 1/(2^{n+1} e)`. `psi` carries the exponent `θ'`; `norm` is the
/// BMO norm used to normalize.
pub fn john_nirenberg_profile(
    f: &GridFunction,
    cube: &Cube,
    psi: &PsiFunctional,
    norm: f64,
    lambdas: &[f64],
) -> Result<JohnNirenbergProfile> {
    if !(norm > 0.0) {
        return Err(Error::InvalidArgument(format!("BMO norm {norm} must be positive")));
    }
    let range = f.grid().cell_range(cube)?;
    let avg = f.average_range(&range);
    let dev: Vec<f64> = range.indices().map(|i| (f.samples()[i] - avg).abs()).collect();
    let count = dev.len() as f64;
    let table: Vec<(f64, f64)> = lambdas
        .iter()
        .map(|&l| (l, dev.iter().filter(|d| **d > l).count() as f64 / count))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = table
        .iter()
        .filter(|(_, frac)| *frac > 0.0)
        .map(|(l, frac)| (*l, frac.ln()))
        .unzip();
    let decay_rate = fit_slope(&xs, &ys).map(|s| -s);
    let gamma = 1.0 / (2f64.powi(f.grid().dim() as i32 + 1) * std::f64::consts::E);
    let pen = psi.value_with_range(cube, &range)?;
    let exponential_average = dev.iter().map(|d| (gamma * d / (norm * pen)).exp()).sum::<f64>() / count;
    Ok(JohnNirenbergProfile {
        table,
        decay_rate,
        gamma,
        exponential_average,
    })
}
