//! Empirical operator-norm lower bounds and exponent bookkeeping for the
//! sharp-constant theorems.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{maximal_restricted, restricted_frac_int};
use crate::error::{Error, Result};
use crate::grid::{build_lattice, CubeCollection, Grid, GridFunction};
use crate::numerics::conjugate;
use crate::weights::{ExponentSet, Weight};

/// An operator acting on grid functions.
pub trait GridOperator: Sync {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction>;
    fn label(&self) -> String;
}

pub struct Identity;

impl GridOperator for Identity {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        Ok(f.clone())
    }

    fn label(&self) -> String {
        "identity".into()
    }
}

/// `M^Q`.
pub struct RestrictedMaximal(pub CubeCollection);

impl GridOperator for RestrictedMaximal {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        Ok(maximal_restricted(f, &self.0)?.function)
    }

    fn label(&self) -> String {
        format!("maximal[{}]", self.0.tag())
    }
}

/// `I_α^Q`.
pub struct RestrictedFracInt {
    pub alpha: f64,
    pub cubes: CubeCollection,
}

impl GridOperator for RestrictedFracInt {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        restricted_frac_int(f, self.alpha, &self.cubes)
    }

    fn label(&self) -> String {
        format!("frac-int[α={}, {}]", self.alpha, self.cubes.tag())
    }
}

/// Any closure as an operator.
pub struct FnOperator<F> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&GridFunction) -> Result<GridFunction> + Sync> GridOperator for FnOperator<F> {
    fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        (self.f)(f)
    }

    fn label(&self) -> String {
        self.name.clone()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NormEstimate {
    pub operator: String,
    /// `max ‖T f‖_{L^q(w^q)} / ‖f‖_{L^p(w^p)}` over the probes.
    pub lower_bound: f64,
    pub argmax_probe: usize,
    pub evaluated: usize,
    pub skipped: usize,
}

/// Lower bound on `‖T : L^p(w^p) → L^q(w^q)‖`; probes of zero norm are skipped.
pub fn norm_estimate(
    op: &dyn GridOperator,
    p: f64,
    q: f64,
    w: &Weight,
    probes: &[GridFunction],
) -> Result<NormEstimate> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("probe set is empty".into()));
    }
    let (wp, wq) = (w.pow(p), w.pow(q));
    let ratios: Vec<Option<f64>> = probes
        .par_iter()
        .map(|f| {
            let den = wp.weighted_lp_norm(f, p);
            if den == 0.0 || !den.is_finite() {
                return Ok(None);
            }
            Ok(Some(wq.weighted_lp_norm(&op.apply(f)?, q) / den))
        })
        .collect::<Result<_>>()?;
    let mut est = NormEstimate {
        operator: op.label(),
        lower_bound: 0.0,
        argmax_probe: 0,
        evaluated: 0,
        skipped: 0,
    };
    for (k, r) in ratios.into_iter().enumerate() {
        match r {
            None => est.skipped += 1,
            Some(r) => {
                est.evaluated += 1;
                if r > est.lower_bound {
                    est.lower_bound = r;
                    est.argmax_probe = k;
                }
            }
        }
    }
    Ok(est)
}

/// Probes for norm estimates: cube indicators, the extremals
/// `w^{-p'} 1_Q` of the weight, Gaussian bumps and random signs.
pub fn standard_probes<R: Rng>(grid: &Grid, w: &Weight, p: f64, random: usize, rng: &mut R) -> Result<Vec<GridFunction>> {
    let depth = grid.max_depth().min(6);
    let lattice = build_lattice(grid, depth, 0)?.to_collection()?;
    let dual = w.pow(-conjugate(p)).to_function();
    let mut probes = Vec::new();
    for range in lattice.ranges() {
        let mut ind = vec![0.0; grid.len()];
        for i in range.indices() {
            ind[i] = 1.0;
        }
        let ind = GridFunction::new(*grid, ind)?;
        probes.push(ind.zip_with(&dual, |a, b| a * b));
        probes.push(ind);
    }
    let r = grid.half_extent();
    for _ in 0..random {
        let c: Vec<f64> = (0..grid.dim()).map(|_| rng.gen_range(-r..r)).collect();
        let width = r * rng.gen_range(0.01f64..0.5);
        probes.push(grid.sample(|x| {
            let d2: f64 = c.iter().enumerate().map(|(k, ck)| (x[k] - ck).powi(2)).sum();
            (-d2 / (width * width)).exp()
        }));
        let signs: Vec<f64> = (0..grid.len()).map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 }).collect();
        probes.push(GridFunction::new(*grid, signs)?);
    }
    Ok(probes)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentPrediction {
    /// `γ_base · max{1, (q0/p0') (p'/q)}`.
    pub extrapolated: f64,
    /// `θ / (1 + p'/q)`.
    pub gamma: f64,
    pub k_factor: f64,
    /// `(1 - α/n) max{1, p'/q}`.
    pub sharp_exponent: f64,
}

/// Exponent carried from a base pair `(p0, q0)` to `(p, q)`.
pub fn exponent_calculator(e: &ExponentSet, p0: f64, q0: f64, gamma_base: f64) -> Result<ExponentPrediction> {
    if !(p0 >= 1.0 && q0 >= p0 && q0.is_finite()) {
        return Err(Error::InvalidExponents(format!("need 1 <= p0 <= q0 < ∞ (p0={p0}, q0={q0})")));
    }
    let gap = (1.0 / e.p - 1.0 / e.q) - (1.0 / p0 - 1.0 / q0);
    if gap.abs() > 1e-12 {
        return Err(Error::InvalidExponents(format!(
            "1/p - 1/q = {} differs from 1/p0 - 1/q0 = {}",
            1.0 / e.p - 1.0 / e.q,
            1.0 / p0 - 1.0 / q0
        )));
    }
    let p0_prime = conjugate(p0);
    let ratio = if p0_prime.is_infinite() { 0.0 } else { q0 / p0_prime * e.p_prime() / e.q };
    Ok(ExponentPrediction {
        extrapolated: gamma_base * ratio.max(1.0),
        gamma: e.gamma(),
        k_factor: e.k_factor(),
        sharp_exponent: (1.0 - e.alpha / e.n) * e.sharp_exponent_factor(),
    })
}
