//! Restricted Rubio de Francia iteration: from `g >= 0` and `v ∈ A_r^Q`
//! build `G >= g` with comparable norm and `Gv ∈ A_{r0}^Q`.

use serde::{Deserialize, Serialize};

use super::{maximal_restricted, require_nested, same_grid};
use crate::error::{Error, Result};
use crate::grid::{CubeCollection, GridFunction};
use crate::numerics::conjugate;
use crate::weights::{restricted_ap, Weight};

/// How the operator norm `‖R‖` that divides each Neumann term is bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RdfNormalization {
    /// `(r (r')^{r-1} [v]_{A_r^Q})^t`: a proven bound for nested collections.
    #[default]
    Rigorous,
    /// `[v]_{A_r^Q}^t`, dropping the maximal-function constant.
    Characteristic,
}

pub const RDF_TERM_FLOOR: f64 = 1e-12;

/// Tail terms evaluated past the truncation to confirm the tail bound.
const TAIL_PROBE_TERMS: usize = 40;

#[derive(Debug, Clone, Serialize)]
pub struct RdfReport {
    pub t: f64,
    /// The Lebesgue exponent `(r/r0)'`.
    pub exponent: f64,
    pub normalization: RdfNormalization,
    /// `[v]_{A_r^Q}`.
    pub characteristic: f64,
    pub operator_bound: f64,
    pub terms: usize,
    pub converged: bool,
    pub g_norm: f64,
    pub majorant_norm: f64,
    /// `2^{-K+1} ‖g‖`.
    pub tail_bound: f64,
    /// Norm of the evaluated tail past the truncation.
    pub tail_norm: f64,
    /// (a) `g <= G`.
    pub dominates: bool,
    /// (b) `‖G‖ <= 2‖g‖`.
    pub norm_doubling: bool,
    /// `R G <= 2‖R‖ (G + next term)`.
    pub self_bound: bool,
    pub tail_honored: bool,
    /// (c) `[Gv]_{A_{r0}^Q}`.
    pub majorant_characteristic: f64,
    /// `[Gv]_{A_{r0}^Q} / [v]_{A_r^Q}`.
    pub characteristic_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct RdfOutcome {
    pub majorant: GridFunction,
    pub report: RdfReport,
}

/// `R h = (M^Q(h^{1/t} v) / v)^t`.
fn apply_r(h: &GridFunction, v: &Weight, t: f64, cubes: &CubeCollection) -> Result<GridFunction> {
    let hv = GridFunction::new(
        *h.grid(),
        h.samples()
            .iter()
            .zip(v.log_samples())
            .map(|(a, lv)| if *a == 0.0 { 0.0 } else { (a.ln() / t + lv).exp() })
            .collect(),
    )?;
    let m = maximal_restricted(&hv, cubes)?.function;
    GridFunction::new(
        *h.grid(),
        m.samples()
            .iter()
            .zip(v.log_samples())
            .map(|(a, lv)| if *a == 0.0 { 0.0 } else { (t * (a.ln() - lv)).exp() })
            .collect(),
    )
}

pub fn rdf_iterate(
    g: &GridFunction,
    v: &Weight,
    r0: f64,
    r: f64,
    cubes: &CubeCollection,
    k_terms: usize,
    normalization: RdfNormalization,
) -> Result<RdfOutcome> {
    if !(r0 >= 1.0 && r > r0 && r.is_finite()) {
        return Err(Error::InvalidExponents(format!("need 1 <= r0 < r (r0={r0}, r={r})")));
    }
    if k_terms == 0 {
        return Err(Error::InvalidArgument("at least one term is needed".into()));
    }
    if g.samples().iter().any(|x| *x < 0.0) {
        return Err(Error::InvalidArgument("g must be nonnegative".into()));
    }
    same_grid(g.grid(), cubes.grid(), "function and collection")?;
    same_grid(v.grid(), cubes.grid(), "weight and collection")?;
    if normalization == RdfNormalization::Rigorous {
        require_nested(cubes)?;
    }
    let t = (r - r0) / (r - 1.0);
    let exponent = r / (r - r0);
    let characteristic = restricted_ap(v, r, cubes)?.value;
    let constant = match normalization {
        RdfNormalization::Rigorous => r * conjugate(r).powf(r - 1.0),
        RdfNormalization::Characteristic => 1.0,
    };
    let operator_bound = (constant * characteristic).powf(t);
    let norm = |f: &GridFunction| v.weighted_lp_norm(f, exponent);
    let step = |h: &GridFunction| -> Result<GridFunction> {
        Ok(apply_r(h, v, t, cubes)?.map(|x| x / (2.0 * operator_bound)))
    };

    let mut majorant = g.clone();
    let mut term = g.clone();
    let mut terms = 1;
    let mut converged = term.max_abs() < RDF_TERM_FLOOR;
    while !converged && terms < k_terms {
        term = step(&term)?;
        majorant = majorant.zip_with(&term, |a, b| a + b);
        terms += 1;
        converged = term.max_abs() < RDF_TERM_FLOOR;
    }
    let next = step(&term)?;

    let g_norm = norm(g);
    let majorant_norm = norm(&majorant);
    let tail_bound = 2f64.powi(1 - terms as i32) * g_norm;
    let mut tail = next.clone();
    let mut piece = next.clone();
    for _ in 0..TAIL_PROBE_TERMS {
        if piece.max_abs() < RDF_TERM_FLOOR * 1e-6 {
            break;
        }
        piece = step(&piece)?;
        tail = tail.zip_with(&piece, |a, b| a + b);
    }
    let tail_norm = norm(&tail);

    let dominates = g.samples().iter().zip(majorant.samples()).all(|(a, b)| a <= b);
    let norm_doubling = majorant_norm <= 2.0 * g_norm * (1.0 + 1e-12);
    let rg = apply_r(&majorant, v, t, cubes)?;
    let self_bound = rg
        .samples()
        .iter()
        .zip(majorant.samples().iter().zip(next.samples()))
        .all(|(a, (m, n))| *a <= 2.0 * operator_bound * (m + n) * (1.0 + 1e-12) + 1e-300);
    let tail_honored = tail_norm <= tail_bound * (1.0 + 1e-12);

    let majorant_characteristic = if majorant.samples().iter().all(|x| *x > 0.0) {
        let gv = Weight::from_log(
            *g.grid(),
            majorant.samples().iter().zip(v.log_samples()).map(|(a, lv)| a.ln() + lv).collect(),
        )?;
        restricted_ap(&gv, r0, cubes)?.value
    } else {
        f64::INFINITY
    };
    Ok(RdfOutcome {
        majorant,
        report: RdfReport {
            t,
            exponent,
            normalization,
            characteristic,
            operator_bound,
            terms,
            converged,
            g_norm,
            majorant_norm,
            tail_bound,
            tail_norm,
            dominates,
            norm_doubling,
            self_bound,
            tail_honored,
            majorant_characteristic,
            characteristic_ratio: majorant_characteristic / characteristic,
        },
    })
}
