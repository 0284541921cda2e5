//! Dyadic fractional integrals damped by the sup-radius penalty, their
//! stratification by penalty size, and the checks that tie them to
//! `L^{-α/2}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{level_set_sup, measure, require_nested, same_grid, spread_sum, LevelSup};
use crate::error::{Error, Result};
use crate::grid::{CubeCollection, DyadicLattice, GridFunction};
use crate::numerics::conjugate;
use crate::potential::{PsiFunctional, PsiMode, RadiusField};
use crate::semigroup::DiscreteOperator;
use crate::weights::{apq_alpha_theta, restricted_a1q, restricted_apq, ExponentSet, Weight};

fn check_alpha_open(alpha: f64, dim: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::InvalidExponents(format!("α = {alpha} must lie in (0, {dim})")));
    }
    Ok(())
}

/// `|Q|^{α/n} ⟨f⟩_Q` for every cube.
pub(crate) fn frac_terms(f: &GridFunction, alpha: f64, cubes: &CubeCollection) -> Vec<f64> {
    let grid = *cubes.grid();
    let s = alpha / grid.dim() as f64;
    cubes
        .ranges()
        .par_iter()
        .map(|range| measure(&grid, range.count()).powf(s) * f.average_range(range))
        .collect()
}

/// `I_α^Q f = Σ_{Q} |Q|^{α/n} ⟨f⟩_Q 1_Q` for any `α > 0` (the sum is
/// finite); zero for an empty collection.
pub fn restricted_frac_int(f: &GridFunction, alpha: f64, cubes: &CubeCollection) -> Result<GridFunction> {
    same_grid(f.grid(), cubes.grid(), "function and collection")?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidExponents(format!("α = {alpha} must be positive")));
    }
    Ok(spread_sum(cubes, &frac_terms(f, alpha, cubes)))
}

/// `I^D_{α,θ} f = Σ_{Q ∈ D} ℓ(Q)^α / ψ̃_θ(Q) · ⟨f⟩_Q 1_Q`. The penalty is
/// taken from `psi` as given; pass a sup-mode functional.
pub fn dyadic_frac_int(
    f: &GridFunction,
    e: &ExponentSet,
    psi: &PsiFunctional,
    lattice: &DyadicLattice,
) -> Result<GridFunction> {
    let cubes = lattice.to_collection()?;
    same_grid(f.grid(), cubes.grid(), "function and lattice")?;
    check_alpha_open(e.alpha, f.grid().dim())?;
    let psi = psi.with_theta(e.theta)?;
    let terms = frac_terms(f, e.alpha, &cubes);
    let penalties = psi.values(&cubes)?;
    let damped: Vec<f64> = terms.iter().zip(&penalties).map(|(t, p)| t / p).collect();
    Ok(spread_sum(&cubes, &damped))
}

/// Cubes of a lattice binned by penalty: stratum `r` holds the cubes with
/// `ψ̃_θ(Q) ∈ [2^{rθ}, 2^{(r+1)θ})`.
#[derive(Debug, Clone)]
pub struct Stratification {
    theta: f64,
    source: CubeCollection,
    penalties: Vec<f64>,
    index: Vec<u32>,
    strata: BTreeMap<u32, CubeCollection>,
}

impl Stratification {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The lattice's cubes in their original order.
    pub fn source(&self) -> &CubeCollection {
        &self.source
    }

    /// `ψ̃_θ` of each source cube.
    pub fn penalties(&self) -> &[f64] {
        &self.penalties
    }

    /// Stratum index of each source cube.
    pub fn index(&self) -> &[u32] {
        &self.index
    }

    /// Nonempty strata by index.
    pub fn strata(&self) -> &BTreeMap<u32, CubeCollection> {
        &self.strata
    }

    pub fn stratum(&self, r: u32) -> Option<&CubeCollection> {
        self.strata.get(&r)
    }

    /// Strata are pairwise disjoint and together give back the source.
    pub fn is_partition(&self) -> bool {
        let grid = self.source.grid();
        let mut all: Vec<_> = self.strata.values().flat_map(|c| c.cubes().iter().copied()).collect();
        if all.len() != self.source.len() {
            return false;
        }
        let Ok(merged) = CubeCollection::new(grid, std::mem::take(&mut all), "merged") else {
            return false;
        };
        let key = |c: &crate::grid::Cube| (c.center.map(f64::to_bits), c.side.to_bits());
        let mut a: Vec<_> = merged.cubes().iter().map(key).collect();
        let mut b: Vec<_> = self.source.cubes().iter().map(key).collect();
        a.sort_unstable();
        b.sort_unstable();
        a == b
    }
}

/// Stratum index `r >= 0` with `2^{rθ} <= ψ < 2^{(r+1)θ}`.
pub fn stratum_index(psi: f64, theta: f64) -> u32 {
    let mut r = (psi.log2() / theta).floor().max(0.0) as u32;
    while 2f64.powf((r + 1) as f64 * theta) <= psi {
        r += 1;
    }
    while r > 0 && 2f64.powf(r as f64 * theta) > psi {
        r -= 1;
    }
    r
}

pub fn stratify(lattice: &DyadicLattice, theta: f64, psi: &PsiFunctional) -> Result<Stratification> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidArgument(format!("stratification needs θ > 0, got {theta}")));
    }
    let source = lattice.to_collection()?;
    let psi = psi.with_theta(theta)?;
    let penalties = psi.values(&source)?;
    let index: Vec<u32> = penalties.iter().map(|p| stratum_index(*p, theta)).collect();
    let mut strata = BTreeMap::new();
    let mut levels: Vec<u32> = index.clone();
    levels.sort_unstable();
    levels.dedup();
    for r in levels {
        let members: Vec<_> = source.cubes().iter().zip(&index).filter(|(_, i)| **i == r).map(|(c, _)| *c).collect();
        let members = CubeCollection::new(source.grid(), members, format!("{} stratum={r}", source.tag()))?;
        strata.insert(r, members);
    }
    Ok(Stratification {
        theta,
        source,
        penalties,
        index,
        strata,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    /// `max |Σ_r Σ_{Q ∈ Q_r} term - I^D f| / max |I^D f|`.
    pub exact_sum_error: f64,
    /// `max |I^D f - S| / ((2^θ - 1) S)` with `S = Σ_r 2^{-rθ} I_α^{Q_r} f`.
    pub bin_width_ratio: f64,
    pub strata: usize,
    pub holds: bool,
}

/// Checks the stratified sum against the full damped sum for `f >= 0`.
pub fn reconstruction_check(
    f: &GridFunction,
    e: &ExponentSet,
    psi: &PsiFunctional,
    lattice: &DyadicLattice,
    strat: &Stratification,
) -> Result<ReconstructionReport> {
    if f.samples().iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("reconstruction needs f >= 0".into()));
    }
    if (strat.theta - e.theta).abs() > 1e-12 {
        return Err(Error::InvalidArgument("stratification built for a different θ".into()));
    }
    let full = dyadic_frac_int(f, e, psi, lattice)?;
    let mut exact = vec![0.0; full.samples().len()];
    let mut approx = vec![0.0; full.samples().len()];
    let psi = psi.with_theta(e.theta)?;
    for (r, cubes) in strat.strata() {
        let terms = frac_terms(f, e.alpha, cubes);
        let penalties = psi.values(cubes)?;
        let damped: Vec<f64> = terms.iter().zip(&penalties).map(|(t, p)| t / p).collect();
        for (x, v) in exact.iter_mut().zip(spread_sum(cubes, &damped).samples()) {
            *x += v;
        }
        let scale = 2f64.powf(-(*r as f64) * e.theta);
        for (x, v) in approx.iter_mut().zip(spread_sum(cubes, &terms).samples()) {
            *x += scale * v;
        }
    }
    let top = full.max_abs().max(f64::MIN_POSITIVE);
    let exact_sum_error = exact.iter().zip(full.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / top;
    let width = 2f64.powf(e.theta) - 1.0;
    let bin_width_ratio = approx
        .iter()
        .zip(full.samples())
        .map(|(s, i)| if *s == 0.0 { 0.0 } else { (i - s).abs() / (width * s) })
        .fold(0.0, f64::max);
    Ok(ReconstructionReport {
        exact_sum_error,
        bin_width_ratio,
        strata: strat.strata().len(),
        holds: exact_sum_error <= 1e-12 && bin_width_ratio <= 1.0 + 1e-12,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DominationReport {
    /// `sup_x |L^{-α/2} f(x)| / Σ_lattices I^D_{α,θ} f(x)`.
    pub fitted_constant: f64,
    pub argmax: f64,
    pub finite: bool,
    pub lattices: usize,
}

/// Fits the constant in `|L^{-α/2} f| <= C Σ_D I^D_{α,θ} f` for `f >= 0`,
/// with the spectral `L^{-α/2}` and sup-radius penalties from `field`.
pub fn domination_check(
    op: &DiscreteOperator,
    field: &Arc<RadiusField>,
    f: &GridFunction,
    e: &ExponentSet,
    lattices: &[DyadicLattice],
) -> Result<DominationReport> {
    if f.samples().iter().any(|v| *v < 0.0) {
        return Err(Error::InvalidArgument("domination needs f >= 0".into()));
    }
    if lattices.is_empty() {
        return Err(Error::InvalidArgument("no lattices given".into()));
    }
    let psi = PsiFunctional::new(field.clone(), e.theta, PsiMode::Sup)?;
    let lhs = op.frac_power_apply(f, e.alpha)?;
    let mut rhs = vec![0.0; f.samples().len()];
    for lattice in lattices {
        for (x, v) in rhs.iter_mut().zip(dyadic_frac_int(f, e, &psi, lattice)?.samples()) {
            *x += v;
        }
    }
    let mut report = DominationReport {
        fitted_constant: 0.0,
        argmax: 0.0,
        finite: true,
        lattices: lattices.len(),
    };
    for (i, (a, b)) in lhs.samples().iter().zip(&rhs).enumerate() {
        let a = a.abs();
        let r = if a == 0.0 {
            0.0
        } else if *b == 0.0 {
            f64::INFINITY
        } else {
            a / b
        };
        if r > report.fitted_constant {
            report.fitted_constant = r;
            report.argmax = op.grid().center(i)[0];
        }
    }
    report.finite = report.fitted_constant.is_finite();
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumRow {
    pub r: u32,
    pub cubes: usize,
    /// Penalty-free `A_{p,q}` bracket over the stratum.
    pub bracket: f64,
    /// `[w]_{Ã^{α,θ/K}_{p,q}} · 2^{(r+1)(θ/K)(1 + q/p')}`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StratumTable {
    pub k_factor: f64,
    /// `[w]_{Ã^{α,θ/K}_{p,q}}` over the whole lattice.
    pub characteristic: f64,
    pub rows: Vec<StratumRow>,
    pub holds: bool,
}

/// Per-stratum growth of the penalty-free bracket against the damped
/// characteristic at exponent `θ/K`.
pub fn stratum_characteristic_check(
    w: &Weight,
    e: &ExponentSet,
    strat: &Stratification,
    psi: &PsiFunctional,
) -> Result<StratumTable> {
    if (strat.theta - e.theta).abs() > 1e-12 {
        return Err(Error::InvalidArgument("stratification built for a different θ".into()));
    }
    let k = e.k_factor();
    let reduced = e.theta / k;
    let sup = psi.with_mode(PsiMode::Sup).with_theta(reduced)?;
    let characteristic = apq_alpha_theta(w, &e.with_theta(reduced), &sup, strat.source())?.value;
    let growth = reduced * (1.0 + e.q / e.p_prime());
    let rows: Vec<StratumRow> = strat
        .strata()
        .iter()
        .map(|(r, cubes)| {
            let bracket = restricted_apq(w, e.p, e.q, cubes)?.value;
            let bound = characteristic * 2f64.powf((*r + 1) as f64 * growth);
            Ok(StratumRow {
                r: *r,
                cubes: cubes.len(),
                bracket,
                bound,
                holds: bracket <= bound * (1.0 + 1e-12),
            })
        })
        .collect::<Result<_>>()?;
    let holds = rows.iter().all(|r| r.holds);
    Ok(StratumTable {
        k_factor: k,
        characteristic,
        rows,
        holds,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseWeakReport {
    /// `sup_λ λ u({|I_α^Q f| > λ})^{1/q0} / ([w]^{1-α/n}_{A_{1,q0}^Q} ‖f‖_{L^1(w)})`.
    pub ratio: f64,
    pub lambda: f64,
    pub q0: f64,
    pub characteristic: f64,
    /// `q0' / (1 - κ^{-1/q0})`, `κ` the smallest volume ratio of nested cubes.
    pub budget: f64,
    pub maximal_cubes: usize,
    pub holds: bool,
}

/// Weak-type `(1, q0)` bound for `I_α^Q` with `q0 = n/(n-α)` and
/// `u = w^{q0}`, on a nested collection.
pub fn base_weak_check(
    f: &GridFunction,
    w: &Weight,
    alpha: f64,
    cubes: &CubeCollection,
    lambdas: Option<&[f64]>,
) -> Result<BaseWeakReport> {
    require_nested(cubes)?;
    same_grid(w.grid(), cubes.grid(), "weight and collection")?;
    let n = f.grid().dim() as f64;
    check_alpha_open(alpha, f.grid().dim())?;
    let q0 = n / (n - alpha);
    let characteristic = restricted_a1q(w, q0, cubes)?.value;
    let i = restricted_frac_int(f, alpha, cubes)?.abs();
    let vol = cubes.grid().cell_volume();
    let masses: Vec<f64> = w.log_samples().iter().map(|l| (q0 * l).exp() * vol).collect();
    let LevelSup { value, lambda } = level_set_sup(i.samples(), &masses, q0, lambdas);
    let norm1 = w.weighted_lp_power(f, 1.0);
    let ratio = if value == 0.0 {
        0.0
    } else {
        value.powf(1.0 / q0) / (characteristic.powf(1.0 - alpha / n) * norm1)
    };
    let ranges = cubes.ranges();
    let mut kappa = f64::INFINITY;
    for a in ranges {
        for b in ranges {
            if a != b && a.is_subset_of(b) {
                kappa = kappa.min(b.count() as f64 / a.count() as f64);
            }
        }
    }
    let geometric = if kappa.is_finite() { 1.0 / (1.0 - kappa.powf(-1.0 / q0)) } else { 1.0 };
    let budget = conjugate(q0) * geometric;
    Ok(BaseWeakReport {
        ratio,
        lambda,
        q0,
        characteristic,
        budget,
        maximal_cubes: cubes.maximal().len(),
        holds: ratio <= budget,
    })
}
