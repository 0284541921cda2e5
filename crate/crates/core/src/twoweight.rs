//! Entropy-bump two-weight conditions for the stratified fractional
//! integrals: `ρ_w(Q)`, the normalized functions `ε`, the per-cube bump
//! `β(Q)` and the two-weight norm checks built on them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{CellRange, Cube, CubeCollection, GridFunction};
use crate::numerics::{conjugate, integrate_gl};
use crate::operators::{frac_terms, restricted_frac_int, spread_sum, GridOperator, Stratification};
use crate::potential::{PsiFunctional, PsiMode};
use crate::weights::{ExponentSet, Weight};

/// Smallest argument passed to an entropy function; `ρ` values at or
/// below 1 are raised to it.
pub const ENTROPY_ARGUMENT_FLOOR: f64 = 1.0 + 1e-9;

/// `ε(t) = δ^{-1/p} (log(e t))^{(1+δ)/p}`, increasing on `(1, ∞)` with
/// `∫_1^∞ dt / (t ε(t)^p) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyFunction {
    p: f64,
    delta: f64,
}

impl EntropyFunction {
    pub fn new(p: f64, delta: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::InvalidArgument(format!("entropy exponent {p} must be positive and finite")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("entropy parameter δ = {delta} must be positive")));
        }
        Ok(Self { p, delta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `log ε` as a function of `log log(e t)`.
    fn ln_from_lnlog(&self, lnlog: f64) -> f64 {
        -self.delta.ln() / self.p + (1.0 + self.delta) / self.p * lnlog
    }

    /// `ε(t)`, with `t` raised to [`ENTROPY_ARGUMENT_FLOOR`] first.
    pub fn value(&self, t: f64) -> f64 {
        let t = t.max(ENTROPY_ARGUMENT_FLOOR);
        self.ln_from_lnlog((1.0 + t.ln()).ln()).exp()
    }

    /// `∫_1^∞ dt / (t ε(t)^p)` by Gauss–Legendre after `t = exp(v^{-m} - 1)`,
    /// `m = 2/δ`, which maps `(1, ∞)` onto `(0, 1)` with a smooth integrand.
    pub fn normalization(&self) -> f64 {
        let m = 2.0 / self.delta;
        integrate_gl(
            |v| {
                let lnlog = -m * v.ln();
                (m.ln() - (m + 1.0) * v.ln() - self.p * self.ln_from_lnlog(lnlog)).exp()
            },
            0.0,
            1.0,
            64,
        )
    }
}

/// The pair `ε_p`, `ε_{q'}` used by the bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyPair {
    pub primal: EntropyFunction,
    pub dual: EntropyFunction,
}

impl EntropyPair {
    /// `ε_p` and `ε_{q'}` sharing one `δ`.
    pub fn new(e: &ExponentSet, delta: f64) -> Result<Self> {
        Ok(Self {
            primal: EntropyFunction::new(e.p, delta)?,
            dual: EntropyFunction::new(e.q_prime(), delta)?,
        })
    }
}

/// `ρ_w(Q) = w(Q)^{-1} ∫_Q M(w 1_Q)`. The maximal function runs over the
/// cubes of `cubes` that meet `Q` together with the single cells, so
/// `M(w 1_Q) >= w` on `Q` and the value is at least 1.
pub fn rho_w(w: &Weight, q: &Cube, cubes: &CubeCollection) -> Result<f64> {
    let range = w.grid().cell_range(q)?;
    Ok(rho_range(w, &range, cubes))
}

pub(crate) fn rho_range(w: &Weight, q: &CellRange, cubes: &CubeCollection) -> f64 {
    let logs = w.log_samples();
    let shift = w.log_max(q);
    let cells: Vec<usize> = q.indices().collect();
    let mut local = vec![0.0; cells.len()];
    let base = |i: usize| (logs[i] - shift).exp();
    let position = |i: usize| cells.binary_search(&i).expect("cell of Q");
    for (k, i) in cells.iter().enumerate() {
        local[k] = base(*i);
    }
    for r in cubes.ranges() {
        let Some(meet) = r.intersect(q) else { continue };
        let mass: f64 = meet.indices().map(base).sum();
        let avg = mass / r.count() as f64;
        for i in meet.indices() {
            let k = position(i);
            if avg > local[k] {
                local[k] = avg;
            }
        }
    }
    let total: f64 = cells.iter().map(|i| base(*i)).sum();
    local.iter().sum::<f64>() / total
}

/// One stratum of the bump table.
#[derive(Debug, Clone, Serialize)]
pub struct BumpRow {
    pub r: u32,
    pub cubes: usize,
    /// `[σ, w]_{p,q,α,r} = sup_{Q ∈ Q_r} β(Q)`; 0 for an empty stratum.
    pub characteristic: f64,
    pub empty: bool,
    /// `2^{(r+1)θ/2} [σ, w]^{(θ)}`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BumpReport {
    pub theta: f64,
    pub collection: String,
    /// `β(Q)` per source cube, in lattice order.
    pub beta: Vec<f64>,
    pub rho_sigma: Vec<f64>,
    pub rho_w: Vec<f64>,
    /// `ψ̃_{θ/2}(Q)` per source cube.
    pub half_penalty: Vec<f64>,
    pub strata: Vec<BumpRow>,
    /// `[σ, w]^{(θ)} = sup_Q β(Q) / ψ̃_{θ/2}(Q)`.
    pub global: f64,
    pub global_witness: usize,
    /// Every stratum obeys its bound and the global value matches the table.
    pub consistent: bool,
}

impl BumpReport {
    pub fn stratum(&self, r: u32) -> Option<&BumpRow> {
        self.strata.iter().find(|row| row.r == r)
    }
}

/// `β(Q)` over the stratified lattice, its per-stratum suprema and the
/// penalty-normalized global characteristic.
pub fn bump_characteristic(
    sigma: &Weight,
    w: &Weight,
    e: &ExponentSet,
    eps: &EntropyPair,
    strat: &Stratification,
    psi: &PsiFunctional,
) -> Result<BumpReport> {
    let source = strat.source();
    let grid = *source.grid();
    if sigma.grid() != &grid || w.grid() != &grid {
        return Err(Error::InvalidArgument("weights and lattice live on different grids".into()));
    }
    if !(e.p > 1.0) {
        return Err(Error::InvalidExponents("the bump needs p > 1".into()));
    }
    let (pp, qp) = (e.p_prime(), e.q_prime());
    let size_exponent = 1.0 - e.alpha / e.n;
    let vol = grid.cell_volume();
    let per_cube: Vec<(f64, f64, f64)> = source
        .ranges()
        .par_iter()
        .map(|range| {
            let rs = rho_range(sigma, range, source);
            let rw = rho_range(w, range, source);
            let log_size = (range.count() as f64 * vol).ln();
            let log_beta = sigma.log_mass_pow(range, 1.0) / pp + w.log_mass_pow(range, 1.0) / e.q
                - size_exponent * log_size
                + rs.ln() / e.p
                + eps.primal.value(rs).ln()
                + rw.ln() / qp
                + eps.dual.value(rw).ln();
            (log_beta.exp(), rs, rw)
        })
        .collect();
    let beta: Vec<f64> = per_cube.iter().map(|c| c.0).collect();
    let half = psi.with_mode(PsiMode::Sup).with_theta(strat.theta() / 2.0)?;
    let half_penalty = half.values(source)?;
    let (mut global, mut global_witness) = (0.0, 0);
    for (k, (b, h)) in beta.iter().zip(&half_penalty).enumerate() {
        if b / h > global {
            global = b / h;
            global_witness = k;
        }
    }
    let top = strat.index().iter().copied().max().unwrap_or(0);
    let strata: Vec<BumpRow> = (0..=top)
        .map(|r| {
            let members: Vec<f64> =
                beta.iter().zip(strat.index()).filter(|(_, i)| **i == r).map(|(b, _)| *b).collect();
            let characteristic = members.iter().copied().fold(0.0, f64::max);
            let bound = 2f64.powf((r + 1) as f64 * strat.theta() / 2.0) * global;
            BumpRow {
                r,
                cubes: members.len(),
                characteristic,
                empty: members.is_empty(),
                bound,
                holds: characteristic <= bound * (1.0 + 1e-12),
            }
        })
        .collect();
    let consistent = strata.iter().all(|row| row.holds)
        && beta.iter().zip(&half_penalty).all(|(b, h)| b / h <= global);
    Ok(BumpReport {
        theta: strat.theta(),
        collection: source.tag().to_string(),
        beta,
        rho_sigma: per_cube.iter().map(|c| c.1).collect(),
        rho_w: per_cube.iter().map(|c| c.2).collect(),
        half_penalty,
        strata,
        global,
        global_witness,
        consistent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoWeightRow {
    pub r: u32,
    pub characteristic: f64,
    /// `max ‖I_α^{Q_r}(σ f)‖_{L^q(w)} / (‖f‖_{L^p(σ)} [σ, w]_{p,q,α,r})`.
    pub ratio: f64,
    pub argmax_probe: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoWeightReport {
    pub rows: Vec<TwoWeightRow>,
    pub max_ratio: f64,
    pub budget: f64,
    /// `max ‖I^D_{α,θ}(σ f)‖_{L^q(w)} / (‖f‖_{L^p(σ)} [σ, w]^{(θ)})`.
    pub composed_ratio: f64,
    /// `budget · 2^{θ/2} / (1 - 2^{-θ/2})`.
    pub composed_budget: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub holds: bool,
}

/// Per-stratum and composed two-weight ratios against a bump table built
/// from the same `(σ, w)` and stratification.
pub fn two_weight_check(
    sigma: &Weight,
    w: &Weight,
    e: &ExponentSet,
    bump: &BumpReport,
    strat: &Stratification,
    probes: &[GridFunction],
    budget: f64,
) -> Result<TwoWeightReport> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("probe set is empty".into()));
    }
    let source = strat.source();
    if bump.beta.len() != source.len() || bump.theta != strat.theta() {
        return Err(Error::InvalidArgument("bump table built for a different stratification".into()));
    }
    let theta = strat.theta();
    let sigma_fn = sigma.to_function();
    let prepared: Vec<Option<(GridFunction, f64)>> = probes
        .iter()
        .map(|f| {
            let den = sigma.weighted_lp_norm(f, e.p);
            (den > 0.0 && den.is_finite()).then(|| (f.zip_with(&sigma_fn, |a, b| a * b), den))
        })
        .collect();
    let evaluated = prepared.iter().filter(|p| p.is_some()).count();
    let skipped = prepared.len() - evaluated;

    let mut rows = Vec::new();
    for (r, cubes) in strat.strata() {
        let characteristic = bump.stratum(*r).map_or(0.0, |row| row.characteristic);
        let ratios: Vec<f64> = prepared
            .par_iter()
            .map(|p| match p {
                None => Ok(0.0),
                Some((sf, den)) => {
                    Ok(w.weighted_lp_norm(&restricted_frac_int(sf, e.alpha, cubes)?, e.q) / (den * characteristic))
                }
            })
            .collect::<Result<_>>()?;
        let (argmax_probe, ratio) = argmax(&ratios);
        rows.push(TwoWeightRow {
            r: *r,
            characteristic,
            ratio,
            argmax_probe,
        });
    }
    let composed: Vec<f64> = prepared
        .par_iter()
        .map(|p| match p {
            None => 0.0,
            Some((sf, den)) => {
                let damped: Vec<f64> = frac_terms(sf, e.alpha, source)
                    .iter()
                    .zip(strat.penalties())
                    .map(|(t, psi)| t / psi)
                    .collect();
                w.weighted_lp_norm(&spread_sum(source, &damped), e.q) / (den * bump.global)
            }
        })
        .collect();
    let composed_ratio = argmax(&composed).1;
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let half = 2f64.powf(theta / 2.0);
    let composed_budget = budget * half / (1.0 - 1.0 / half);
    Ok(TwoWeightReport {
        rows,
        max_ratio,
        budget,
        composed_ratio,
        composed_budget,
        evaluated,
        skipped,
        holds: max_ratio <= budget && composed_ratio <= composed_budget,
    })
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (k, v)| if *v > best.1 { (k, *v) } else { best })
}

#[derive(Debug, Clone, Serialize)]
pub struct ChangeOfMeasureReport {
    /// `max ‖T g‖_{L^q(w)} / ‖g‖_{L^p(v)}`.
    pub direct: f64,
    /// `max ‖T(σ f)‖_{L^q(w)} / ‖f‖_{L^p(σ)}` with `f = g / σ`, `σ = v^{-p'/p}`.
    pub substituted: f64,
    /// Largest per-probe relative gap between the two ratios.
    pub max_relative_gap: f64,
    pub holds: bool,
}

/// Both formulations of a two-weight norm evaluated on the same probes.
pub fn change_of_measure_check(
    op: &dyn GridOperator,
    v: &Weight,
    w: &Weight,
    p: f64,
    q: f64,
    probes: &[GridFunction],
) -> Result<ChangeOfMeasureReport> {
    if probes.is_empty() {
        return Err(Error::InvalidArgument("probe set is empty".into()));
    }
    let sigma = v.pow(-conjugate(p) / p);
    let sigma_fn = sigma.to_function();
    let pairs: Vec<Option<(f64, f64)>> = probes
        .par_iter()
        .map(|g| {
            let den = v.weighted_lp_norm(g, p);
            if den == 0.0 || !den.is_finite() {
                return Ok(None);
            }
            let direct = w.weighted_lp_norm(&op.apply(g)?, q) / den;
            let f = g.zip_with(&sigma_fn, |a, s| a / s);
            let sf = f.zip_with(&sigma_fn, |a, s| a * s);
            let substituted = w.weighted_lp_norm(&op.apply(&sf)?, q) / sigma.weighted_lp_norm(&f, p);
            Ok(Some((direct, substituted)))
        })
        .collect::<Result<_>>()?;
    let mut report = ChangeOfMeasureReport {
        direct: 0.0,
        substituted: 0.0,
        max_relative_gap: 0.0,
        holds: true,
    };
    for (a, b) in pairs.into_iter().flatten() {
        report.direct = report.direct.max(a);
        report.substituted = report.substituted.max(b);
        let scale = a.abs().max(b.abs());
        if scale > 0.0 {
            report.max_relative_gap = report.max_relative_gap.max((a - b).abs() / scale);
        }
    }
    report.holds = report.max_relative_gap <= 1e-10;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_lattice, Grid};
    use crate::operators::{stratify, RestrictedFracInt};
    use crate::potential::{Potential, RadiusField};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn psi_for(potential: Potential, grid: &Grid) -> PsiFunctional {
        let field = Arc::new(RadiusField::for_potential(potential, grid).unwrap());
        PsiFunctional::new(field, 1.0, PsiMode::Sup).unwrap()
    }

    #[test]
    fn entropy_normalization_and_monotonicity() {
        for p in [1.2, 1.5, 2.0, 3.0, 4.0] {
            for delta in [0.05, 0.1, 0.5, 1.0, 2.0, 5.0] {
                let eps = EntropyFunction::new(p, delta).unwrap();
                let total = eps.normalization();
                assert!((total - 1.0).abs() < 1e-6, "p={p} δ={delta}: {total}");
                let ts = [1.0 + 1e-6, 1.5, 3.0, 10.0, 1e3, 1e8];
                assert!(ts.windows(2).all(|t| eps.value(t[0]) < eps.value(t[1])));
            }
        }
        let eps = EntropyFunction::new(2.0, 1.0).unwrap();
        // log(e · e^3) = 4
        assert!((eps.value(3f64.exp()) - 4.0).abs() < 1e-12);
        assert_eq!(eps.value(0.5), eps.value(ENTROPY_ARGUMENT_FLOOR));
        assert!(EntropyFunction::new(2.0, 0.0).is_err());
    }

    #[test]
    fn rho_of_a_constant_is_one() {
        let grid = Grid::new(1, 2.0, 32).unwrap();
        let lattice = build_lattice(&grid, 5, 0).unwrap().to_collection().unwrap();
        let w = Weight::constant(&grid, 3.0).unwrap();
        for cube in lattice.cubes() {
            assert!((rho_w(&w, cube, &lattice).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rho_of_a_spike_matches_enumeration() {
        let n = 16;
        let grid = Grid::new(1, 1.0, n).unwrap();
        let lattice = build_lattice(&grid, 4, 0).unwrap().to_collection().unwrap();
        let mut logs = vec![(1e-3f64).ln(); n];
        logs[5] = 0.0;
        let w = Weight::from_log(grid, logs.clone()).unwrap();
        let vals: Vec<f64> = logs.iter().map(|l| l.exp()).collect();
        // dyadic intervals [k 2^j, (k+1) 2^j) of cell indices, the whole domain as Q
        let mut m = vals.clone();
        for j in 0..=4u32 {
            let len = 1usize << j;
            for k in 0..n / len {
                let avg = vals[k * len..(k + 1) * len].iter().sum::<f64>() / len as f64;
                for x in &mut m[k * len..(k + 1) * len] {
                    *x = x.max(avg);
                }
            }
        }
        let want = m.iter().sum::<f64>() / vals.iter().sum::<f64>();
        let got = rho_w(&w, &grid.domain(), &lattice).unwrap();
        assert!((got - want).abs() < 1e-12 * want, "{got} {want}");
        assert!(got > 1.5);
    }

    #[test]
    fn rho_grows_with_the_collection_and_stays_above_one() {
        let grid = Grid::new(1, 2.0, 32).unwrap();
        let coarse = build_lattice(&grid, 2, 0).unwrap().to_collection().unwrap();
        let fine = build_lattice(&grid, 5, 0).unwrap().to_collection().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let w = Weight::log_uniform(&grid, 3.0, &mut rng).unwrap();
            for cube in coarse.cubes() {
                let a = rho_w(&w, cube, &coarse).unwrap();
                let b = rho_w(&w, cube, &fine).unwrap();
                assert!(a >= 1.0 - 1e-9 && b >= a * (1.0 - 1e-12), "{a} {b}");
            }
        }
    }

    #[test]
    fn two_valued_bump_closed_form() {
        let grid = Grid::new(1, 0.5, 4).unwrap();
        let lattice = build_lattice(&grid, 0, 0).unwrap();
        let psi = psi_for(Potential::Zero, &grid);
        let strat = stratify(&lattice, 1.0, &psi).unwrap();
        let w = Weight::from_log(grid, vec![3f64.ln(), 3f64.ln(), 0.0, 0.0]).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 1.0).unwrap();
        let eps = EntropyPair::new(&e, 1.0).unwrap();
        let rep = bump_characteristic(&w, &w, &e, &eps, &strat, &psi).unwrap();
        // M(w1_Q) = (3, 3, 2, 2), so ρ = 5/4; β = ⟨w⟩ ρ (1 + log ρ)^2
        let rho: f64 = 1.25;
        assert!((rep.rho_w[0] - rho).abs() < 1e-12);
        let want = 2.0 * rho * (1.0 + rho.ln()).powi(2);
        assert!((rep.beta[0] - want).abs() < 1e-12, "{} {want}", rep.beta[0]);
        assert!((rep.global - want).abs() < 1e-12);
        assert!(rep.consistent);
    }

    #[test]
    fn bump_scales_with_the_weights() {
        let grid = Grid::new(1, 2.0, 32).unwrap();
        let lattice = build_lattice(&grid, 4, 0).unwrap();
        let psi = psi_for(Potential::Hermite, &grid);
        let strat = stratify(&lattice, 2.0, &psi).unwrap();
        let e = ExponentSet::from_p(1.0, 1.5, 0.5, 2.0).unwrap();
        let eps = EntropyPair::new(&e, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = Weight::log_uniform(&grid, 1.0, &mut rng).unwrap();
        let w = Weight::log_uniform(&grid, 1.0, &mut rng).unwrap();
        let base = bump_characteristic(&sigma, &w, &e, &eps, &strat, &psi).unwrap();
        let (c, d) = (7.0f64, 0.2f64);
        let scaled = bump_characteristic(
            &sigma.mul(&Weight::constant(&grid, c).unwrap()),
            &w.mul(&Weight::constant(&grid, d).unwrap()),
            &e,
            &eps,
            &strat,
            &psi,
        )
        .unwrap();
        let factor = c.powf(1.0 / e.p_prime()) * d.powf(1.0 / e.q);
        for (a, b) in base.beta.iter().zip(&scaled.beta) {
            assert!((b / a - factor).abs() < 1e-12 * factor);
        }
        assert!(base.consistent);
    }

    #[test]
    fn empty_strata_are_flagged() {
        // ρ = 1/√(2c) = 0.01, so every cube has penalty far above 1
        let grid = Grid::new(1, 1.0, 8).unwrap();
        let lattice = build_lattice(&grid, 3, 0).unwrap();
        let psi = psi_for(Potential::Constant { value: 5000.0 }, &grid);
        let strat = stratify(&lattice, 1.0, &psi).unwrap();
        let w = Weight::constant(&grid, 1.0).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 1.0).unwrap();
        let eps = EntropyPair::new(&e, 1.0).unwrap();
        let rep = bump_characteristic(&w, &w, &e, &eps, &strat, &psi).unwrap();
        let row = rep.stratum(0).unwrap();
        assert!(row.empty && row.characteristic == 0.0 && row.holds);
        assert!(rep.strata.iter().any(|r| !r.empty));
        assert!(rep.consistent);
    }

    #[test]
    fn one_cube_two_weight_ratio_is_at_most_one() {
        let grid = Grid::new(1, 0.5, 16).unwrap();
        let lattice = build_lattice(&grid, 0, 0).unwrap();
        let psi = psi_for(Potential::Zero, &grid);
        let strat = stratify(&lattice, 1.0, &psi).unwrap();
        let one = Weight::constant(&grid, 1.0).unwrap();
        let e = ExponentSet::from_p(1.0, 1.5, 0.5, 1.0).unwrap();
        let eps = EntropyPair::new(&e, 1.0).unwrap();
        let bump = bump_characteristic(&one, &one, &e, &eps, &strat, &psi).unwrap();
        assert!((bump.beta[0] - 1.0).abs() < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut probes = vec![GridFunction::constant(grid, 1.0), GridFunction::constant(grid, 0.0)];
        probes.extend((0..8).map(|_| crate::testutil::uniform(&grid, -1.0, 1.0, &mut rng)));
        let rep = two_weight_check(&one, &one, &e, &bump, &strat, &probes, 10.0).unwrap();
        assert!(rep.max_ratio <= 1.0 + 1e-8 && rep.max_ratio > 1.0 - 1e-8);
        assert_eq!(rep.skipped, 1);
        let zero = two_weight_check(&one, &one, &e, &bump, &strat, &probes[1..2], 10.0).unwrap();
        assert_eq!(zero.max_ratio, 0.0);
        assert!(two_weight_check(&one, &one, &e, &bump, &strat, &[], 10.0).is_err());
    }

    #[test]
    fn random_pairs_stay_within_budget() {
        let grid = Grid::new(1, 4.0, 32).unwrap();
        let lattice = build_lattice(&grid, 5, 0).unwrap();
        let psi = psi_for(Potential::Hermite, &grid);
        let strat = stratify(&lattice, 2.0, &psi).unwrap();
        let e = ExponentSet::from_p(1.0, 2.0, 0.25, 2.0).unwrap();
        let eps = EntropyPair::new(&e, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..8 {
            let sigma = Weight::log_uniform(&grid, rng.gen_range(0.0..2.0), &mut rng).unwrap();
            let w = Weight::log_uniform(&grid, rng.gen_range(0.0..2.0), &mut rng).unwrap();
            let bump = bump_characteristic(&sigma, &w, &e, &eps, &strat, &psi).unwrap();
            assert!(bump.consistent);
            let probes: Vec<_> = (0..6).map(|_| crate::testutil::uniform(&grid, 0.0, 1.0, &mut rng)).collect();
            let rep = two_weight_check(&sigma, &w, &e, &bump, &strat, &probes, 10.0).unwrap();
            assert!(rep.holds, "{rep:?}");
        }
    }

    #[test]
    fn change_of_measure_identity() {
        let grid = Grid::new(1, 2.0, 32).unwrap();
        let cubes = build_lattice(&grid, 5, 0).unwrap().to_collection().unwrap();
        let op = RestrictedFracInt { alpha: 0.5, cubes };
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = Weight::log_uniform(&grid, 2.0, &mut rng).unwrap();
        let w = Weight::log_uniform(&grid, 2.0, &mut rng).unwrap();
        let probes: Vec<_> = (0..10).map(|_| crate::testutil::uniform(&grid, -1.0, 1.0, &mut rng)).collect();
        let rep = change_of_measure_check(&op, &v, &w, 1.5, 6.0, &probes).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!(rep.direct > 0.0);
    }
}
