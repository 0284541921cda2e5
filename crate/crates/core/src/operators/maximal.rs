//! Adapted, restricted and weighted maximal functions, the dyadic weak-type
//! check, heat domination and the pointwise majorization of the sup-radius
//! fractional maximal function.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::{level_set_sup, measure, require_nested, same_grid, spread_max, Covered, LevelSup};
use crate::error::{Error, Result};
use crate::grid::{Cube, CubeCollection, GridFunction};
use crate::numerics::LogSumExp;
use crate::potential::{PsiFunctional, PsiMode, RadiusField};
use crate::semigroup::DiscreteOperator;
use crate::weights::{ap_theta, apq_alpha_theta, ExponentSet, Weight};

fn check_alpha(alpha: f64, dim: usize) -> Result<()> {
    if !(0.0..dim as f64).contains(&alpha) {
        return Err(Error::InvalidExponents(format!("α = {alpha} must lie in [0, {dim})")));
    }
    Ok(())
}

/// Per-cube values `(ψ(Q)|Q|)^{-(1-α/n)} ∫_Q |f|`.
fn adapted_cube_values(f: &GridFunction, alpha: f64, psi: &PsiFunctional, cubes: &CubeCollection) -> Result<Vec<f64>> {
    same_grid(f.grid(), cubes.grid(), "function and collection")?;
    same_grid(psi.grid(), cubes.grid(), "penalty and collection")?;
    let grid = *f.grid();
    let exponent = 1.0 - alpha / grid.dim() as f64;
    let psis = psi.values(cubes)?;
    Ok(cubes
        .ranges()
        .par_iter()
        .zip(psis.par_iter())
        .map(|(range, ps)| {
            let mass: f64 = range.indices().map(|i| f.samples()[i].abs()).sum::<f64>() * grid.cell_volume();
            mass / (ps * measure(&grid, range.count())).powf(exponent)
        })
        .collect())
}

/// `M^{θ,α} f` over `cubes`; a sup-mode `psi` gives the sup-radius variant.
pub fn maximal_adapted(
    f: &GridFunction,
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
) -> Result<Covered> {
    check_alpha(e.alpha, f.grid().dim())?;
    if (e.theta - psi.theta()).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "penalty exponent {} differs from θ = {}",
            psi.theta(),
            e.theta
        )));
    }
    let values = adapted_cube_values(f, e.alpha, psi, cubes)?;
    Ok(spread_max(cubes, &values))
}

/// `M^Q f = sup_{Q ∋ x} avg_Q |f|` over exactly the given cubes.
pub fn maximal_restricted(f: &GridFunction, cubes: &CubeCollection) -> Result<Covered> {
    same_grid(f.grid(), cubes.grid(), "function and collection")?;
    let values: Vec<f64> = cubes
        .ranges()
        .par_iter()
        .map(|range| range.indices().map(|i| f.samples()[i].abs()).sum::<f64>() / range.count() as f64)
        .collect();
    Ok(spread_max(cubes, &values))
}

/// `M_μ^α f(x) = sup_{Q ∋ x} μ(Q)^{-(1-α/n)} ∫_Q |f| dμ`.
pub fn maximal_weighted(f: &GridFunction, mu: &Weight, alpha: f64, cubes: &CubeCollection) -> Result<Covered> {
    same_grid(f.grid(), cubes.grid(), "function and collection")?;
    same_grid(mu.grid(), cubes.grid(), "weight and collection")?;
    check_alpha(alpha, f.grid().dim())?;
    let exponent = 1.0 - alpha / f.grid().dim() as f64;
    let log_h = f.grid().cell_volume().ln();
    let values: Vec<f64> = cubes
        .ranges()
        .par_iter()
        .map(|range| {
            let mut acc = LogSumExp::new();
            for i in range.indices() {
                let v = f.samples()[i].abs();
                if v > 0.0 {
                    acc.push(v.ln() + mu.log_samples()[i]);
                }
            }
            let log_int = acc.value() + log_h;
            (log_int - exponent * mu.log_mass_pow(range, 1.0)).exp()
        })
        .collect();
    Ok(spread_max(cubes, &values))
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakTypeReport {
    /// `sup_λ λ^p w({M^θ f > λ}) / ([w]_{A_p^θ} ‖f‖^p_{L^p(w)})`.
    pub ratio: f64,
    pub lambda: f64,
    pub characteristic: f64,
    pub holds: bool,
    pub collection: String,
}

pub const WEAK_TYPE_TOLERANCE: f64 = 1e-9;

/// Weak-type `(p, p)` bound for `M^θ` restricted to a nested collection,
/// where the stopping cubes are disjoint and the constant is 1. `[w]` is
/// computed on the same collection. `lambdas = None` takes the exact
/// supremum over all levels.
pub fn weak_type_check(
    f: &GridFunction,
    w: &Weight,
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
    lambdas: Option<&[f64]>,
) -> Result<WeakTypeReport> {
    require_nested(cubes)?;
    same_grid(w.grid(), cubes.grid(), "weight and collection")?;
    let e = ExponentSet::classical(e.n, e.p, e.theta)?;
    let m = maximal_adapted(f, &e, psi, cubes)?;
    let characteristic = ap_theta(w, &e, psi, cubes)?.value;
    let vol = cubes.grid().cell_volume();
    let masses: Vec<f64> = w.log_samples().iter().map(|l| l.exp() * vol).collect();
    let LevelSup { value, lambda } = level_set_sup(m.function.samples(), &masses, e.p, lambdas);
    let norm_p = w.weighted_lp_power(f, e.p);
    let ratio = if value == 0.0 { 0.0 } else { value / (characteristic * norm_p) };
    Ok(WeakTypeReport {
        ratio,
        lambda,
        characteristic,
        holds: ratio <= 1.0 + WEAK_TYPE_TOLERANCE,
        collection: cubes.tag().to_string(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HeatDominationReport {
    /// `sup_{x,t} |e^{-tL} f(x)| / M^θ f(x)`, with `0/0 = 0`.
    pub fitted_constant: f64,
    /// `(x, t)` at the supremum.
    pub argmax: (f64, f64),
    pub theta: f64,
    pub finite: bool,
    pub collection: String,
}

/// Fits `C_θ` in `|e^{-tL} f| <= C_θ M^θ f` over the given times, with the
/// centered penalty built from `field`.
pub fn heat_domination_check(
    op: &DiscreteOperator,
    field: &Arc<RadiusField>,
    f: &GridFunction,
    theta: f64,
    times: &[f64],
    cubes: &CubeCollection,
) -> Result<HeatDominationReport> {
    same_grid(op.grid(), cubes.grid(), "operator and collection")?;
    if times.is_empty() {
        return Err(Error::InvalidArgument("no times given".into()));
    }
    let psi = PsiFunctional::new(field.clone(), theta, PsiMode::Centered)?;
    let e = ExponentSet::classical(1.0, 2.0, theta)?;
    let m = maximal_adapted(f, &e, &psi, cubes)?.function;
    let heat = op.heat_apply_many(f, times)?;
    let mut report = HeatDominationReport {
        fitted_constant: 0.0,
        argmax: (0.0, 0.0),
        theta,
        finite: true,
        collection: cubes.tag().to_string(),
    };
    for (g, &t) in heat.iter().zip(times) {
        for (i, (a, b)) in g.samples().iter().zip(m.samples()).enumerate() {
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
                report.argmax = (op.grid().center(i)[0], t);
            }
        }
    }
    report.finite = report.fitted_constant.is_finite();
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct MajorizationReport {
    /// `[w]` with sup-radius penalty at exponent `γ = θ / (1 + p'/q)`.
    pub characteristic: f64,
    /// `[w]^{(p'/q)(1-α/n)}`.
    pub factor: f64,
    /// Largest per-cube ratio of the averaged side to the majorant.
    pub cube_ratio: f64,
    pub worst_cube: Option<Cube>,
    /// Largest pointwise ratio `M̃^{θ,α} f / majorant`.
    pub pointwise_ratio: f64,
    pub holds: bool,
}

pub const MAJORIZATION_TOLERANCE: f64 = 1e-9;

/// Pointwise domination of `M̃^{θ,α} f` by
/// `[w]^{(p'/q)(1-α/n)} (M_u{(M^α_σ(f/σ))^{q/r'} / u})^{r'/q}` with
/// `u = w^q`, `σ = w^{-p'}`, `r = 1 + q/p'`, every maximal function taken
/// over `cubes`. Checked cube by cube and cell by cell.
pub fn majorization_check(
    f: &GridFunction,
    w: &Weight,
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
) -> Result<MajorizationReport> {
    if psi.mode() != PsiMode::Sup {
        return Err(Error::InvalidArgument("majorization needs the sup-radius penalty".into()));
    }
    same_grid(w.grid(), cubes.grid(), "weight and collection")?;
    let (p_prime, q) = (e.p_prime(), e.q);
    let r_prime = 1.0 + p_prime / q;
    let gamma = e.gamma();
    let characteristic = apq_alpha_theta(w, &e.with_theta(gamma), &psi.with_theta(gamma)?, cubes)?.value;
    let factor = characteristic.powf(r_prime / q);

    let u = w.pow(q);
    let sigma = w.pow(-p_prime);
    let f_over_sigma = f.zip_with(&w.pow(p_prime).to_function(), |a, b| a * b);
    let m_sigma = maximal_weighted(&f_over_sigma, &sigma, e.alpha, cubes)?.function;
    let powered = m_sigma.map(|v| v.powf(q / r_prime));

    let lhs = adapted_cube_values(f, e.alpha, psi, cubes)?;
    let rows: Vec<f64> = cubes
        .ranges()
        .par_iter()
        .zip(lhs.par_iter())
        .map(|(range, l)| {
            let avg = powered.integrate_range(range) / u.mass(range);
            let rhs = factor * avg.powf(r_prime / q);
            if *l == 0.0 {
                0.0
            } else {
                l / rhs
            }
        })
        .collect();
    let (worst, cube_ratio) = rows
        .iter()
        .enumerate()
        .fold((None, 0.0f64), |(k, m), (i, r)| if *r > m { (Some(i), *r) } else { (k, m) });

    let m_tilde = spread_max(cubes, &lhs).function;
    let inner = powered.zip_with(&u.pow(-1.0).to_function(), |a, b| a * b);
    let m_u = maximal_weighted(&inner, &u, 0.0, cubes)?.function;
    let pointwise_ratio = m_tilde
        .samples()
        .iter()
        .zip(m_u.samples())
        .map(|(a, b)| if *a == 0.0 { 0.0 } else { a / (factor * b.powf(r_prime / q)) })
        .fold(0.0, f64::max);
    Ok(MajorizationReport {
        characteristic,
        factor,
        cube_ratio,
        worst_cube: worst.map(|k| cubes.cubes()[k]),
        pointwise_ratio,
        holds: cube_ratio <= 1.0 + MAJORIZATION_TOLERANCE && pointwise_ratio <= 1.0 + MAJORIZATION_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_lattice, enumerate_cubes, Grid, Strategy};
    use crate::potential::Potential;
    use crate::semigroup::Boundary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn psi(pot: Potential, grid: &Grid, theta: f64, mode: PsiMode) -> PsiFunctional {
        let field = Arc::new(RadiusField::for_potential(pot, grid).unwrap());
        PsiFunctional::new(field, theta, mode).unwrap()
    }

    #[test]
    fn classical_maximal_of_an_indicator() {
        let grid = Grid::new(1, 4.0, 32).unwrap();
        let f = grid.sample(|x| if (0.0..1.0).contains(&x[0]) { 1.0 } else { 0.0 });
        let cubes = enumerate_cubes(&grid, Strategy::ExhaustiveSmall).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 0.0).unwrap();
        let m = maximal_adapted(&f, &e, &psi(Potential::Zero, &grid, 0.0, PsiMode::Centered), &cubes).unwrap();
        assert_eq!(m.uncovered, 0);
        // cell centered at 2.125: best interval is [0, 2.25), average 1/2.25
        let i = grid.cells_per_axis() / 2 + 8;
        assert!((grid.center(i)[0] - 2.125).abs() < 1e-12);
        assert!((m.function.samples()[i] - 1.0 / 2.25).abs() < 1e-12);
        let j = grid.cells_per_axis() / 2 + 2;
        assert!((m.function.samples()[j] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constants_are_fixed_points() {
        let grid = Grid::new(1, 2.0, 16).unwrap();
        let one = GridFunction::constant(grid, 1.0);
        let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None }).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 1.0).unwrap();
        let m = maximal_adapted(&one, &e, &psi(Potential::Zero, &grid, 1.0, PsiMode::Centered), &cubes).unwrap();
        assert!(m.function.samples().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let mu = Weight::exponential(&grid, 0.3).unwrap();
        let mw = maximal_weighted(&one, &mu, 0.0, &cubes).unwrap();
        assert!(mw.function.samples().iter().all(|v| (v - 1.0).abs() < 1e-12));
        let unit = Weight::constant(&grid, 1.0).unwrap();
        let f = grid.sample(|x| x[0].cos());
        let a = maximal_weighted(&f, &unit, 0.5, &cubes).unwrap().function;
        let e = ExponentSet::from_p(1.0, 1.5, 0.5, 0.0).unwrap();
        let b = maximal_adapted(&f, &e, &psi(Potential::Zero, &grid, 0.0, PsiMode::Centered), &cubes).unwrap().function;
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn uncovered_cells_are_zero() {
        let grid = Grid::new(1, 2.0, 16).unwrap();
        let lattice = build_lattice(&grid, 2, 0).unwrap().to_collection().unwrap();
        let cubes = lattice.filter(|c, _| c.side < 4.0 && c.center[0] > 0.0, "right");
        let m = maximal_restricted(&GridFunction::constant(grid, 1.0), &cubes).unwrap();
        assert_eq!(m.uncovered, 8);
        assert!(m.function.samples()[..8].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sup_radius_variant_dominates() {
        let grid = Grid::new(1, 4.0, 64).unwrap();
        let cubes = enumerate_cubes(&grid, Strategy::CenteredSweep { depth: Some(5) }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = crate::testutil::uniform(&grid, -1.0, 1.0, &mut rng);
        let e = ExponentSet::from_p(1.0, 2.0, 0.25, 2.0).unwrap();
        let centered = psi(Potential::Hermite, &grid, 2.0, PsiMode::Centered);
        let m = maximal_adapted(&f, &e, &centered, &cubes).unwrap().function;
        let mt = maximal_adapted(&f, &e, &centered.with_mode(PsiMode::Sup), &cubes).unwrap().function;
        for (a, b) in m.samples().iter().zip(mt.samples()) {
            assert!(a <= &(b * (1.0 + 1e-12)));
        }
    }

    #[test]
    fn weak_type_of_a_spike_matches_enumeration() {
        let grid = Grid::new(1, 1.0, 16).unwrap();
        let cubes = build_lattice(&grid, 4, 0).unwrap().to_collection().unwrap();
        let f = GridFunction::new(grid, (0..16).map(|i| if i == 5 { 1.0 } else { 0.0 }).collect()).unwrap();
        let w = Weight::constant(&grid, 1.0).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 0.0).unwrap();
        let rep = weak_type_check(&f, &w, &e, &psi(Potential::Zero, &grid, 0.0, PsiMode::Centered), &cubes, None)
            .unwrap();
        // ancestors of side ℓ = 2^k h give level h/ℓ on a set of measure ℓ
        let h = grid.spacing();
        let oracle = (0..=4)
            .map(|k| {
                let l = h * (1u32 << k) as f64;
                (h / l).powi(2) * l
            })
            .fold(0.0, f64::max)
            / h;
        assert!((rep.characteristic - 1.0).abs() < 1e-12);
        assert!((rep.ratio - oracle).abs() < 1e-12, "{} {oracle}", rep.ratio);
        assert!(rep.holds);
    }

    #[test]
    fn weak_type_rejects_overlapping_collections() {
        let grid = Grid::new(1, 1.0, 16).unwrap();
        let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: Some(3) }).unwrap();
        let f = GridFunction::constant(grid, 1.0);
        let w = Weight::constant(&grid, 1.0).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 0.0).unwrap();
        let p = psi(Potential::Zero, &grid, 0.0, PsiMode::Centered);
        assert!(matches!(weak_type_check(&f, &w, &e, &p, &cubes, None), Err(Error::Unsupported(_))));
        let zero = GridFunction::constant(grid, 0.0);
        let lattice = build_lattice(&grid, 3, 0).unwrap().to_collection().unwrap();
        assert_eq!(weak_type_check(&zero, &w, &e, &p, &lattice, None).unwrap().ratio, 0.0);
    }

    #[test]
    fn heat_domination_of_constants_on_the_torus() {
        let grid = Grid::new(1, 2.0, 32).unwrap();
        let op = DiscreteOperator::new(&grid, Potential::Zero, Boundary::Periodic).unwrap();
        let field = Arc::new(RadiusField::for_potential(Potential::Zero, &grid).unwrap());
        let cubes = enumerate_cubes(&grid, Strategy::CenteredSweep { depth: None }).unwrap();
        let one = GridFunction::constant(grid, 1.0);
        let rep = heat_domination_check(&op, &field, &one, 1.0, &[0.0, 0.5, 4.0], &cubes).unwrap();
        assert!((rep.fitted_constant - 1.0).abs() < 1e-9, "{}", rep.fitted_constant);
        let bump = grid.sample(|x| (-4.0 * x[0] * x[0]).exp());
        let at_zero = heat_domination_check(&op, &field, &bump, 1.0, &[0.0], &cubes).unwrap();
        assert!(at_zero.fitted_constant <= 1.0 + 1e-12);
    }

    #[test]
    fn majorization_holds_on_random_instances() {
        let grid = Grid::new(1, 2.0, 32).unwrap();
        let cubes = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None }).unwrap();
        let p = psi(Potential::Hermite, &grid, 2.0, PsiMode::Sup);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let w = Weight::log_uniform(&grid, 1.5, &mut rng).unwrap();
            let f = crate::testutil::uniform(&grid, -1.0, 1.0, &mut rng);
            for e in [
                ExponentSet::from_p(1.0, 2.0, 0.25, 2.0).unwrap(),
                ExponentSet::classical(1.0, 1.5, 2.0).unwrap(),
            ] {
                let rep = majorization_check(&f, &w, &e, &p, &cubes).unwrap();
                assert!(rep.holds, "{rep:?}");
            }
        }
    }
}
