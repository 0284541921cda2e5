//! Weights stored as logarithms and the Muckenhoupt-type characteristics
//! built from them.
//!
//! Each characteristic is a supremum over a declared [`CubeCollection`] of a
//! product of two cube averages of powers of `w`, optionally divided by a
//! cube penalty. Averages are accumulated with log-sum-exp so weights like
//! `e^{η|x|²}` on wide boxes never overflow.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{norm, CellRange, Cube, CubeCollection, Grid, GridFunction, Point};
use crate::numerics::{conjugate, LogSumExp};
use crate::potential::PsiFunctional;

/// A strictly positive grid function `w = exp(log_samples)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    grid: Grid,
    log_samples: Vec<f64>,
}

impl Weight {
    pub fn from_log(grid: Grid, log_samples: Vec<f64>) -> Result<Self> {
        if log_samples.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} log-samples, got {}",
                grid.len(),
                log_samples.len()
            )));
        }
        if let Some(i) = log_samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "log-sample {i} is not finite; weights must be strictly positive"
            )));
        }
        Ok(Self { grid, log_samples })
    }

    pub fn from_log_fn<F: Fn(&Point) -> f64 + Sync>(grid: &Grid, f: F) -> Result<Self> {
        Self::from_log(*grid, grid.sample(f).into_samples())
    }

    pub fn from_values(f: &GridFunction) -> Result<Self> {
        Self::from_log(*f.grid(), f.samples().iter().map(|v| v.ln()).collect())
    }

    pub fn constant(grid: &Grid, c: f64) -> Result<Self> {
        Self::from_log(*grid, vec![c.ln(); grid.len()])
    }

    /// `|x|^δ`; cell centers avoid the origin because `N` is even.
    pub fn power(grid: &Grid, delta: f64) -> Result<Self> {
        Self::from_log_fn(grid, |x| delta * norm(x).ln())
    }

    /// `e^{η|x|²}`.
    pub fn exponential(grid: &Grid, eta: f64) -> Result<Self> {
        Self::from_log_fn(grid, |x| {
            let r = norm(x);
            eta * r * r
        })
    }

    /// `a` where the first coordinate is negative, `1/a` elsewhere.
    pub fn two_valued(grid: &Grid, a: f64) -> Result<Self> {
        let la = a.ln();
        Self::from_log_fn(grid, |x| if x[0] < 0.0 { la } else { -la })
    }

    /// Independent log-uniform samples in `[e^{-spread}, e^{spread}]`.
    pub fn log_uniform<R: Rng>(grid: &Grid, spread: f64, rng: &mut R) -> Result<Self> {
        let logs = (0..grid.len()).map(|_| rng.gen_range(-spread..=spread)).collect();
        Self::from_log(*grid, logs)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn log_samples(&self) -> &[f64] {
        &self.log_samples
    }

    pub fn value(&self, i: usize) -> f64 {
        self.log_samples[i].exp()
    }

    pub fn values(&self) -> Vec<f64> {
        self.log_samples.iter().map(|v| v.exp()).collect()
    }

    pub fn to_function(&self) -> GridFunction {
        GridFunction::new(self.grid, self.values()).expect("finite weight values")
    }

    /// `w^s`.
    pub fn pow(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            log_samples: self.log_samples.iter().map(|v| s * v).collect(),
        }
    }

    /// `w · v`.
    pub fn mul(&self, other: &Weight) -> Self {
        Self {
            grid: self.grid,
            log_samples: self.log_samples.iter().zip(&other.log_samples).map(|(a, b)| a + b).collect(),
        }
    }

    /// `log` of the average of `w^s` over the cell range.
    pub fn log_average_pow(&self, range: &CellRange, s: f64) -> f64 {
        let mut acc = LogSumExp::new();
        for i in range.indices() {
            acc.push(s * self.log_samples[i]);
        }
        acc.value() - (range.count() as f64).ln()
    }

    /// `log ∫_Q w^s`.
    pub fn log_mass_pow(&self, range: &CellRange, s: f64) -> f64 {
        self.log_average_pow(range, s) + (range.count() as f64 * self.grid.cell_volume()).ln()
    }

    /// `w(Q) = ∫_Q w`.
    pub fn mass(&self, range: &CellRange) -> f64 {
        self.log_mass_pow(range, 1.0).exp()
    }

    pub fn log_min(&self, range: &CellRange) -> f64 {
        range.indices().map(|i| self.log_samples[i]).fold(f64::INFINITY, f64::min)
    }

    pub fn log_max(&self, range: &CellRange) -> f64 {
        range.indices().map(|i| self.log_samples[i]).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `∫ |f|^p w` over the whole grid.
    pub fn weighted_lp_power(&self, f: &GridFunction, p: f64) -> f64 {
        f.samples()
            .iter()
            .zip(&self.log_samples)
            .map(|(v, lw)| if *v == 0.0 { 0.0 } else { (p * v.abs().ln() + lw).exp() })
            .sum::<f64>()
            * self.grid.cell_volume()
    }

    /// `‖f‖_{L^p(w)}`.
    pub fn weighted_lp_norm(&self, f: &GridFunction, p: f64) -> f64 {
        self.weighted_lp_power(f, p).powf(1.0 / p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightFamily {
    Constant,
    TwoValued,
    Power,
    Exponential,
    LogUniform,
}

/// Config-level weight description: one family with one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub family: WeightFamily,
    pub param: f64,
}

impl WeightSpec {
    pub fn build<R: Rng>(&self, grid: &Grid, rng: &mut R) -> Result<Weight> {
        match self.family {
            WeightFamily::Constant => Weight::constant(grid, self.param),
            WeightFamily::TwoValued => Weight::two_valued(grid, self.param),
            WeightFamily::Power => Weight::power(grid, self.param),
            WeightFamily::Exponential => Weight::exponential(grid, self.param),
            WeightFamily::LogUniform => Weight::log_uniform(grid, self.param, rng),
        }
    }
}

/// `(n, p, q, α, θ)` with `1/p - 1/q = α/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub n: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub theta: f64,
}

impl ExponentSet {
    pub fn new(n: f64, p: f64, q: f64, alpha: f64, theta: f64) -> Result<Self> {
        let e = Self { n, p, q, alpha, theta };
        e.validate()?;
        Ok(e)
    }

    /// Solves the exponent relation for `q`.
    pub fn from_p(n: f64, p: f64, alpha: f64, theta: f64) -> Result<Self> {
        let inv_q = 1.0 / p - alpha / n;
        if !(inv_q > 0.0) {
            return Err(Error::InvalidExponents(format!(
                "1/p - α/n = {inv_q} must be positive (p={p}, α={alpha}, n={n})"
            )));
        }
        Self::new(n, p, 1.0 / inv_q, alpha, theta)
    }

    /// `p = q`, `α = 0`.
    pub fn classical(n: f64, p: f64, theta: f64) -> Result<Self> {
        Self::new(n, p, p, 0.0, theta)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { n, p, q, alpha, theta } = *self;
        if !(n >= 1.0 && n.is_finite()) {
            return Err(Error::InvalidExponents(format!("dimension {n} must be >= 1")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidExponents(format!("p = {p} must exceed 1")));
        }
        if !(q >= p && q.is_finite()) {
            return Err(Error::InvalidExponents(format!("q = {q} must be finite and >= p = {p}")));
        }
        if !(0.0..n).contains(&alpha) {
            return Err(Error::InvalidExponents(format!("α = {alpha} must lie in [0, n = {n})")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidExponents(format!("θ = {theta} must be finite and >= 0")));
        }
        let gap = 1.0 / p - 1.0 / q - alpha / n;
        if gap.abs() > 1e-12 {
            return Err(Error::InvalidExponents(format!(
                "1/p - 1/q = {} differs from α/n = {}",
                1.0 / p - 1.0 / q,
                alpha / n
            )));
        }
        Ok(())
    }

    pub fn with_theta(&self, theta: f64) -> Self {
        Self { theta, ..*self }
    }

    pub fn p_prime(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn q_prime(&self) -> f64 {
        conjugate(self.q)
    }

    /// `γ` with `γ p'/q + γ = θ`.
    pub fn gamma(&self) -> f64 {
        self.theta / (1.0 + self.p_prime() / self.q)
    }

    /// `K` with `(1/K)(1 + q/p')(1 - α/n) max{1, p'/q} = 1/2`.
    pub fn k_factor(&self) -> f64 {
        2.0 * (1.0 + self.q / self.p_prime()) * (1.0 - self.alpha / self.n) * self.sharp_exponent_factor()
    }

    /// `max{1, p'/q}`.
    pub fn sharp_exponent_factor(&self) -> f64 {
        (self.p_prime() / self.q).max(1.0)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CubeFactors {
    pub cube: Cube,
    pub factor1: f64,
    pub factor2: f64,
    pub product: f64,
    pub log_product: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharacteristicReport {
    pub value: f64,
    pub log_value: f64,
    pub argmax_cube: Cube,
    pub collection: String,
    pub per_cube: Vec<CubeFactors>,
}

impl CharacteristicReport {
    fn from_rows(collection: &CubeCollection, per_cube: Vec<CubeFactors>) -> Result<Self> {
        let best = per_cube
            .iter()
            .max_by(|a, b| a.log_product.total_cmp(&b.log_product))
            .ok_or(Error::EmptyCollection)?;
        Ok(Self {
            value: best.product,
            log_value: best.log_product,
            argmax_cube: best.cube,
            collection: collection.tag().to_string(),
            per_cube,
        })
    }

    pub fn products(&self) -> Vec<f64> {
        self.per_cube.iter().map(|r| r.product).collect()
    }
}

/// Second factor of a bracket.
#[derive(Debug, Clone, Copy)]
enum Dual {
    /// `(avg w^{s} / ψ)^{e}`.
    Power { s: f64, e: f64 },
    /// `(min w^{s})^{-1}`; the `p = 1` form.
    InverseMin { s: f64 },
}

/// `sup_Q (avg w^{s1} / ψ) · dual(Q)` in the log domain.
fn bracket(
    w: &Weight,
    cubes: &CubeCollection,
    log_psi: Option<&[f64]>,
    s1: f64,
    dual: Dual,
) -> Result<CharacteristicReport> {
    cubes.ensure_nonempty()?;
    if w.grid() != cubes.grid() {
        return Err(Error::InvalidArgument("weight and collection live on different grids".into()));
    }
    let rows: Vec<CubeFactors> = (0..cubes.len())
        .into_par_iter()
        .map(|k| {
            let range = &cubes.ranges()[k];
            let lp = log_psi.map_or(0.0, |v| v[k]);
            let l1 = w.log_average_pow(range, s1) - lp;
            let l2 = match dual {
                Dual::Power { s, e } => e * (w.log_average_pow(range, s) - lp),
                Dual::InverseMin { s } => -s * w.log_min(range),
            };
            CubeFactors {
                cube: cubes.cubes()[k],
                factor1: l1.exp(),
                factor2: l2.exp(),
                product: (l1 + l2).exp(),
                log_product: l1 + l2,
            }
        })
        .collect();
    CharacteristicReport::from_rows(cubes, rows)
}

fn log_penalties(psi: &PsiFunctional, cubes: &CubeCollection) -> Result<Vec<f64>> {
    if psi.grid() != cubes.grid() {
        return Err(Error::InvalidArgument("penalty and collection live on different grids".into()));
    }
    Ok(psi.values(cubes)?.into_iter().map(f64::ln).collect())
}

/// `[w]_{A_p^θ}`, or the sup-radius variant when `psi` is in sup mode.
pub fn ap_theta(
    w: &Weight,
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
) -> Result<CharacteristicReport> {
    check_theta(e, psi)?;
    let lp = log_penalties(psi, cubes)?;
    let p = e.p;
    bracket(w, cubes, Some(&lp), 1.0, Dual::Power { s: -1.0 / (p - 1.0), e: p - 1.0 })
}

/// `[w]_{A_{p,q}^{α,θ}}`, or the sup-radius variant.
pub fn apq_alpha_theta(
    w: &Weight,
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
) -> Result<CharacteristicReport> {
    check_theta(e, psi)?;
    let lp = log_penalties(psi, cubes)?;
    let pp = e.p_prime();
    bracket(w, cubes, Some(&lp), e.q, Dual::Power { s: -pp, e: e.q / pp })
}

fn check_theta(e: &ExponentSet, psi: &PsiFunctional) -> Result<()> {
    if (e.theta - psi.theta()).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "penalty exponent {} differs from θ = {}",
            psi.theta(),
            e.theta
        )));
    }
    Ok(())
}

/// Penalty-free `[w]_{A_{p,q}^Q}` over exactly the given cubes.
pub fn restricted_apq(w: &Weight, p: f64, q: f64, cubes: &CubeCollection) -> Result<CharacteristicReport> {
    if !(p > 1.0 && q > 0.0) {
        return Err(Error::InvalidExponents(format!("restricted A_pq needs p > 1, q > 0 (p={p}, q={q})")));
    }
    let pp = conjugate(p);
    bracket(w, cubes, None, q, Dual::Power { s: -pp, e: q / pp })
}

/// `[w]_{A_{1,q}^Q} = sup_Q avg_Q(w^q) / min_Q(w^q)`.
pub fn restricted_a1q(w: &Weight, q: f64, cubes: &CubeCollection) -> Result<CharacteristicReport> {
    bracket(w, cubes, None, q, Dual::InverseMin { s: q })
}

/// `[v]_{A_r^Q}`; `r = 1` gives `sup avg v / min v`.
pub fn restricted_ap(v: &Weight, r: f64, cubes: &CubeCollection) -> Result<CharacteristicReport> {
    if r == 1.0 {
        return restricted_a1q(v, 1.0, cubes);
    }
    if !(r > 1.0) {
        return Err(Error::InvalidExponents(format!("A_r needs r >= 1, got {r}")));
    }
    bracket(v, cubes, None, 1.0, Dual::Power { s: -1.0 / (r - 1.0), e: r - 1.0 })
}

/// Restricted characteristic for any `p >= 1` (`q` is the upper exponent).
pub fn restricted_chars(w: &Weight, p: f64, q: f64, cubes: &CubeCollection) -> Result<CharacteristicReport> {
    if p == 1.0 {
        restricted_a1q(w, q, cubes)
    } else {
        restricted_apq(w, p, q, cubes)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TildeComparison {
    /// `[w]` with sup-radius penalty at exponent `3θ`.
    pub lhs: f64,
    /// `[w]` with centered penalty at exponent `θ`.
    pub rhs: f64,
    pub ratio: f64,
    /// `[w]` with sup-radius penalty at exponent `θ`.
    pub tilde_same_theta: f64,
    /// `rhs <= tilde_same_theta`, which holds cube by cube.
    pub ordering_holds: bool,
}

/// Compares the centered and sup-radius `A_p` brackets.
pub fn tilde_comparison(
    w: &Weight,
    e: &ExponentSet,
    psi: &PsiFunctional,
    cubes: &CubeCollection,
) -> Result<TildeComparison> {
    use crate::potential::PsiMode;
    let centered = psi.with_mode(PsiMode::Centered);
    let sup = psi.with_mode(PsiMode::Sup);
    let rhs = ap_theta(w, e, &centered, cubes)?;
    let same = ap_theta(w, e, &sup, cubes)?;
    let lhs = ap_theta(w, &e.with_theta(3.0 * e.theta), &sup.with_theta(3.0 * e.theta)?, cubes)?;
    let ordering_holds = rhs
        .per_cube
        .iter()
        .zip(&same.per_cube)
        .all(|(a, b)| a.log_product <= b.log_product + 1e-12);
    Ok(TildeComparison {
        lhs: lhs.value,
        rhs: rhs.value,
        ratio: lhs.value / rhs.value,
        tilde_same_theta: same.value,
        ordering_holds,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::grid::{enumerate_cubes, Strategy};
    use crate::potential::{Potential, PsiMode, RadiusField};

    fn psi(grid: &Grid, v: Potential, theta: f64, mode: PsiMode) -> PsiFunctional {
        let field = Arc::new(RadiusField::for_potential(v, grid).unwrap());
        PsiFunctional::new(field, theta, mode).unwrap()
    }

    /// Direct-sum classical bracket over the exhaustive 1-D cube family.
    fn classical_oracle(w: &[f64], p: f64) -> f64 {
        let n = w.len();
        let mut best: f64 = 0.0;
        for len in 1..=n {
            for a in 0..=n - len {
                let s = &w[a..a + len];
                let m1 = s.iter().sum::<f64>() / len as f64;
                let m2 = s.iter().map(|x| x.powf(-1.0 / (p - 1.0))).sum::<f64>() / len as f64;
                best = best.max(m1 * m2.powf(p - 1.0));
            }
        }
        best
    }

    #[test]
    fn exponent_set_examples() {
        let e = ExponentSet::from_p(3.0, 2.0, 1.0, 0.0).unwrap();
        assert!((e.q - 6.0).abs() < 1e-12);
        assert!((e.k_factor() - 16.0 / 3.0).abs() < 1e-12);
        let k = e.k_factor();
        let lhs = (1.0 / k + (1.0 / k) * (e.q / e.p_prime())) * (1.0 - e.alpha / e.n) * e.sharp_exponent_factor();
        assert!((lhs - 0.5).abs() < 1e-12);
        let e = ExponentSet::new(3.0, 2.0, 6.0, 1.0, 3.0).unwrap();
        assert!((e.gamma() - 9.0 / 4.0).abs() < 1e-12);
        let g = e.gamma();
        assert!((g * e.p_prime() / e.q + g - e.theta).abs() < 1e-12);
        assert!(ExponentSet::new(3.0, 2.0, 5.0, 1.0, 0.0).is_err());
        assert!(ExponentSet::new(1.0, 1.0, 1.0, 0.0, 0.0).is_err());
        assert!(ExponentSet::from_p(1.0, 2.0, 0.6, 0.0).is_err());
    }

    #[test]
    fn constant_weight_without_potential_gives_one() {
        let grid = Grid::new(1, 1.0, 32).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None }).unwrap();
        let w = Weight::constant(&grid, 3.7).unwrap();
        for p in [1.5, 2.0, 4.0] {
            let e = ExponentSet::classical(1.0, p, 2.0).unwrap();
            let r = ap_theta(&w, &e, &psi(&grid, Potential::Zero, 2.0, PsiMode::Centered), &coll).unwrap();
            assert!((r.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_weight_with_potential_stays_below_one() {
        let grid = Grid::new(1, 4.0, 64).unwrap();
        let w = Weight::constant(&grid, 1.0).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 1.0).unwrap();
        let ps = psi(&grid, Potential::Constant { value: 1.0 }, 1.0, PsiMode::Centered);
        let mut prev = 0.0;
        for depth in [2, 4, 6] {
            let coll = enumerate_cubes(&grid, Strategy::Dyadic { depth: Some(depth), shift: 0 }).unwrap();
            let r = ap_theta(&w, &e, &ps, &coll).unwrap();
            assert!(r.value <= 1.0 && r.value >= prev);
            prev = r.value;
        }
    }

    #[test]
    fn power_weight_matches_exhaustive_oracle() {
        let grid = Grid::new(1, 1.0, 32).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::ExhaustiveSmall).unwrap();
        let w = Weight::power(&grid, 0.5).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 0.0).unwrap();
        let r = ap_theta(&w, &e, &psi(&grid, Potential::Zero, 0.0, PsiMode::Centered), &coll).unwrap();
        let oracle = classical_oracle(&w.values(), 2.0);
        assert!((r.value - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn apq_reduces_to_ap_when_alpha_zero() {
        let grid = Grid::new(1, 1.0, 32).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::ExhaustiveSmall).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = Weight::log_uniform(&grid, 1.0, &mut rng).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 0.0).unwrap();
        let ps = psi(&grid, Potential::Zero, 0.0, PsiMode::Centered);
        // A_{p,p} of w equals A_p of w^p
        let a = apq_alpha_theta(&w, &e, &ps, &coll).unwrap();
        let b = ap_theta(&w.pow(2.0), &e, &ps, &coll).unwrap();
        assert!((a.value / b.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apq_random_matches_oracle() {
        let grid = Grid::new(1, 1.0, 32).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::ExhaustiveSmall).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let w = Weight::log_uniform(&grid, 2.0, &mut rng).unwrap();
        let e = ExponentSet::from_p(1.0, 2.0, 1.0 / 3.0, 0.0).unwrap();
        let ps = psi(&grid, Potential::Zero, 0.0, PsiMode::Centered);
        let r = apq_alpha_theta(&w, &e, &ps, &coll).unwrap();
        let vals = w.values();
        let (q, pp) = (e.q, e.p_prime());
        let mut oracle: f64 = 0.0;
        for len in 1..=32 {
            for a in 0..=32 - len {
                let s = &vals[a..a + len];
                let m1 = s.iter().map(|x| x.powf(q)).sum::<f64>() / len as f64;
                let m2 = s.iter().map(|x| x.powf(-pp)).sum::<f64>() / len as f64;
                oracle = oracle.max(m1 * m2.powf(q / pp));
            }
        }
        assert!((r.value / oracle - 1.0).abs() < 1e-12);
    }

    #[test]
    fn restricted_examples() {
        let grid = Grid::new(1, 1.0, 8).unwrap();
        let single = CubeCollection::new(&grid, vec![grid.domain()], "root").unwrap();
        let one = Weight::constant(&grid, 1.0).unwrap();
        assert!((restricted_apq(&one, 2.0, 2.0, &single).unwrap().value - 1.0).abs() < 1e-14);
        let c = Weight::constant(&grid, 5.0).unwrap();
        assert!((restricted_a1q(&c, 3.0, &single).unwrap().value - 1.0).abs() < 1e-12);

        // w = 1 on the left half, 4 on the right; cubes = left half and root
        let w = Weight::from_log_fn(&grid, |x| if x[0] < 0.0 { 0.0 } else { 4f64.ln() }).unwrap();
        let left = Cube::new([-0.5, 0.0, 0.0], 1.0);
        let two = CubeCollection::new(&grid, vec![left, grid.domain()], "two").unwrap();
        // p = q = 2: left gives 1; root gives ((1+16)/2)((1+1/16)/2) = 8.5 · 17/32
        let r = restricted_apq(&w, 2.0, 2.0, &two).unwrap();
        assert!((r.value - 8.5 * 17.0 / 32.0).abs() < 1e-12);
        assert!((r.per_cube[0].product - 1.0).abs() < 1e-14);
        // p = 1, q = 1: root gives 2.5 / 1
        let r1 = restricted_a1q(&w, 1.0, &two).unwrap();
        assert!((r1.value - 2.5).abs() < 1e-12);
        assert!(restricted_apq(&w, 2.0, 2.0, &CubeCollection::new(&grid, vec![], "e").unwrap()).is_err());
    }

    #[test]
    fn duality_identity() {
        let grid = Grid::new(1, 1.0, 32).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w = Weight::log_uniform(&grid, 1.5, &mut rng).unwrap();
        let (p, q) = (2.0, 6.0);
        let (pp, qp) = (conjugate(p), conjugate(q));
        let a = restricted_apq(&w, p, q, &coll).unwrap().value;
        let b = restricted_apq(&w.pow(-1.0), qp, pp, &coll).unwrap().value;
        assert!((b / a.powf(pp / q) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tilde_ordering_and_trivial_cases() {
        let grid = Grid::new(1, 4.0, 64).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: Some(5) }).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 1.0).unwrap();
        let w = Weight::exponential(&grid, 0.1).unwrap();
        let zero = psi(&grid, Potential::Zero, 1.0, PsiMode::Centered);
        let t0 = tilde_comparison(&w, &e, &zero, &coll).unwrap();
        assert_eq!(t0.lhs, t0.rhs);
        let herm = psi(&grid, Potential::Hermite, 1.0, PsiMode::Centered);
        let t = tilde_comparison(&w, &e, &herm, &coll).unwrap();
        assert!(t.ordering_holds && t.rhs <= t.tilde_same_theta);
        let one = Weight::constant(&grid, 1.0).unwrap();
        let c = psi(&grid, Potential::Constant { value: 1.0 }, 1.0, PsiMode::Centered);
        let tc = tilde_comparison(&one, &e, &c, &coll).unwrap();
        assert!(tc.lhs <= tc.rhs);
    }

    #[test]
    fn jensen_floor_and_theta_monotonicity() {
        let grid = Grid::new(1, 2.0, 32).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: None }).unwrap();
        let w = Weight::two_valued(&grid, 2.0).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 0.0).unwrap();
        let flat = psi(&grid, Potential::Zero, 0.0, PsiMode::Centered);
        assert!(ap_theta(&w, &e, &flat, &coll).unwrap().value > 1.0);
        let herm = psi(&grid, Potential::Hermite, 0.0, PsiMode::Sup);
        let mut prev = f64::INFINITY;
        for theta in [0.0, 1.0, 2.0, 4.0] {
            let v = ap_theta(&w, &e.with_theta(theta), &herm.with_theta(theta).unwrap(), &coll)
                .unwrap()
                .value;
            assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn theta_mismatch_rejected() {
        let grid = Grid::new(1, 1.0, 8).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::Dyadic { depth: None, shift: 0 }).unwrap();
        let w = Weight::constant(&grid, 1.0).unwrap();
        let e = ExponentSet::classical(1.0, 2.0, 1.0).unwrap();
        let ps = psi(&grid, Potential::Zero, 2.0, PsiMode::Centered);
        assert!(ap_theta(&w, &e, &ps, &coll).is_err());
        assert!(Weight::from_log(grid, vec![f64::NAN; 8]).is_err());
    }
}
