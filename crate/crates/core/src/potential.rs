//! Potentials `V >= 0`, the reverse Hölder constant, the critical radius
//! `ρ(x)` and the cube penalties `ψ_θ` / `ψ̃_θ`.
//!
//! The critical radius is the radius `r*` at which the scale-invariant ball
//! mass `F(r) = r^{2-n} ∫_{B(x,r)} V` crosses 1. It is small where `V` is
//! large; for `V = |x|²` it behaves like `(1 + |x|)^{-1}`. When `F` never
//! reaches 1 below the search ceiling (for instance `V ≡ 0`) the radius is
//! `f64::INFINITY` and every penalty equals 1.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{distance, norm, CellRange, Cube, CubeCollection, Grid, GridFunction, Point};
use crate::numerics::{integrate_gl, unit_ball_volume};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum Potential {
    Zero,
    Constant { value: f64 },
    #[serde(rename = "power")]
    PowerLaw { exponent: f64 },
    /// `|x|²`.
    Hermite,
}

impl Potential {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant { value } if !(value.is_finite() && value >= 0.0) => Err(
                Error::InvalidArgument(format!("constant potential {value} must be finite and >= 0")),
            ),
            Self::PowerLaw { exponent } if !(exponent.is_finite() && exponent >= 0.0) => Err(
                Error::InvalidArgument(format!("power-law exponent {exponent} must be >= 0")),
            ),
            _ => Ok(()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero | Self::Constant { value: 0.0 })
    }

    pub fn value(&self, x: &Point) -> f64 {
        match *self {
            Self::Zero => 0.0,
            Self::Constant { value } => value,
            Self::PowerLaw { exponent } => norm(x).powf(exponent),
            Self::Hermite => {
                let r = norm(x);
                r * r
            }
        }
    }

    pub fn sample(&self, grid: &Grid) -> GridFunction {
        grid.sample(|x| self.value(x))
    }

    pub fn label(&self) -> String {
        match *self {
            Self::Zero => "zero".into(),
            Self::Constant { value } => format!("constant({value})"),
            Self::PowerLaw { exponent } => format!("power({exponent})"),
            Self::Hermite => "hermite".into(),
        }
    }

    /// `∫_{B(x,r)} V` over the full space (no truncation to any box).
    pub fn ball_integral(&self, dim: usize, x: &Point, r: f64) -> f64 {
        let omega = unit_ball_volume(dim);
        let d = norm(x);
        match *self {
            Self::Zero => 0.0,
            Self::Constant { value } => value * omega * r.powi(dim as i32),
            Self::Hermite => omega * r.powi(dim as i32) * (d * d + dim as f64 * r * r / (dim as f64 + 2.0)),
            Self::PowerLaw { exponent: a } => {
                if a == 0.0 {
                    omega * r.powi(dim as i32)
                } else if a == 2.0 {
                    Self::Hermite.ball_integral(dim, x, r)
                } else if d == 0.0 {
                    let n = dim as f64;
                    n * omega * r.powf(n + a) / (n + a)
                } else {
                    power_ball_integral(dim, a, d, r)
                }
            }
        }
    }

    /// `F(r) = r^{2-n} ∫_{B(x,r)} V`.
    pub fn ball_functional(&self, dim: usize, x: &Point, r: f64) -> f64 {
        r.powi(2 - dim as i32) * self.ball_integral(dim, x, r)
    }
}

/// `∫_{B(x,r)} |y|^a dy` with `|x| = d > 0`, integrating sphere measures of
/// radius `s` about the origin that fall inside the ball.
fn power_ball_integral(dim: usize, a: f64, d: f64, r: f64) -> f64 {
    if dim == 1 {
        let g = |y: f64| y.signum() * y.abs().powf(a + 1.0) / (a + 1.0);
        return g(d + r) - g(d - r);
    }
    let n = dim as f64;
    let sphere = n * unit_ball_volume(dim);
    let mut total = 0.0;
    if d < r {
        total += sphere * (r - d).powf(n + a) / (n + a);
    }
    let (s_lo, s_hi) = ((d - r).abs(), d + r);
    let mid = 0.5 * (s_lo + s_hi);
    let half = 0.5 * (s_hi - s_lo);
    // s = mid + half·sin φ smooths the square-root edges of the 2-D arc length
    let partial = |phi: f64| {
        let s = mid + half * phi.sin();
        let ds = half * phi.cos();
        if s <= 0.0 {
            return 0.0;
        }
        let measure = if dim == 2 {
            let c = ((s * s + d * d - r * r) / (2.0 * s * d)).clamp(-1.0, 1.0);
            2.0 * s * c.acos()
        } else {
            PI * s * (r * r - (s - d) * (s - d)).max(0.0) / d
        };
        s.powf(a) * measure * ds
    };
    total + integrate_gl(partial, -PI / 2.0, PI / 2.0, 8)
}

#[derive(Debug, Clone, Serialize)]
pub struct ReverseHolderReport {
    pub sigma: f64,
    /// `None` when every cube is degenerate (the vacuous case `V ≡ 0`).
    pub constant: Option<f64>,
    pub argmax: Option<Cube>,
    /// Cubes where `avg V = 0` although `V` is not identically zero.
    pub exceptions: Vec<Cube>,
    pub collection: String,
}

/// `sup_Q (avg_Q V^σ)^{1/σ} / avg_Q V` over the collection; `σ = ∞` uses the
/// maximum over the cube.
pub fn reverse_holder_check(
    potential: &Potential,
    sigma: f64,
    cubes: &CubeCollection,
) -> Result<ReverseHolderReport> {
    let grid = cubes.grid();
    let dim = grid.dim() as f64;
    if !(sigma >= dim / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "reverse Hölder exponent {sigma} must be >= n/2 = {}",
            dim / 2.0
        )));
    }
    cubes.ensure_nonempty()?;
    let v = potential.sample(grid);
    let samples = v.samples();
    let per_cube: Vec<Option<f64>> = cubes
        .ranges()
        .par_iter()
        .map(|range| {
            let count = range.count() as f64;
            let avg: f64 = range.indices().map(|i| samples[i]).sum::<f64>() / count;
            if avg <= 0.0 {
                return None;
            }
            if sigma.is_infinite() {
                Some(range.indices().map(|i| samples[i]).fold(0.0, f64::max) / avg)
            } else {
                let m: f64 = range.indices().map(|i| (samples[i] / avg).powf(sigma)).sum::<f64>() / count;
                Some(m.powf(1.0 / sigma))
            }
        })
        .collect();
    let mut constant: Option<f64> = None;
    let mut argmax = None;
    let mut exceptions = Vec::new();
    for (cube, (value, range)) in cubes.cubes().iter().zip(per_cube.iter().zip(cubes.ranges())) {
        match value {
            Some(c) => {
                if constant.is_none_or(|best| *c > best) {
                    constant = Some(*c);
                    argmax = Some(*cube);
                }
            }
            None => {
                if range.indices().any(|i| samples[i] > 0.0) || !potential.is_zero() {
                    exceptions.push(*cube);
                }
            }
        }
    }
    Ok(ReverseHolderReport {
        sigma,
        constant,
        argmax,
        exceptions,
        collection: cubes.tag().to_string(),
    })
}

pub const DEFAULT_RADIUS_TOLERANCE: f64 = 1e-6;

/// Root finder for `F(r) = 1` with a write-once cache of evaluated points.
#[derive(Debug)]
pub struct CriticalRadius {
    potential: Potential,
    dim: usize,
    tolerance: f64,
    r_min: f64,
    r_max: f64,
    cache: RwLock<HashMap<[u64; 3], f64>>,
}

impl CriticalRadius {
    pub fn new(potential: Potential, dim: usize) -> Result<Self> {
        potential.validate()?;
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension {dim} not in 1..=3")));
        }
        Ok(Self {
            potential,
            dim,
            tolerance: DEFAULT_RADIUS_TOLERANCE,
            r_min: 1e-3,
            r_max: 1e3,
            cache: RwLock::new(HashMap::new()),
        })
    }

    /// Bracket `[h/4, 8R]` matched to a grid.
    pub fn for_grid(potential: Potential, grid: &Grid) -> Result<Self> {
        Ok(Self::new(potential, grid.dim())?.with_bracket(grid.spacing() / 4.0, 8.0 * grid.half_extent()))
    }

    pub fn with_bracket(mut self, r_min: f64, r_max: f64) -> Self {
        self.r_min = r_min;
        self.r_max = r_max;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn functional(&self, x: &Point, r: f64) -> f64 {
        self.potential.ball_functional(self.dim, x, r)
    }

    /// `ρ(x)`, or `f64::INFINITY` when `F(r_max) < 1`.
    pub fn at(&self, x: &Point) -> Result<f64> {
        let key = [x[0].to_bits(), x[1].to_bits(), x[2].to_bits()];
        if let Some(v) = self.cache.read().expect("radius cache poisoned").get(&key) {
            return Ok(*v);
        }
        let rho = self.solve(x)?;
        self.cache
            .write()
            .expect("radius cache poisoned")
            .entry(key)
            .or_insert(rho);
        Ok(rho)
    }

    fn solve(&self, x: &Point) -> Result<f64> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {} must be > 0", self.tolerance)));
        }
        if self.potential.is_zero() || self.functional(x, self.r_max) < 1.0 {
            return Ok(f64::INFINITY);
        }
        let mut lo = self.r_min;
        let mut steps = 0;
        while self.functional(x, lo) > 1.0 {
            lo /= 2.0;
            steps += 1;
            if steps > 200 {
                return Err(Error::NonMonotone(lo));
            }
        }
        let mut hi = self.r_max;
        self.check_monotone(x, lo, hi)?;
        let mut f_lo = self.functional(x, lo);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            let f = self.functional(x, mid);
            if f < f_lo * (1.0 - 1e-12) {
                return Err(Error::NonMonotone(mid));
            }
            if f <= 1.0 {
                lo = mid;
                f_lo = f;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        let (f_a, f_b) = (self.functional(x, lo), self.functional(x, hi));
        let r = if (f_a - 1.0).abs() <= (f_b - 1.0).abs() { lo } else { hi };
        Ok(r)
    }

    fn check_monotone(&self, x: &Point, lo: f64, hi: f64) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for r in crate::numerics::logspace(lo, hi, 24) {
            let f = self.functional(x, r);
            if f < prev * (1.0 - 1e-12) {
                return Err(Error::NonMonotone(r));
            }
            prev = f;
        }
        Ok(())
    }

    /// `|F(ρ(x)) - 1|`; zero for the infinite sentinel.
    pub fn residual(&self, x: &Point) -> Result<f64> {
        let rho = self.at(x)?;
        if rho.is_infinite() {
            return Ok(0.0);
        }
        Ok((self.functional(x, rho) - 1.0).abs())
    }
}

/// Critical radius tabulated at every cell center of a grid.
#[derive(Debug)]
pub struct RadiusField {
    radius: Arc<CriticalRadius>,
    grid: Grid,
    cells: Vec<f64>,
}

impl RadiusField {
    pub fn new(radius: Arc<CriticalRadius>, grid: &Grid) -> Result<Self> {
        let cells = (0..grid.len())
            .into_par_iter()
            .map(|i| radius.at(&grid.center(i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            radius,
            grid: *grid,
            cells,
        })
    }

    pub fn for_potential(potential: Potential, grid: &Grid) -> Result<Self> {
        Self::new(Arc::new(CriticalRadius::for_grid(potential, grid)?), grid)
    }

    pub fn radius(&self) -> &CriticalRadius {
        &self.radius
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn at_center(&self, cube: &Cube) -> Result<f64> {
        self.radius.at(&cube.center)
    }

    /// `max(ρ(c_Q), max of ρ over the cell centers of Q)`.
    pub fn sup_over(&self, cube: &Cube, range: &CellRange) -> Result<f64> {
        let inner = range.indices().map(|i| self.cells[i]).fold(0.0, f64::max);
        Ok(inner.max(self.at_center(cube)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiMode {
    /// Radius at the cube center.
    Centered,
    /// Largest radius over the cube.
    Sup,
}

/// `(1 + ℓ(Q)/ρ)^θ` with `ρ` chosen by the mode.
#[derive(Debug, Clone)]
pub struct PsiFunctional {
    theta: f64,
    mode: PsiMode,
    field: Arc<RadiusField>,
}

impl PsiFunctional {
    pub fn new(field: Arc<RadiusField>, theta: f64, mode: PsiMode) -> Result<Self> {
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::InvalidArgument(format!("theta {theta} must be finite and >= 0")));
        }
        Ok(Self { theta, mode, field })
    }

    pub fn with_theta(&self, theta: f64) -> Result<Self> {
        Self::new(self.field.clone(), theta, self.mode)
    }

    pub fn with_mode(&self, mode: PsiMode) -> Self {
        Self {
            mode,
            ..self.clone()
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mode(&self) -> PsiMode {
        self.mode
    }

    pub fn field(&self) -> &Arc<RadiusField> {
        &self.field
    }

    pub fn grid(&self) -> &Grid {
        self.field.grid()
    }

    pub fn radius_of(&self, cube: &Cube, range: &CellRange) -> Result<f64> {
        match self.mode {
            PsiMode::Centered => self.field.at_center(cube),
            PsiMode::Sup => self.field.sup_over(cube, range),
        }
    }

    pub fn value(&self, cube: &Cube) -> Result<f64> {
        let range = self.field.grid().cell_range(cube)?;
        self.value_with_range(cube, &range)
    }

    pub fn value_with_range(&self, cube: &Cube, range: &CellRange) -> Result<f64> {
        let rho = self.radius_of(cube, range)?;
        Ok(penalty(cube.side, rho, self.theta))
    }

    /// Penalty of every cube in the collection, in collection order.
    pub fn values(&self, cubes: &CubeCollection) -> Result<Vec<f64>> {
        let radii = self.radii(cubes)?;
        Ok(cubes
            .cubes()
            .iter()
            .zip(radii)
            .map(|(c, rho)| penalty(c.side, rho, self.theta))
            .collect())
    }

    pub fn radii(&self, cubes: &CubeCollection) -> Result<Vec<f64>> {
        cubes
            .cubes()
            .par_iter()
            .zip(cubes.ranges().par_iter())
            .map(|(c, r)| self.radius_of(c, r))
            .collect()
    }
}

/// `(1 + side/ρ)^θ`; equals 1 for `ρ = ∞`.
pub fn penalty(side: f64, rho: f64, theta: f64) -> f64 {
    (1.0 + side / rho).powf(theta)
}

#[derive(Debug, Clone, Serialize)]
pub struct PairFit {
    pub k0: f64,
    pub c0: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub potential: String,
    pub sentinel: bool,
    /// Smallest `C₀` for each tried `k₀`, and the overall best.
    pub comparability: Vec<PairFit>,
    pub best: Option<PairFit>,
    pub max_residual: f64,
    pub residual_ok: bool,
    /// Largest observed `log₂(∫_{2B} V / ∫_B V)`.
    pub doubling_order: Option<f64>,
    /// Smallest observed decay exponent of `F` between two radii.
    pub decay_exponent: Option<f64>,
    /// Fitted constants of the two-branch bound on `r² avg_B V`.
    pub small_ball_constant: Option<f64>,
    pub large_ball_constant: Option<f64>,
}

/// Fits the constants relating `ρ` at nearby points, checks `F(ρ) = 1`, and
/// estimates the doubling order and decay exponent of `V` on sampled balls.
pub fn regularity_diagnostics(radius: &CriticalRadius, points: &[Point]) -> Result<DiagnosticsReport> {
    let potential = radius.potential();
    let rhos = points.iter().map(|x| radius.at(x)).collect::<Result<Vec<_>>>()?;
    let sentinel = rhos.iter().any(|r| r.is_infinite());
    let mut report = DiagnosticsReport {
        potential: potential.label(),
        sentinel,
        comparability: Vec::new(),
        best: None,
        max_residual: 0.0,
        residual_ok: true,
        doubling_order: None,
        decay_exponent: None,
        small_ball_constant: None,
        large_ball_constant: None,
    };
    if sentinel || points.is_empty() {
        return Ok(report);
    }
    for x in points {
        report.max_residual = report.max_residual.max(radius.residual(x)?);
    }
    report.residual_ok = report.max_residual <= radius.tolerance();

    // C₀^{-1} ρ(x)(1+d/ρ(x))^{-k₀} <= ρ(y) <= C₀ ρ(x)(1+d/ρ(x))^{k₀/(k₀+1)}
    for k0 in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0] {
        let mut c0: f64 = 1.0;
        for (x, rx) in points.iter().zip(&rhos) {
            for (y, ry) in points.iter().zip(&rhos) {
                let t = 1.0 + distance(x, y) / rx;
                c0 = c0.max(ry / (rx * t.powf(k0 / (k0 + 1.0))));
                c0 = c0.max(rx * t.powf(-k0) / ry);
            }
        }
        report.comparability.push(PairFit { k0, c0 });
    }
    report.best = report
        .comparability
        .iter()
        .min_by(|a, b| a.c0.total_cmp(&b.c0))
        .cloned();

    let dim = radius.dim();
    let scales = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0];
    let mut doubling: f64 = f64::NEG_INFINITY;
    let mut decay: f64 = f64::INFINITY;
    for (x, rho) in points.iter().zip(&rhos) {
        for s in scales {
            let r = s * rho;
            let small = potential.ball_integral(dim, x, r);
            let big = potential.ball_integral(dim, x, 2.0 * r);
            if small > 0.0 {
                doubling = doubling.max((big / small).log2());
            }
            let (f_small, f_big) = (radius.functional(x, r), radius.functional(x, 2.0 * r));
            if f_small > 0.0 {
                decay = decay.min((f_big / f_small).log2());
            }
        }
    }
    if doubling.is_finite() {
        report.doubling_order = Some(doubling);
    }
    if decay.is_finite() {
        report.decay_exponent = Some(decay);
    }
    if let (Some(n0), Some(s0)) = (report.doubling_order, report.decay_exponent) {
        let omega = unit_ball_volume(dim);
        let (mut small_c, mut large_c): (f64, f64) = (0.0, 0.0);
        for (x, rho) in points.iter().zip(&rhos) {
            for s in scales {
                let r = s * rho;
                // r² avg_B V = F(r) / ω_n
                let lhs = radius.functional(x, r) / omega;
                if r <= *rho {
                    small_c = small_c.max(lhs / s.powf(s0));
                } else {
                    large_c = large_c.max(lhs / s.powf(n0 + 2.0 - dim as f64));
                }
            }
        }
        report.small_ball_constant = Some(small_c);
        report.large_ball_constant = Some(large_c);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{enumerate_cubes, point, Strategy};

    #[test]
    fn ball_integral_closed_forms() {
        let c = 0.7;
        let v = Potential::Constant { value: c }.ball_integral(3, &[0.0; 3], 1.0);
        assert!((v - c * 4.0 * PI / 3.0).abs() < 1e-14);
        let h = Potential::Hermite.ball_integral(3, &[0.0; 3], 1.0);
        assert!((h - 4.0 * PI / 5.0).abs() < 1e-14);
        assert_eq!(Potential::Zero.ball_integral(2, &[0.3, 0.0, 0.0], 2.0), 0.0);
    }

    fn brute_force_ball(dim: usize, a: f64, x: &Point, r: f64, m: usize) -> f64 {
        // midpoint rule on the bounding box
        let h = 2.0 * r / m as f64;
        let mut total = 0.0;
        let range = if dim == 3 { m } else { 1 };
        for i in 0..m {
            for j in 0..m {
                for k in 0..range {
                    let mut y = [0.0; 3];
                    y[0] = x[0] - r + (i as f64 + 0.5) * h;
                    y[1] = x[1] - r + (j as f64 + 0.5) * h;
                    if dim == 3 {
                        y[2] = x[2] - r + (k as f64 + 0.5) * h;
                    }
                    if distance(&y, x) < r {
                        total += norm(&y).powf(a);
                    }
                }
            }
        }
        total * h.powi(dim as i32)
    }

    #[test]
    fn power_ball_integral_matches_brute_force() {
        for (dim, a, x, r) in [
            (2, 1.5, point(&[0.7, -0.2]), 0.5),
            (2, 0.5, point(&[0.3, 0.1]), 1.0),
            (3, 1.0, point(&[0.5, 0.5, 0.0]), 0.4),
            (3, 3.0, point(&[0.2, 0.0, 0.1]), 1.0),
        ] {
            let m = if dim == 2 { 1200 } else { 160 };
            let exact = Potential::PowerLaw { exponent: a }.ball_integral(dim, &x, r);
            let brute = brute_force_ball(dim, a, &x, r, m);
            assert!((exact / brute - 1.0).abs() < 5e-3, "dim={dim} a={a}: {exact} vs {brute}");
        }
        let x = 0.4;
        let one_d = Potential::PowerLaw { exponent: 0.5 }.ball_integral(1, &[x, 0.0, 0.0], 1.0);
        let exact = (1.4f64.powf(1.5) + 0.6f64.powf(1.5)) / 1.5;
        assert!((one_d - exact).abs() < 1e-13);
    }

    #[test]
    fn hermite_general_formula_agrees_with_shells() {
        // exponent 2 through the general shell path
        let x = point(&[0.8, 0.3, -0.1]);
        let shells = power_ball_integral(3, 2.0, norm(&x), 0.6);
        let closed = Potential::Hermite.ball_integral(3, &x, 0.6);
        assert!((shells / closed - 1.0).abs() < 1e-10);
        let x = point(&[0.8, 0.3]);
        let shells = power_ball_integral(2, 2.0, norm(&x), 1.1);
        let closed = Potential::Hermite.ball_integral(2, &x, 1.1);
        assert!((shells / closed - 1.0).abs() < 1e-6);
    }

    #[test]
    fn critical_radius_constant_examples() {
        let r3 = CriticalRadius::new(Potential::Constant { value: 3.0 / (4.0 * PI) }, 3).unwrap();
        assert!((r3.at(&[0.0; 3]).unwrap() - 1.0).abs() < 1e-9);
        let r1 = CriticalRadius::new(Potential::Constant { value: 0.5 }, 1).unwrap();
        assert!((r1.at(&[0.0; 3]).unwrap() - 1.0).abs() < 1e-9);
        assert!(r1.residual(&[0.3, 0.0, 0.0]).unwrap() < 1e-9);
        let r0 = CriticalRadius::new(Potential::Zero, 3).unwrap();
        assert!(r0.at(&[0.0; 3]).unwrap().is_infinite());
    }

    #[test]
    fn doubling_constant_divides_radius_by_sqrt2() {
        let a = CriticalRadius::new(Potential::Constant { value: 0.3 }, 1).unwrap();
        let b = CriticalRadius::new(Potential::Constant { value: 0.6 }, 1).unwrap();
        let ratio = a.at(&[0.0; 3]).unwrap() / b.at(&[0.0; 3]).unwrap();
        assert!((ratio - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn hermite_radius_in_band() {
        for dim in [1, 3] {
            let radius = CriticalRadius::new(Potential::Hermite, dim).unwrap();
            let vals: Vec<f64> = (0..=32)
                .map(|k| {
                    let x = point(&[k as f64 * 0.25]);
                    radius.at(&x).unwrap() * (1.0 + norm(&x))
                })
                .collect();
            let max = vals.iter().cloned().fold(0.0, f64::max);
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(max / min < 10.0, "dim={dim}: {min}..{max}");
        }
    }

    #[test]
    fn psi_examples() {
        let grid = Grid::new(3, 2.0, 4).unwrap();
        let field = Arc::new(RadiusField::for_potential(Potential::Constant { value: 3.0 / (4.0 * PI) }, &grid).unwrap());
        let psi = PsiFunctional::new(field.clone(), 1.0, PsiMode::Centered).unwrap();
        let q = Cube::new([0.0; 3], 2.0);
        assert!((psi.value(&q).unwrap() - 3.0).abs() < 1e-6);
        let flat = psi.with_theta(0.0).unwrap();
        assert_eq!(flat.value(&q).unwrap(), 1.0);

        let zero = Arc::new(RadiusField::for_potential(Potential::Zero, &grid).unwrap());
        let psi0 = PsiFunctional::new(zero, 3.0, PsiMode::Sup).unwrap();
        assert_eq!(psi0.value(&q).unwrap(), 1.0);
    }

    #[test]
    fn psi_power_identity_and_sup_dominates_center() {
        let grid = Grid::new(1, 4.0, 64).unwrap();
        let field = Arc::new(RadiusField::for_potential(Potential::Hermite, &grid).unwrap());
        let coll = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: Some(4) }).unwrap();
        let psi = PsiFunctional::new(field, 1.5, PsiMode::Centered).unwrap();
        let p = 2.5;
        let a = psi.values(&coll).unwrap();
        let b = psi.with_theta(1.5 * p).unwrap().values(&coll).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.powf(p) / y - 1.0).abs() < 1e-12);
        }
        let sup = psi.with_mode(PsiMode::Sup);
        let rc = psi.radii(&coll).unwrap();
        let rs = sup.radii(&coll).unwrap();
        for (c, s) in rc.iter().zip(&rs) {
            assert!(s >= c);
        }
    }

    #[test]
    fn reverse_holder_examples() {
        let grid = Grid::new(1, 2.0, 64).unwrap();
        let coll = enumerate_cubes(&grid, Strategy::DyadicAllShifts { depth: Some(5) }).unwrap();
        let c = reverse_holder_check(&Potential::Constant { value: 2.0 }, 2.0, &coll).unwrap();
        assert!((c.constant.unwrap() - 1.0).abs() < 1e-12);
        let h = reverse_holder_check(&Potential::Hermite, 2.0, &coll).unwrap();
        assert!(h.constant.unwrap().is_finite());
        assert!(h.exceptions.is_empty());
        let z = reverse_holder_check(&Potential::Zero, 2.0, &coll).unwrap();
        assert!(z.constant.is_none() && z.exceptions.is_empty());
        assert!(reverse_holder_check(&Potential::Hermite, 0.2, &coll).is_err());
    }

    #[test]
    fn diagnostics_for_constant_and_zero() {
        let radius = CriticalRadius::new(Potential::Constant { value: 0.5 }, 1).unwrap();
        let pts: Vec<Point> = (0..9).map(|k| point(&[k as f64 * 0.5 - 2.0])).collect();
        let rep = regularity_diagnostics(&radius, &pts).unwrap();
        let best = rep.best.unwrap();
        assert!((best.c0 - 1.0).abs() < 1e-9);
        assert!(rep.residual_ok);
        assert!((rep.doubling_order.unwrap() - 1.0).abs() < 1e-9);

        let zero = CriticalRadius::new(Potential::Zero, 1).unwrap();
        let rep = regularity_diagnostics(&zero, &pts).unwrap();
        assert!(rep.sentinel && rep.best.is_none());
    }

    #[test]
    fn serde_round_trip() {
        for p in [
            Potential::Zero,
            Potential::Constant { value: 1.5 },
            Potential::PowerLaw { exponent: 2.0 },
            Potential::Hermite,
        ] {
            let s = serde_json::to_string(&p).unwrap();
            assert_eq!(serde_json::from_str::<Potential>(&s).unwrap(), p);
        }
        let p: Potential = serde_json::from_str(r#"{"family":"power","exponent":2.0}"#).unwrap();
        assert_eq!(p, Potential::PowerLaw { exponent: 2.0 });
    }
}
