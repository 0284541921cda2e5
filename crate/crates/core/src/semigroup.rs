//! Finite-difference `L = -d²/dx² + V` on a 1-D grid, diagonalized once,
//! with its heat semigroup, heat maximal function and negative fractional
//! powers. Kernels are reported as densities: matrix entry divided by `h`.
//!
//! For `n >= 2` only the Gaussian upper bound is available
//! ([`gaussian_bound`], [`surrogate_heat_apply`]); checks built on it are
//! one-sided.

use faer::{Mat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::numerics::logspace;
use crate::potential::{Potential, RadiusField};

pub const MAX_SPECTRAL_CELLS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Dirichlet,
    Periodic,
}

#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: Grid,
    boundary: Boundary,
    potential: Potential,
    matrix: Mat<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: Mat<f64>,
}

impl DiscreteOperator {
    pub fn new(grid: &Grid, potential: Potential, boundary: Boundary) -> Result<Self> {
        if grid.dim() != 1 {
            return Err(Error::Unsupported(format!(
                "spectral mode needs n = 1 (got n = {}); use the Gaussian surrogate",
                grid.dim()
            )));
        }
        let n = grid.cells_per_axis();
        if n > MAX_SPECTRAL_CELLS {
            return Err(Error::SizeLimit(format!("spectral mode needs N <= {MAX_SPECTRAL_CELLS}, got {n}")));
        }
        potential.validate()?;
        let h2 = grid.spacing() * grid.spacing();
        let mut matrix = Mat::<f64>::zeros(n, n);
        for i in 0..n {
            matrix[(i, i)] = 2.0 / h2 + potential.value(&grid.center(i));
            if i + 1 < n {
                matrix[(i, i + 1)] = -1.0 / h2;
                matrix[(i + 1, i)] = -1.0 / h2;
            }
        }
        if boundary == Boundary::Periodic {
            matrix[(0, n - 1)] -= 1.0 / h2;
            matrix[(n - 1, 0)] -= 1.0 / h2;
        }
        let eig = matrix
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::SingularOperator(format!("eigendecomposition failed: {e:?}")))?;
        let (u, s) = (eig.U(), eig.S());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
        let eigenvalues = order.iter().map(|&k| s[k]).collect();
        let eigenvectors = Mat::from_fn(n, n, |i, j| u[(i, order[j])]);
        Ok(Self {
            grid: *grid,
            boundary,
            potential,
            matrix,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector `j` as a grid function (unit `ℓ²` norm).
    pub fn eigenvector(&self, j: usize) -> GridFunction {
        GridFunction::new(self.grid, (0..self.eigenvalues.len()).map(|i| self.eigenvectors[(i, j)]).collect())
            .expect("finite eigenvector")
    }

    /// `max |ΦᵀΦ - I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.eigenvectors.transpose() * &self.eigenvectors;
        let n = g.nrows();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    fn coefficients(&self, f: &GridFunction) -> Result<Vec<f64>> {
        if f.grid() != &self.grid {
            return Err(Error::InvalidArgument("function lives on a different grid".into()));
        }
        let col = Mat::from_fn(f.samples().len(), 1, |i, _| f.samples()[i]);
        let c = self.eigenvectors.transpose() * &col;
        Ok((0..c.nrows()).map(|i| c[(i, 0)]).collect())
    }

    fn synthesize<F: Fn(f64) -> f64>(&self, coeffs: &[f64], multiplier: F) -> GridFunction {
        let scaled = Mat::from_fn(coeffs.len(), 1, |j, _| coeffs[j] * multiplier(self.eigenvalues[j]));
        let out = &self.eigenvectors * &scaled;
        GridFunction::new(self.grid, (0..out.nrows()).map(|i| out[(i, 0)]).collect()).expect("finite synthesis")
    }

    /// `e^{-tL} f`; `t = 0` returns `f` unchanged.
    pub fn heat_apply(&self, f: &GridFunction, t: f64) -> Result<GridFunction> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument(format!("time {t} must be >= 0")));
        }
        if t == 0.0 {
            return Ok(f.clone());
        }
        let c = self.coefficients(f)?;
        Ok(self.synthesize(&c, |l| (-t * l).exp()))
    }

    /// `e^{-tL} f` for every `t`, sharing one spectral transform.
    pub fn heat_apply_many(&self, f: &GridFunction, times: &[f64]) -> Result<Vec<GridFunction>> {
        if let Some(t) = times.iter().find(|t| !(**t >= 0.0)) {
            return Err(Error::InvalidArgument(format!("time {t} must be >= 0")));
        }
        let c = self.coefficients(f)?;
        Ok(times
            .par_iter()
            .map(|&t| {
                if t == 0.0 {
                    f.clone()
                } else {
                    self.synthesize(&c, |l| (-t * l).exp())
                }
            })
            .collect())
    }

    /// Kernel density `p_{t,L}(x_i, x_j)` as an `N × N` matrix.
    pub fn heat_kernel(&self, t: f64) -> Mat<f64> {
        self.spectral_kernel(|l| (-t * l).exp())
    }

    fn spectral_kernel<F: Fn(f64) -> f64>(&self, multiplier: F) -> Mat<f64> {
        let n = self.eigenvalues.len();
        let h = self.grid.spacing();
        let m: Vec<f64> = self.eigenvalues.iter().map(|l| multiplier(*l) / h).collect();
        let scaled = Mat::from_fn(n, n, |i, j| self.eigenvectors[(i, j)] * m[j]);
        &scaled * self.eigenvectors.transpose()
    }

    fn check_alpha(&self, alpha: f64) -> Result<()> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("α = {alpha} must be a finite nonnegative number")));
        }
        let lam0 = self.eigenvalues[0];
        let scale = self.eigenvalues[self.eigenvalues.len() - 1].abs().max(1.0);
        if alpha > 0.0 && lam0 <= 1e-10 * scale {
            return Err(Error::SingularOperator(format!("smallest eigenvalue {lam0:e} is not positive")));
        }
        Ok(())
    }

    /// `L^{-α/2} f` by the spectral formula; `α = 0` is the identity.
    pub fn frac_power_apply(&self, f: &GridFunction, alpha: f64) -> Result<GridFunction> {
        self.check_alpha(alpha)?;
        if alpha == 0.0 {
            return Ok(f.clone());
        }
        let c = self.coefficients(f)?;
        Ok(self.synthesize(&c, |l| l.powf(-alpha / 2.0)))
    }

    /// `L^{-α/2} f = Γ(α/2)^{-1} ∫_0^∞ e^{-tL} f t^{α/2 - 1} dt`, with the
    /// trapezoid rule in `log t` on `[1e-6, 1e6]` and a two-term head
    /// `∫_0^{t₀} (f - tLf) t^{s-1} dt`.
    pub fn frac_power_time_integral(&self, f: &GridFunction, alpha: f64, nodes: usize) -> Result<GridFunction> {
        self.check_alpha(alpha)?;
        if alpha == 0.0 {
            return Ok(f.clone());
        }
        let s = alpha / 2.0;
        let (t0, t1) = (1e-6, 1e6);
        let times = logspace(t0, t1, nodes);
        let du = (t1 / t0).ln() / (nodes - 1) as f64;
        let heat = self.heat_apply_many(f, &times)?;
        let mut acc = vec![0.0; f.samples().len()];
        for (k, (t, g)) in times.iter().zip(&heat).enumerate() {
            let weight = if k == 0 || k == nodes - 1 { 0.5 } else { 1.0 } * du * t.powf(s);
            for (a, v) in acc.iter_mut().zip(g.samples()) {
                *a += weight * v;
            }
        }
        let col = Mat::from_fn(f.samples().len(), 1, |i, _| f.samples()[i]);
        let lf = &self.matrix * &col;
        let lf: Vec<f64> = (0..lf.nrows()).map(|i| lf[(i, 0)]).collect();
        let head_f = t0.powf(s) / s;
        let head_lf = t0.powf(s + 1.0) / (s + 1.0);
        let norm = gamma(s);
        let out = acc
            .iter()
            .zip(f.samples())
            .zip(lf.iter())
            .map(|((a, v), l)| (a + head_f * v - head_lf * l) / norm)
            .collect();
        GridFunction::new(self.grid, out)
    }

    /// Kernel density of `L^{-α/2}`, for `0 ≤ α < n`.
    pub fn frac_kernel(&self, alpha: f64) -> Result<Mat<f64>> {
        if alpha >= self.grid.dim() as f64 {
            return Err(Error::InvalidArgument(format!("α = {alpha} must lie in [0, n) for a kernel")));
        }
        self.check_alpha(alpha)?;
        Ok(self.spectral_kernel(|l| l.powf(-alpha / 2.0)))
    }
}

fn max_entry(m: &Mat<f64>) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)]);
        }
    }
    best
}

/// `M^L f(x) = max_t |e^{-tL} f(x)|` over the given times.
pub fn maximal_heat(op: &DiscreteOperator, f: &GridFunction, times: &[f64]) -> Result<GridFunction> {
    let all = op.heat_apply_many(f, times)?;
    let mut out = vec![0.0; f.samples().len()];
    for g in &all {
        for (o, v) in out.iter_mut().zip(g.samples()) {
            *o = f64::max(*o, v.abs());
        }
    }
    GridFunction::new(*f.grid(), out)
}

/// `t^{-n/2} e^{-|x-y|²/(ct)} (1 + √t/ρ(x) + √t/ρ(y))^{-N}`.
pub fn gaussian_bound(dim: usize, t: f64, dist: f64, rho_x: f64, rho_y: f64, c: f64, decay: f64) -> f64 {
    let st = t.sqrt();
    t.powf(-(dim as f64) / 2.0) * (-dist * dist / (c * t)).exp() * (1.0 + st / rho_x + st / rho_y).powf(-decay)
}

pub const DEFAULT_GAUSSIAN_C: f64 = 5.0;

/// Entries below this fraction of the largest kernel value at a given time
/// are roundoff and are skipped.
pub const KERNEL_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct KernelBoundReport {
    pub fitted_constant: f64,
    pub argmax: (f64, f64, f64),
    pub gaussian_c: f64,
    pub decay: f64,
    /// `max (p_{t,L} - p_{t,free})` over all entries and times.
    pub max_excess_over_free: f64,
    pub dominated_by_free: bool,
}

/// Fits `C_N` in the Gaussian upper bound and checks domination by the
/// `V = 0` kernel with the same boundary condition.
pub fn heat_kernel_bound_check(
    op: &DiscreteOperator,
    rho: &RadiusField,
    times: &[f64],
    decay: f64,
    gaussian_c: f64,
) -> Result<KernelBoundReport> {
    if rho.grid() != op.grid() {
        return Err(Error::InvalidArgument("radius field lives on a different grid".into()));
    }
    let free = DiscreteOperator::new(op.grid(), Potential::Zero, op.boundary())?;
    let grid = *op.grid();
    let n = grid.cells_per_axis();
    let centers: Vec<f64> = (0..n).map(|i| grid.center(i)[0]).collect();
    let period = 2.0 * grid.half_extent();
    let dist = |i: usize, j: usize| {
        let d = (centers[i] - centers[j]).abs();
        if op.boundary() == Boundary::Periodic {
            d.min(period - d)
        } else {
            d
        }
    };
    let per_time: Vec<(f64, (f64, f64, f64), f64)> = times
        .par_iter()
        .map(|&t| {
            let k = op.heat_kernel(t);
            let kf = free.heat_kernel(t);
            let floor = KERNEL_FLOOR * max_entry(&k);
            let mut best = (0.0, (t, 0.0, 0.0));
            let mut excess: f64 = f64::NEG_INFINITY;
            for i in 0..n {
                for j in 0..n {
                    excess = excess.max(k[(i, j)] - kf[(i, j)]);
                    if k[(i, j)] < floor {
                        continue;
                    }
                    let b = gaussian_bound(1, t, dist(i, j), rho.cells()[i], rho.cells()[j], gaussian_c, decay);
                    let r = k[(i, j)] / b;
                    if r > best.0 {
                        best = (r, (t, centers[i], centers[j]));
                    }
                }
            }
            (best.0, best.1, excess)
        })
        .collect();
    let mut report = KernelBoundReport {
        fitted_constant: 0.0,
        argmax: (0.0, 0.0, 0.0),
        gaussian_c,
        decay,
        max_excess_over_free: f64::NEG_INFINITY,
        dominated_by_free: true,
    };
    for (r, arg, excess) in per_time {
        if r > report.fitted_constant {
            report.fitted_constant = r;
            report.argmax = arg;
        }
        report.max_excess_over_free = report.max_excess_over_free.max(excess);
    }
    report.dominated_by_free = report.max_excess_over_free <= 1e-12;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct FracKernelReport {
    pub fitted_constant: f64,
    pub argmax: (f64, f64),
    pub decay: f64,
}

/// Fits `C_φ` in `|K(x,y)| <= C_φ (1 + |x-y|(1/ρ(x) + 1/ρ(y)))^{-φ} |x-y|^{α-n}`
/// over off-diagonal pairs.
pub fn frac_kernel_bound_check(
    op: &DiscreteOperator,
    rho: &RadiusField,
    alpha: f64,
    decay: f64,
) -> Result<FracKernelReport> {
    let k = op.frac_kernel(alpha)?;
    let grid = op.grid();
    let n = grid.cells_per_axis();
    let mut report = FracKernelReport {
        fitted_constant: 0.0,
        argmax: (0.0, 0.0),
        decay,
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let (x, y) = (grid.center(i)[0], grid.center(j)[0]);
            let d = (x - y).abs();
            let (rx, ry) = (rho.cells()[i], rho.cells()[j]);
            let bound = (1.0 + d * (1.0 / rx + 1.0 / ry)).powf(-decay) * d.powf(alpha - 1.0);
            let r = k[(i, j)].abs() / bound;
            if r > report.fitted_constant {
                report.fitted_constant = r;
                report.argmax = (x, y);
            }
        }
    }
    Ok(report)
}

/// Constant of the free 1-D Riesz kernel `c_α |x-y|^{α-1}` of `(-d²/dx²)^{-α/2}`.
pub fn riesz_constant_1d(alpha: f64) -> f64 {
    gamma((1.0 - alpha) / 2.0) / (2f64.powf(alpha) * std::f64::consts::PI.sqrt() * gamma(alpha / 2.0))
}

/// Upper-bound surrogate for `e^{-tL} f` in any dimension: integrates `f`
/// against the Gaussian bound with constant `c_n`.
pub fn surrogate_heat_apply(
    f: &GridFunction,
    rho: &RadiusField,
    t: f64,
    c_n: f64,
    gaussian_c: f64,
    decay: f64,
) -> Result<GridFunction> {
    let grid = *f.grid();
    if rho.grid() != &grid {
        return Err(Error::InvalidArgument("radius field lives on a different grid".into()));
    }
    let vol = grid.cell_volume();
    let out = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.center(i);
            let mut s = 0.0;
            for (j, v) in f.samples().iter().enumerate() {
                if *v != 0.0 {
                    let y = grid.center(j);
                    let d = crate::grid::distance(&x, &y);
                    s += gaussian_bound(grid.dim(), t, d, rho.cells()[i], rho.cells()[j], gaussian_c, decay) * v.abs();
                }
            }
            c_n * s * vol
        })
        .collect();
    GridFunction::new(grid, out)
}
