//! Uniform cell-centered grids on `[-R, R]^n`, grid functions, cubes,
//! dyadic lattices and finite cube collections.
//!
//! Every integral is a midpoint sum over cell centers. A cell belongs to a
//! cube when its center lies in the half-open box `[c - ℓ/2, c + ℓ/2)^n`, so
//! dyadic children partition their parent exactly. Flat cell indices run
//! with axis 0 fastest: `idx = i0 + N·i1 + N²·i2`.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// A point of ℝ^n padded with zeros up to three components, so Euclidean
/// norms need no knowledge of the dimension.
pub type Point = [f64; MAX_DIM];

pub fn norm(x: &Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn distance(x: &Point, y: &Point) -> f64 {
    let d = [x[0] - y[0], x[1] - y[1], x[2] - y[2]];
    norm(&d)
}

pub fn point(coords: &[f64]) -> Point {
    let mut p = [0.0; MAX_DIM];
    p[..coords.len()].copy_from_slice(coords);
    p
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    half_extent: f64,
    cells_per_axis: usize,
}

impl Grid {
    pub fn new(dim: usize, half_extent: f64, cells_per_axis: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(half_extent.is_finite() && half_extent > 0.0) {
            return Err(Error::InvalidGrid(format!("half extent {half_extent} must be positive")));
        }
        if cells_per_axis < 4 || !cells_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "cells per axis {cells_per_axis} must be a power of two >= 4"
            )));
        }
        Ok(Self {
            dim,
            half_extent,
            cells_per_axis,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.cells_per_axis as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of cells, `N^n`.
    pub fn len(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Maximal dyadic depth: level-`depth` cubes are single cells.
    pub fn max_depth(&self) -> usize {
        self.cells_per_axis.trailing_zeros() as usize
    }

    pub fn axis_center(&self, i: usize) -> f64 {
        -self.half_extent + (i as f64 + 0.5) * self.spacing()
    }

    pub fn unflatten(&self, idx: usize) -> [usize; MAX_DIM] {
        let n = self.cells_per_axis;
        let mut out = [0; MAX_DIM];
        let mut rest = idx;
        for slot in out.iter_mut().take(self.dim) {
            *slot = rest % n;
            rest /= n;
        }
        out
    }

    pub fn flatten(&self, multi: [usize; MAX_DIM]) -> usize {
        let n = self.cells_per_axis;
        (0..self.dim).rev().fold(0, |acc, k| acc * n + multi[k])
    }

    pub fn center(&self, idx: usize) -> Point {
        let m = self.unflatten(idx);
        let mut p = [0.0; MAX_DIM];
        for k in 0..self.dim {
            p[k] = self.axis_center(m[k]);
        }
        p
    }

    pub fn centers(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.center(i)).collect()
    }

    /// The whole domain `[-R, R]^n` as a cube.
    pub fn domain(&self) -> Cube {
        Cube::new([0.0; MAX_DIM], 2.0 * self.half_extent)
    }

    /// The single cell `idx` as a cube of side `h`.
    pub fn cell_cube(&self, idx: usize) -> Cube {
        Cube::new(self.center(idx), self.spacing())
    }

    pub fn contains_cube(&self, cube: &Cube) -> bool {
        let eps = 1e-9 * self.spacing();
        (0..self.dim).all(|k| {
            cube.center[k] - cube.side / 2.0 >= -self.half_extent - eps
                && cube.center[k] + cube.side / 2.0 <= self.half_extent + eps
        }) && (self.dim..MAX_DIM).all(|k| cube.center[k] == 0.0)
    }

    /// Index range of cells whose centers lie in `cube`.
    pub fn cell_range(&self, cube: &Cube) -> Result<CellRange> {
        if !(cube.side > 0.0) || !self.contains_cube(cube) {
            return Err(Error::Domain(cube.to_string()));
        }
        let h = self.spacing();
        let n = self.cells_per_axis as f64;
        // first index i with (i + 1/2) h - R >= a, snapped against roundoff
        let first = |a: f64| -> usize {
            let t = (a + self.half_extent) / h - 0.5;
            let r = t.round();
            let t = if (t - r).abs() < 1e-9 { r } else { t };
            t.ceil().clamp(0.0, n) as usize
        };
        let mut lo = [0; MAX_DIM];
        let mut hi = [1; MAX_DIM];
        for k in 0..self.dim {
            lo[k] = first(cube.center[k] - cube.side / 2.0);
            hi[k] = first(cube.center[k] + cube.side / 2.0);
            if hi[k] <= lo[k] {
                return Err(Error::DegenerateCube(cube.to_string()));
            }
        }
        Ok(CellRange {
            lo,
            hi,
            cells_per_axis: self.cells_per_axis,
        })
    }

    /// Samples `f` at every cell center.
    pub fn sample<F: Fn(&Point) -> f64 + Sync>(&self, f: F) -> GridFunction {
        let samples = (0..self.len())
            .into_par_iter()
            .map(|i| f(&self.center(i)))
            .collect();
        GridFunction {
            grid: *self,
            samples,
        }
    }

    /// Quantized geometry used to detect duplicate cubes. Every cube built by
    /// this crate has center and side on the `h/6` lattice.
    fn cube_key(&self, cube: &Cube) -> [i64; 4] {
        let unit = self.spacing() / 6.0;
        [
            (cube.center[0] / unit).round() as i64,
            (cube.center[1] / unit).round() as i64,
            (cube.center[2] / unit).round() as i64,
            (cube.side / unit).round() as i64,
        ]
    }
}

/// Axis-aligned box of cell indices `[lo, hi)` (unused axes are `[0, 1)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellRange {
    pub lo: [usize; MAX_DIM],
    pub hi: [usize; MAX_DIM],
    cells_per_axis: usize,
}

impl CellRange {
    pub fn count(&self) -> usize {
        (0..MAX_DIM).map(|k| self.hi[k] - self.lo[k]).product()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.cells_per_axis;
        let (lo, hi) = (self.lo, self.hi);
        (lo[2]..hi[2]).flat_map(move |k| {
            (lo[1]..hi[1]).flat_map(move |j| (lo[0]..hi[0]).map(move |i| i + n * (j + n * k)))
        })
    }

    pub fn contains(&self, multi: [usize; MAX_DIM]) -> bool {
        (0..MAX_DIM).all(|k| multi[k] >= self.lo[k] && multi[k] < self.hi[k])
    }

    pub fn intersect(&self, other: &CellRange) -> Option<CellRange> {
        let mut out = *self;
        for k in 0..MAX_DIM {
            out.lo[k] = self.lo[k].max(other.lo[k]);
            out.hi[k] = self.hi[k].min(other.hi[k]);
            if out.hi[k] <= out.lo[k] {
                return None;
            }
        }
        Some(out)
    }

    pub fn is_subset_of(&self, other: &CellRange) -> bool {
        (0..MAX_DIM).all(|k| self.lo[k] >= other.lo[k] && self.hi[k] <= other.hi[k])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    grid: Grid,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} samples, got {}",
                grid.len(),
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample {i} is not finite")));
        }
        Ok(Self { grid, samples })
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            samples: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples.iter().map(|&s| f(s)).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GridFunction, f: F) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Midpoint-rule integral over `cube`.
    pub fn integrate(&self, cube: &Cube) -> Result<f64> {
        let range = self.grid.cell_range(cube)?;
        Ok(self.integrate_range(&range))
    }

    pub fn integrate_range(&self, range: &CellRange) -> f64 {
        self.sum_range(range) * self.grid.cell_volume()
    }

    pub fn sum_range(&self, range: &CellRange) -> f64 {
        range.indices().map(|i| self.samples[i]).sum()
    }

    /// `integrate / vol(Q)` with `vol(Q)` = number of interior cells times
    /// `h^n`; averages of constants are exact.
    pub fn average(&self, cube: &Cube) -> Result<f64> {
        let range = self.grid.cell_range(cube)?;
        Ok(self.average_range(&range))
    }

    pub fn average_range(&self, range: &CellRange) -> f64 {
        self.sum_range(range) / range.count() as f64
    }

    /// Integral over the whole domain.
    pub fn total(&self) -> f64 {
        self.samples.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: Point,
    pub side: f64,
}

impl Cube {
    pub fn new(center: Point, side: f64) -> Self {
        Self { center, side }
    }

    /// Lebesgue measure `ℓ^n`.
    pub fn measure(&self, dim: usize) -> f64 {
        self.side.powi(dim as i32)
    }

    pub fn contains_point(&self, x: &Point, dim: usize) -> bool {
        (0..dim).all(|k| {
            x[k] >= self.center[k] - self.side / 2.0 && x[k] < self.center[k] + self.side / 2.0
        })
    }
}

impl fmt::Display for Cube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cube(center=[{:.6}, {:.6}, {:.6}], side={:.6})",
            self.center[0], self.center[1], self.center[2], self.side
        )
    }
}

/// Dyadic tower over the domain, translated by one of `3^n` shifts.
#[derive(Debug, Clone)]
pub struct DyadicLattice {
    grid: Grid,
    depth: usize,
    shift_index: usize,
    shift: Point,
    levels: Vec<Vec<Cube>>,
}

impl DyadicLattice {
    /// Builds levels `0..=depth`. Shift `s` has base-3 digits `d_k`; axis `k`
    /// is offset by `d_k · 2R/3`. Cubes not fully inside the domain are
    /// dropped.
    pub fn build(grid: &Grid, depth: usize, shift_index: usize) -> Result<Self> {
        if depth > grid.max_depth() {
            return Err(Error::Resolution(format!(
                "depth {depth} exceeds the grid's dyadic depth {}",
                grid.max_depth()
            )));
        }
        let shifts = 3usize.pow(grid.dim() as u32);
        if shift_index >= shifts {
            return Err(Error::InvalidArgument(format!(
                "shift index {shift_index} not below {shifts}"
            )));
        }
        let r = grid.half_extent();
        let mut shift = [0.0; MAX_DIM];
        let mut digits = shift_index;
        for s in shift.iter_mut().take(grid.dim()) {
            *s = (digits % 3) as f64 * 2.0 * r / 3.0;
            digits /= 3;
        }
        let eps = 1e-9 * grid.spacing();
        let mut levels = Vec::with_capacity(depth + 1);
        for d in 0..=depth {
            let side = 2.0 * r / (1u64 << d) as f64;
            // per-axis admissible lower corners: -R + shift + k·side within [-R, R - side]
            let mut axis_corners: Vec<Vec<f64>> = Vec::with_capacity(grid.dim());
            for s in shift.iter().take(grid.dim()) {
                let base = -r + s.rem_euclid(side);
                let mut corners = Vec::new();
                let mut k = 0usize;
                loop {
                    let lo = base + k as f64 * side;
                    if lo + side > r + eps {
                        break;
                    }
                    corners.push(lo);
                    k += 1;
                }
                axis_corners.push(corners);
            }
            let mut cubes = Vec::new();
            let counts: Vec<usize> = axis_corners.iter().map(Vec::len).collect();
            let total: usize = counts.iter().product();
            for flat in 0..total {
                let mut rest = flat;
                let mut center = [0.0; MAX_DIM];
                for k in 0..grid.dim() {
                    center[k] = axis_corners[k][rest % counts[k]] + side / 2.0;
                    rest /= counts[k];
                }
                cubes.push(Cube::new(center, side));
            }
            levels.push(cubes);
        }
        Ok(Self {
            grid: *grid,
            depth,
            shift_index,
            shift,
            levels,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn shift_index(&self) -> usize {
        self.shift_index
    }

    pub fn shift(&self) -> &Point {
        &self.shift
    }

    pub fn root(&self) -> Cube {
        self.grid.domain()
    }

    pub fn level(&self, d: usize) -> &[Cube] {
        &self.levels[d]
    }

    pub fn cubes(&self) -> impl Iterator<Item = &Cube> {
        self.levels.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn to_collection(&self) -> Result<CubeCollection> {
        CubeCollection::new(
            &self.grid,
            self.cubes().copied().collect(),
            format!("dyadic shift={} depth={}", self.shift_index, self.depth),
        )
    }
}

/// Finite strategies standing in for "all cubes".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "kebab-case")]
pub enum Strategy {
    /// Union of the `3^n` shifted lattices.
    DyadicAllShifts { depth: Option<usize> },
    /// Cubes centered at every cell with sides `2R / 2^d`.
    CenteredSweep { depth: Option<usize> },
    /// Every cube anchored at cells with side `k·h`; only for `N <= 32`, `n <= 2`.
    ExhaustiveSmall,
    /// A single (possibly shifted) lattice.
    Dyadic { depth: Option<usize>, shift: usize },
    /// Dyadic-all-shifts united with centered-sweep.
    Combined { depth: Option<usize> },
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dyadic-all-shifts" => Ok(Self::DyadicAllShifts { depth: None }),
            "centered-sweep" => Ok(Self::CenteredSweep { depth: None }),
            "exhaustive-small" => Ok(Self::ExhaustiveSmall),
            "dyadic" => Ok(Self::Dyadic { depth: None, shift: 0 }),
            "combined" => Ok(Self::Combined { depth: None }),
            other => Err(Error::InvalidArgument(format!("unknown cube strategy {other:?}"))),
        }
    }
}

impl Strategy {
    pub fn label(&self) -> &'static str {
        match self {
            Self::DyadicAllShifts { .. } => "dyadic-all-shifts",
            Self::CenteredSweep { .. } => "centered-sweep",
            Self::ExhaustiveSmall => "exhaustive-small",
            Self::Dyadic { .. } => "dyadic",
            Self::Combined { .. } => "combined",
        }
    }

    pub fn with_depth(self, depth: Option<usize>) -> Self {
        match self {
            Self::DyadicAllShifts { .. } => Self::DyadicAllShifts { depth },
            Self::CenteredSweep { .. } => Self::CenteredSweep { depth },
            Self::Dyadic { shift, .. } => Self::Dyadic { depth, shift },
            Self::Combined { .. } => Self::Combined { depth },
            Self::ExhaustiveSmall => Self::ExhaustiveSmall,
        }
    }
}

pub const EXHAUSTIVE_MAX_CELLS: usize = 32;

/// Finite, duplicate-free set of cubes, each resolved to its cell range on
/// the collection's grid.
#[derive(Debug, Clone)]
pub struct CubeCollection {
    grid: Grid,
    tag: String,
    cubes: Vec<Cube>,
    ranges: Vec<CellRange>,
}

impl CubeCollection {
    pub fn new(grid: &Grid, cubes: Vec<Cube>, tag: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(cubes.len());
        for c in &cubes {
            if !seen.insert(grid.cube_key(c)) {
                return Err(Error::DuplicateCube(c.to_string()));
            }
        }
        let ranges = cubes
            .iter()
            .map(|c| grid.cell_range(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            grid: *grid,
            tag: tag.into(),
            cubes,
            ranges,
        })
    }

    /// Like `new` but silently drops duplicates.
    pub fn deduplicated(grid: &Grid, cubes: Vec<Cube>, tag: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(cubes.len());
        let unique = cubes
            .into_iter()
            .filter(|c| seen.insert(grid.cube_key(c)))
            .collect();
        Self::new(grid, unique, tag)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn ranges(&self) -> &[CellRange] {
        &self.ranges
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cube, &CellRange)> {
        self.cubes.iter().zip(&self.ranges)
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn ensure_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(Error::EmptyCollection)
        } else {
            Ok(())
        }
    }

    /// Sub-collection keeping the cubes selected by `keep`.
    pub fn filter<F: Fn(&Cube, &CellRange) -> bool>(&self, keep: F, tag: impl Into<String>) -> Self {
        let (cubes, ranges) = self
            .iter()
            .filter(|(c, r)| keep(c, r))
            .map(|(c, r)| (*c, *r))
            .unzip();
        Self {
            grid: self.grid,
            tag: tag.into(),
            cubes,
            ranges,
        }
    }

    /// Union with `other`, dropping duplicates.
    pub fn union(&self, other: &CubeCollection, tag: impl Into<String>) -> Result<Self> {
        let mut cubes = self.cubes.clone();
        cubes.extend_from_slice(&other.cubes);
        Self::deduplicated(&self.grid, cubes, tag)
    }

    /// Any two cubes are either disjoint or nested, as in a single dyadic
    /// lattice.
    pub fn is_nested(&self) -> bool {
        let r = &self.ranges;
        (0..r.len()).all(|i| {
            (i + 1..r.len()).all(|j| {
                r[i].intersect(&r[j]).is_none() || r[i].is_subset_of(&r[j]) || r[j].is_subset_of(&r[i])
            })
        })
    }

    /// Cubes that are maximal under inclusion of their cell ranges.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| {
                !(0..self.len()).any(|j| {
                    j != i
                        && self.ranges[i].is_subset_of(&self.ranges[j])
                        && self.ranges[i] != self.ranges[j]
                })
            })
            .collect()
    }
}

pub fn build_lattice(grid: &Grid, depth: usize, shift_index: usize) -> Result<DyadicLattice> {
    DyadicLattice::build(grid, depth, shift_index)
}

pub fn enumerate_cubes(grid: &Grid, strategy: Strategy) -> Result<CubeCollection> {
    let max_depth = grid.max_depth();
    let pick_depth = |d: Option<usize>| -> Result<usize> {
        let d = d.unwrap_or(max_depth);
        if d > max_depth {
            Err(Error::Resolution(format!("depth {d} exceeds {max_depth}")))
        } else {
            Ok(d)
        }
    };
    match strategy {
        Strategy::DyadicAllShifts { depth } => {
            let depth = pick_depth(depth)?;
            let mut cubes = Vec::new();
            for s in 0..3usize.pow(grid.dim() as u32) {
                cubes.extend(DyadicLattice::build(grid, depth, s)?.cubes().copied());
            }
            CubeCollection::deduplicated(grid, cubes, strategy.label())
        }
        Strategy::CenteredSweep { depth } => {
            let depth = pick_depth(depth)?;
            let mut cubes = Vec::new();
            for d in 0..=depth {
                let side = 2.0 * grid.half_extent() / (1u64 << d) as f64;
                for i in 0..grid.len() {
                    let c = Cube::new(grid.center(i), side);
                    if grid.contains_cube(&c) {
                        cubes.push(c);
                    }
                }
            }
            CubeCollection::deduplicated(grid, cubes, strategy.label())
        }
        Strategy::ExhaustiveSmall => {
            let n = grid.cells_per_axis();
            if n > EXHAUSTIVE_MAX_CELLS || grid.dim() > 2 {
                return Err(Error::SizeLimit(format!(
                    "exhaustive enumeration needs N <= {EXHAUSTIVE_MAX_CELLS} and n <= 2 (got N={n}, n={})",
                    grid.dim()
                )));
            }
            let h = grid.spacing();
            let r = grid.half_extent();
            let mut cubes = Vec::new();
            for k in 1..=n {
                let side = k as f64 * h;
                let anchors = n - k + 1;
                let total = anchors.pow(grid.dim() as u32);
                for flat in 0..total {
                    let mut rest = flat;
                    let mut center = [0.0; MAX_DIM];
                    for c in center.iter_mut().take(grid.dim()) {
                        *c = -r + (rest % anchors) as f64 * h + side / 2.0;
                        rest /= anchors;
                    }
                    cubes.push(Cube::new(center, side));
                }
            }
            CubeCollection::new(grid, cubes, strategy.label())
        }
        Strategy::Dyadic { depth, shift } => {
            let depth = pick_depth(depth)?;
            let lattice = DyadicLattice::build(grid, depth, shift)?;
            CubeCollection::new(grid, lattice.cubes().copied().collect(), strategy.label())
        }
        Strategy::Combined { depth } => {
            let a = enumerate_cubes(grid, Strategy::DyadicAllShifts { depth })?;
            let b = enumerate_cubes(grid, Strategy::CenteredSweep { depth })?;
            a.union(&b, strategy.label())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1(n: usize) -> Grid {
        Grid::new(1, 1.0, n).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0, 1.0, 8).is_err());
        assert!(Grid::new(4, 1.0, 8).is_err());
        assert!(Grid::new(1, 0.0, 8).is_err());
        assert!(Grid::new(1, 1.0, 6).is_err());
        assert!(Grid::new(1, 1.0, 2).is_err());
        let g = Grid::new(2, 3.0, 16).unwrap();
        assert_eq!(g.spacing() * 16.0, 6.0);
        assert_eq!(g.len(), 256);
        assert_eq!(g.center(0), [-3.0 + 0.1875, -3.0 + 0.1875, 0.0]);
        for idx in [0, 17, 255] {
            assert_eq!(g.flatten(g.unflatten(idx)), idx);
        }
    }

    #[test]
    fn integrate_constant_over_domain() {
        let g = g1(8);
        let f = GridFunction::constant(g, 1.0);
        assert_eq!(f.integrate(&g.domain()).unwrap(), 2.0);
        let z = GridFunction::constant(g, 0.0);
        assert_eq!(z.integrate(&Cube::new(point(&[0.25]), 0.5)).unwrap(), 0.0);
    }

    #[test]
    fn integrate_square_against_antiderivative() {
        let g = g1(1024);
        let f = g.sample(|x| x[0] * x[0]);
        let v = f.integrate(&g.domain()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn average_examples() {
        let g = g1(64);
        let f = GridFunction::constant(g, 3.25);
        assert_eq!(f.average(&Cube::new(point(&[0.1]), 0.5)).unwrap(), 3.25);
        let left = g.sample(|x| if x[0] < 0.0 { 1.0 } else { 0.0 });
        let a = left.average(&g.domain()).unwrap();
        assert!((a - 0.5).abs() <= 1.0 / 64.0);
        let odd = g.sample(|x| x[0]);
        assert!(odd.average(&Cube::new(point(&[0.0]), 1.0)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cube_errors() {
        let g = g1(8);
        let f = GridFunction::constant(g, 1.0);
        assert!(matches!(f.integrate(&Cube::new(point(&[0.9]), 0.5)), Err(Error::Domain(_))));
        // between two centers (centers at ±0.125): no cell inside
        assert!(matches!(
            f.integrate(&Cube::new(point(&[0.0]), 0.2)),
            Err(Error::DegenerateCube(_))
        ));
    }

    #[test]
    fn half_open_membership() {
        let g = g1(8); // centers at -0.875, -0.625, ...
        // [-0.875, -0.375) holds the centers -0.875 and -0.625 only
        let r = g.cell_range(&Cube::new(point(&[-0.625]), 0.5)).unwrap();
        assert_eq!((r.lo[0], r.hi[0]), (0, 2));
    }

    #[test]
    fn lattice_counts() {
        let g = g1(8);
        let l = build_lattice(&g, 2, 0).unwrap();
        assert_eq!(l.len(), 7);
        let sides: Vec<f64> = (0..=2).map(|d| l.level(d)[0].side).collect();
        assert_eq!(sides, vec![2.0, 1.0, 0.5]);
        let g2 = Grid::new(2, 1.0, 8).unwrap();
        assert_eq!(build_lattice(&g2, 1, 0).unwrap().len(), 5);
        assert!(matches!(build_lattice(&g, 4, 0), Err(Error::Resolution(_))));
    }

    #[test]
    fn shifted_lattice_matches_enumeration() {
        // oracle: enumerate translates of each level by brute force
        let g = Grid::new(1, 1.0, 32).unwrap();
        let l = build_lattice(&g, 2, 1).unwrap();
        let mut expected = Vec::new();
        for d in 0..=2u32 {
            let side = 2.0 / 2f64.powi(d as i32);
            for k in -20i32..20 {
                let lo = -1.0 + 2.0 / 3.0 + k as f64 * side;
                if lo >= -1.0 - 1e-12 && lo + side <= 1.0 + 1e-12 {
                    expected.push((lo, side));
                }
            }
        }
        let got: Vec<(f64, f64)> = l.cubes().map(|c| (c.center[0] - c.side / 2.0, c.side)).collect();
        assert_eq!(got.len(), expected.len());
        assert_eq!(got.len(), 4);
        for (a, b) in got.iter().zip(&expected) {
            assert!((a.0 - b.0).abs() < 1e-12 && a.1 == b.1);
        }
    }

    #[test]
    fn children_partition_parent() {
        let g = Grid::new(2, 2.0, 16).unwrap();
        let f = g.sample(|x| (x[0] * 1.3).sin() + x[1] * x[1]);
        for shift in 0..9 {
            let l = build_lattice(&g, 3, shift).unwrap();
            for d in 0..3 {
                for parent in l.level(d) {
                    let pr = g.cell_range(parent).unwrap();
                    let children: Vec<_> = l.level(d + 1)
                        .iter()
                        .filter(|c| g.cell_range(c).unwrap().is_subset_of(&pr))
                        .collect();
                    assert_eq!(children.len(), 4);
                    let total: f64 = children.iter().map(|c| f.integrate(c).unwrap()).sum();
                    assert!((total - f.integrate(parent).unwrap()).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn exhaustive_count_and_limit() {
        let c = enumerate_cubes(&g1(4), Strategy::ExhaustiveSmall).unwrap();
        assert_eq!(c.len(), 10);
        assert!(matches!(
            enumerate_cubes(&g1(64), Strategy::ExhaustiveSmall),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn centered_sweep_counts() {
        let g = g1(8);
        let c = enumerate_cubes(&g, Strategy::CenteredSweep { depth: None }).unwrap();
        // oracle: count in-domain cubes per side by direct inequality
        let mut expected = 0;
        for d in 0..=3 {
            let side = 2.0 / 2f64.powi(d);
            for i in 0..8 {
                let x = -1.0 + (i as f64 + 0.5) * 0.25;
                if x - side / 2.0 >= -1.0 && x + side / 2.0 <= 1.0 {
                    expected += 1;
                }
            }
        }
        assert_eq!(c.len(), expected);
        assert!(c.len() <= 32);
    }

    #[test]
    fn strategies_are_duplicate_free() {
        let g = Grid::new(2, 1.0, 8).unwrap();
        for s in ["dyadic-all-shifts", "centered-sweep", "exhaustive-small", "combined"] {
            let c = enumerate_cubes(&g, s.parse().unwrap()).unwrap();
            let mut keys: Vec<_> = c.cubes().iter().map(|q| g.cube_key(q)).collect();
            let n = keys.len();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), n, "{s}");
        }
        let dup = vec![g.domain(), g.domain()];
        assert!(matches!(CubeCollection::new(&g, dup, "x"), Err(Error::DuplicateCube(_))));
    }

    #[test]
    fn maximal_cubes_of_lattice_is_root() {
        let g = g1(16);
        let c = build_lattice(&g, 3, 0).unwrap().to_collection().unwrap();
        assert_eq!(c.maximal(), vec![0]);
    }

    #[test]
    fn single_lattice_is_nested_but_shifts_are_not() {
        let g = g1(16);
        assert!(build_lattice(&g, 3, 0).unwrap().to_collection().unwrap().is_nested());
        let all = enumerate_cubes(&g, Strategy::DyadicAllShifts { depth: Some(3) }).unwrap();
        assert!(!all.is_nested());
    }
}
