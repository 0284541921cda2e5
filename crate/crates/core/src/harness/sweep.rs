//! Refinement sweeps: a fitted constant per grid size and a stability flag.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{fracint, heat, max_growth, twoweight, STABILITY_TOLERANCE};
use crate::error::{Error, Result};
use crate::potential::Potential;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepCheck {
    /// `C_1` of the heat domination with Hermite `V`.
    HeatDomination,
    /// Gaussian kernel bound with the default constant.
    HeatKernel,
    /// Gaussian kernel bound with the planted constant `c = 1`.
    HeatKernelWrongGaussian,
    /// Dyadic domination of `L^{-1/4}` with Hermite `V`.
    FracDomination,
    /// Two-weight ratio for a fixed power-weight pair.
    TwoWeight,
}

impl SweepCheck {
    pub const ALL: [SweepCheck; 5] = [
        Self::HeatDomination,
        Self::HeatKernel,
        Self::HeatKernelWrongGaussian,
        Self::FracDomination,
        Self::TwoWeight,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Self::HeatDomination => "heat-domination",
            Self::HeatKernel => "heat-kernel",
            Self::HeatKernelWrongGaussian => "heat-kernel-wrong-gaussian",
            Self::FracDomination => "frac-domination",
            Self::TwoWeight => "two-weight",
        }
    }

    /// Fitted constant at `cells` cells per axis.
    pub fn fitted(&self, cells: usize) -> Result<f64> {
        match self {
            Self::HeatDomination => Ok(heat::domination_constants(Potential::Hermite, cells)?[0]),
            Self::HeatKernel => heat::kernel_constant(cells, crate::semigroup::DEFAULT_GAUSSIAN_C),
            Self::HeatKernelWrongGaussian => heat::kernel_constant(cells, super::controls::WRONG_GAUSSIAN_C),
            Self::FracDomination => fracint::domination_constant(Potential::Hermite, cells),
            Self::TwoWeight => twoweight::stability_constant(cells),
        }
    }
}

impl FromStr for SweepCheck {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .find(|c| c.label() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown sweep check {s:?}")))
    }
}

impl fmt::Display for SweepCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub n: usize,
    pub fitted: f64,
}

/// Fitted constants at or above `1/ε` are set by floor-level entries rather
/// than by the bound, and count as infinite.
pub const NUMERICALLY_INFINITE: f64 = 1.0 / f64::EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityTable {
    pub check: SweepCheck,
    pub rows: Vec<StabilityRow>,
    pub max_growth: f64,
    /// Below [`NUMERICALLY_INFINITE`] everywhere and growing less than 10%
    /// per doubling; a single size is vacuously stable.
    pub stable: bool,
}

pub fn refinement_sweep(check: SweepCheck, n_list: &[usize]) -> Result<StabilityTable> {
    if n_list.iter().any(|n| !n.is_power_of_two()) || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("sweep sizes {n_list:?} must be ascending powers of two")));
    }
    let rows: Vec<StabilityRow> = n_list
        .iter()
        .map(|&n| Ok(StabilityRow { n, fitted: check.fitted(n)? }))
        .collect::<Result<_>>()?;
    Ok(table_from_rows(check, rows))
}

/// Growth is measured per doubling, so a gap of `2^k` in `N` allows `k`
/// steps of growth.
pub fn table_from_rows(check: SweepCheck, rows: Vec<StabilityRow>) -> StabilityTable {
    let per_doubling: Vec<f64> = rows
        .windows(2)
        .map(|w| {
            let steps = (w[1].n as f64 / w[0].n as f64).log2();
            let g = max_growth(&[w[0].fitted, w[1].fitted]);
            if g.is_finite() {
                (1.0 + g).powf(1.0 / steps) - 1.0
            } else {
                g
            }
        })
        .collect();
    let growth = per_doubling.into_iter().fold(0.0, f64::max);
    let finite = rows.iter().all(|r| r.fitted < NUMERICALLY_INFINITE);
    StabilityTable {
        check,
        rows,
        max_growth: growth,
        stable: finite && growth < STABILITY_TOLERANCE,
    }
}
