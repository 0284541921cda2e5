//! Run configuration: one JSON file fixes the grid, potential, exponents,
//! weight, cube collection, seed and the per-command blocks.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Strategy};
use crate::harness::{SuiteConfig, SweepCheck};
use crate::potential::Potential;
use crate::weights::{ExponentSet, WeightFamily, WeightSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub half_extent: f64,
    pub cells: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dim, self.half_extent, self.cells)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialFamily {
    Zero,
    Constant,
    Power,
    Hermite,
}

/// A potential family with its one parameter: the constant value or the
/// power-law exponent; ignored for `zero` and `hermite`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub family: PotentialFamily,
    #[serde(default)]
    pub param: f64,
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        let v = match self.family {
            PotentialFamily::Zero => Potential::Zero,
            PotentialFamily::Constant => Potential::Constant { value: self.param },
            PotentialFamily::Power => Potential::PowerLaw { exponent: self.param },
            PotentialFamily::Hermite => Potential::Hermite,
        };
        v.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BmoBlock {
    /// Exponents `η` of the `w^η` sweep.
    pub etas: Vec<f64>,
    pub ceiling: f64,
}

impl Default for BmoBlock {
    fn default() -> Self {
        Self {
            etas: (1..=20).map(|k| 0.1 * k as f64).collect(),
            ceiling: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HeatBlock {
    pub times: Vec<f64>,
    pub thetas: Vec<f64>,
}

impl Default for HeatBlock {
    fn default() -> Self {
        Self {
            times: crate::harness::heat::heat_times(),
            thetas: crate::harness::heat::HEAT_THETAS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RdfBlock {
    pub r0: f64,
    pub r: f64,
    pub terms: usize,
}

impl Default for RdfBlock {
    fn default() -> Self {
        Self {
            r0: 1.0,
            r: 2.0,
            terms: crate::harness::rdf::RDF_TERMS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoWeightBlock {
    /// Exponent of the dual weight `σ = |x|^{sigma_power}`.
    pub sigma_power: f64,
    pub delta: f64,
    pub budget: f64,
}

impl Default for TwoWeightBlock {
    fn default() -> Self {
        Self {
            sigma_power: -0.2,
            delta: crate::harness::twoweight::ENTROPY_DELTA,
            budget: crate::harness::twoweight::TWO_WEIGHT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepBlock {
    pub check: SweepCheck,
    pub cells: Vec<usize>,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            check: SweepCheck::HeatDomination,
            cells: crate::harness::heat::HEAT_CELLS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub potential: PotentialSpec,
    pub exponents: ExponentSpec,
    pub weight: WeightSpec,
    pub collection: Strategy,
    pub seed: u64,
    pub suite: SuiteConfig,
    pub bmo: BmoBlock,
    pub heat: HeatBlock,
    pub rdf: RdfBlock,
    pub twoweight: TwoWeightBlock,
    pub sweep: SweepBlock,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec {
                dim: 1,
                half_extent: 4.0,
                cells: 64,
            },
            potential: PotentialSpec {
                family: PotentialFamily::Hermite,
                param: 0.0,
            },
            exponents: ExponentSpec {
                p: 2.0,
                q: 4.0,
                alpha: 0.25,
                theta: 1.0,
            },
            weight: WeightSpec {
                family: WeightFamily::Power,
                param: 0.3,
            },
            collection: Strategy::DyadicAllShifts { depth: None },
            seed: 0,
            suite: SuiteConfig::default(),
            bmo: BmoBlock::default(),
            heat: HeatBlock::default(),
            rdf: RdfBlock::default(),
            twoweight: TwoWeightBlock::default(),
            sweep: SweepBlock::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rejects anything inconsistent before any computation runs.
    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.grid.build().map_err(cfg)?;
        self.potential.build()?;
        self.exponent_set()?;
        self.suite.validate()?;
        if self.heat.times.is_empty() || self.heat.times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Config("heat times must be a nonempty list of finite t >= 0".into()));
        }
        if self.heat.thetas.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Config("heat θ values must be finite and >= 0".into()));
        }
        if !(self.rdf.r0 >= 1.0 && self.rdf.r > self.rdf.r0 && self.rdf.r.is_finite()) || self.rdf.terms == 0 {
            return Err(Error::Config(format!(
                "rdf block needs 1 <= r0 < r and terms > 0 (r0={}, r={}, terms={})",
                self.rdf.r0, self.rdf.r, self.rdf.terms
            )));
        }
        if !(self.twoweight.delta > 0.0 && self.twoweight.budget > 0.0) {
            return Err(Error::Config("twoweight δ and budget must be positive".into()));
        }
        if !(self.bmo.ceiling > 0.0) {
            return Err(Error::Config("bmo ceiling must be positive".into()));
        }
        let cells = &self.sweep.cells;
        if cells.is_empty() || cells.iter().any(|n| !n.is_power_of_two()) || cells.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!("sweep cells {cells:?} must be ascending powers of two")));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        self.grid.build()
    }

    pub fn potential(&self) -> Result<Potential> {
        self.potential.build()
    }

    /// The exponents with `n` taken from the grid dimension.
    pub fn exponent_set(&self) -> Result<ExponentSet> {
        let ExponentSpec { p, q, alpha, theta } = self.exponents;
        ExponentSet::new(self.grid.dim as f64, p, q, alpha, theta).map_err(|e| Error::Config(e.to_string()))
    }
}
