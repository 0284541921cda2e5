//! Verification suites: randomized generators, per-check records with fitted
//! constants, refinement sweeps and planted negative controls.
//!
//! Every check draws from its own generator, seeded from the run seed and
//! the check's id, so suites can run in parallel and reports are
//! reproducible byte for byte.

pub mod bmo;
pub mod controls;
pub mod fracint;
pub mod generators;
pub mod heat;
pub mod maximal;
pub mod rdf;
pub mod rho;
pub mod sweep;
pub mod twoweight;
pub mod weights;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use sweep::{refinement_sweep, StabilityRow, StabilityTable, SweepCheck};

/// Whether a check asserts an inequality or only reports a fitted constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Assertion,
    Report,
    /// A planted bug; `pass` means the harness caught it.
    NegativeControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check: String,
    pub params: Value,
    pub fitted_constant: Option<f64>,
    pub pass: bool,
    pub kind: CheckKind,
    /// Where the fitted constant is attained (cube, point, time or trial).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn assertion(check: impl Into<String>, params: Value, fitted: Option<f64>, pass: bool) -> Self {
        Self {
            check: check.into(),
            params,
            fitted_constant: fitted,
            pass,
            kind: CheckKind::Assertion,
            witness: None,
        }
    }

    /// A report-only check passes when its fitted constant is finite.
    pub fn report(check: impl Into<String>, params: Value, fitted: f64) -> Self {
        Self {
            check: check.into(),
            params,
            fitted_constant: Some(fitted),
            pass: fitted.is_finite(),
            kind: CheckKind::Report,
            witness: None,
        }
    }

    pub fn control(check: impl Into<String>, params: Value, fitted: Option<f64>, detected: bool) -> Self {
        Self {
            check: check.into(),
            params,
            fitted_constant: fitted,
            pass: detected,
            kind: CheckKind::NegativeControl,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "{status} {}", self.check)?;
        if let Some(c) = self.fitted_constant {
            write!(f, " fitted={c:.6e}")?;
        }
        if let Some(w) = &self.witness {
            write!(f, " at {w}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.checks.iter().filter(|c| c.pass).count()
    }

    pub fn failed(&self) -> usize {
        self.checks.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Rho,
    Weights,
    Bmo,
    Maximal,
    Heat,
    Fracint,
    Rdf,
    Twoweight,
    All,
}

impl Suite {
    pub const MEMBERS: [Suite; 8] = [
        Suite::Rho,
        Suite::Weights,
        Suite::Bmo,
        Suite::Maximal,
        Suite::Heat,
        Suite::Fracint,
        Suite::Rdf,
        Suite::Twoweight,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Rho => "rho",
            Self::Weights => "weights",
            Self::Bmo => "bmo",
            Self::Maximal => "maximal",
            Self::Heat => "heat",
            Self::Fracint => "fracint",
            Self::Rdf => "rdf",
            Self::Twoweight => "twoweight",
            Self::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::MEMBERS
            .iter()
            .chain([Suite::All].iter())
            .find(|m| m.label() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parameter matrix shared by the suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub p_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    /// Multiplies every randomized trial count (at least one trial each).
    pub trial_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            p_values: vec![1.5, 2.0, 4.0],
            theta_values: vec![1.0, 2.0, 4.0],
            trial_scale: 1.0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(p) = self.p_values.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return Err(Error::Config(format!("suite exponent p = {p} must be finite and > 1")));
        }
        if let Some(t) = self.theta_values.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::Config(format!("suite θ = {t} must be finite and > 0")));
        }
        if !(self.trial_scale > 0.0 && self.trial_scale.is_finite()) {
            return Err(Error::Config(format!("trial scale {} must be positive", self.trial_scale)));
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.p_values.is_empty() || self.theta_values.is_empty()
    }

    pub fn trials(&self, base: usize) -> usize {
        ((base as f64 * self.trial_scale).round() as usize).max(1)
    }
}

/// Generator for one check: the run seed mixed with an FNV-1a hash of the
/// check id.
pub fn rng_for(seed: u64, check: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in check.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(h ^ seed.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// Runs one suite, or every suite in parallel followed by the negative
/// controls for [`Suite::All`]. An empty parameter matrix yields an empty
/// report.
pub fn run_suite(suite: Suite, cfg: &SuiteConfig, seed: u64) -> Result<SuiteReport> {
    cfg.validate()?;
    let mut report = SuiteReport {
        suite: suite.label().to_string(),
        seed,
        checks: Vec::new(),
    };
    if cfg.is_empty() {
        return Ok(report);
    }
    let members: Vec<Suite> = match suite {
        Suite::All => Suite::MEMBERS.to_vec(),
        one => vec![one],
    };
    let parts: Vec<Vec<CheckRecord>> = members.par_iter().map(|s| run_member(*s, cfg, seed)).collect::<Result<_>>()?;
    report.checks = parts.into_iter().flatten().collect();
    if suite == Suite::All {
        report.checks.extend(controls::suite(cfg, seed)?);
    }
    Ok(report)
}

fn run_member(suite: Suite, cfg: &SuiteConfig, seed: u64) -> Result<Vec<CheckRecord>> {
    match suite {
        Suite::Rho => rho::suite(cfg, seed),
        Suite::Weights => weights::suite(cfg, seed),
        Suite::Bmo => bmo::suite(cfg, seed),
        Suite::Maximal => maximal::suite(cfg, seed),
        Suite::Heat => heat::suite(cfg, seed),
        Suite::Fracint => fracint::suite(cfg, seed),
        Suite::Rdf => rdf::suite(cfg, seed),
        Suite::Twoweight => twoweight::suite(cfg, seed),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

/// Largest relative growth between consecutive entries; 0 for fewer than
/// two entries.
pub fn max_growth(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] - 1.0 } else if w[1] > 0.0 { f64::INFINITY } else { 0.0 })
        .fold(0.0, f64::max)
}

/// Growth per refinement step that still counts as stable.
pub const STABILITY_TOLERANCE: f64 = 0.10;
