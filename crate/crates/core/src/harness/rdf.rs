//! Rubio de Francia suite: the exact properties of the restricted iteration
//! on random `(g, v, Q)` instances and the fitted characteristic ratio.

use rand::Rng;
use serde_json::json;

use super::generators::{random_function, random_weight};
use super::{rng_for, CheckRecord, SuiteConfig};
use crate::error::Result;
use crate::grid::{build_lattice, Grid};
use crate::operators::{rdf_iterate, RdfNormalization, RdfReport};

pub const RDF_TRIALS: usize = 100;
pub const RDF_TERMS: usize = 60;

/// One random instance and its report.
pub fn rdf_trial<R: Rng>(rng: &mut R) -> Result<(String, RdfReport)> {
    let n = [16usize, 32, 64][rng.gen_range(0..3)];
    let grid = Grid::new(1, rng.gen_range(0.5..4.0), n)?;
    let depth = rng.gen_range(1..=grid.max_depth());
    let cubes = build_lattice(&grid, depth, 0)?.to_collection()?;
    let g = random_function(&grid, rng);
    let (label, v) = random_weight(&grid, rng)?;
    let r0 = rng.gen_range(1.0..2.0);
    let r = r0 + rng.gen_range(0.5..3.0);
    let rep = rdf_iterate(&g, &v, r0, r, &cubes, RDF_TERMS, RdfNormalization::Rigorous)?.report;
    Ok((format!("N={n} depth={depth} {label} r0={r0:.4} r={r:.4}"), rep))
}

pub fn suite(cfg: &SuiteConfig, seed: u64) -> Result<Vec<CheckRecord>> {
    let mut rng = rng_for(seed, "rdf.trials");
    let trials = cfg.trials(RDF_TRIALS);
    let mut fail = [Vec::new(), Vec::new(), Vec::new()];
    let (mut worst_norm, mut worst_tail, mut worst_char) = (0.0f64, 0.0f64, 0.0f64);
    let mut char_witness = String::new();
    for k in 0..trials {
        let (label, rep) = rdf_trial(&mut rng)?;
        let tag = format!("trial {k}: {label}");
        if !rep.dominates {
            fail[0].push(tag.clone());
        }
        if !rep.norm_doubling {
            fail[1].push(tag.clone());
        }
        if !rep.tail_honored {
            fail[2].push(tag.clone());
        }
        if rep.g_norm > 0.0 {
            worst_norm = worst_norm.max(rep.majorant_norm / rep.g_norm);
        }
        if rep.tail_bound > 0.0 {
            worst_tail = worst_tail.max(rep.tail_norm / rep.tail_bound);
        }
        if rep.characteristic_ratio > worst_char {
            worst_char = rep.characteristic_ratio;
            char_witness = tag;
        }
    }
    let params = json!({"trials": trials, "terms": RDF_TERMS, "normalization": RdfNormalization::Rigorous});
    let with_first = |rec: CheckRecord, list: &Vec<String>| match list.first() {
        Some(w) => rec.with_witness(w.clone()),
        None => rec,
    };
    Ok(vec![
        with_first(CheckRecord::assertion("rdf.dominates", params.clone(), None, fail[0].is_empty()), &fail[0]),
        with_first(
            CheckRecord::assertion("rdf.norm-doubling", params.clone(), Some(worst_norm), fail[1].is_empty()),
            &fail[1],
        ),
        with_first(
            CheckRecord::assertion("rdf.tail-bound", params.clone(), Some(worst_tail), fail[2].is_empty()),
            &fail[2],
        ),
        CheckRecord::report("rdf.characteristic-ratio", params, worst_char).with_witness(char_witness),
    ])
}
