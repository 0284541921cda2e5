//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every criterion reports even when an earlier one fails.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schrodinger_weights::grid::{enumerate_cubes, point, Grid, GridFunction, Strategy};
use schrodinger_weights::harness::{
    bmo, controls, fracint, heat, max_growth, maximal, rdf, refinement_sweep, rho, run_suite, twoweight, weights,
    CheckRecord, Suite, SuiteConfig, SweepCheck,
};
use schrodinger_weights::numerics::conjugate;
use schrodinger_weights::operators::{maximal_adapted, maximal_restricted};
use schrodinger_weights::potential::{CriticalRadius, Potential, PsiFunctional, PsiMode, RadiusField};
use schrodinger_weights::twoweight::EntropyFunction;
use schrodinger_weights::weights::{ap_theta, ExponentSet, Weight};
use schrodinger_weights::Result;

const SEED: u64 = 1;

const RHO_TOLERANCE: f64 = 1e-3;
const RESIDUAL_TOLERANCE: f64 = 1e-6;
const RESIDUAL_SAMPLES: usize = 50;
const RHO_BUDGET: Duration = Duration::from_secs(5);

const HERMITE_BAND: f64 = 10.0;
const BAND_REFINEMENT_SLACK: f64 = 0.01;
const HERMITE_BUDGET: Duration = Duration::from_secs(30);

const DEGENERATION_TOLERANCE: f64 = 1e-9;
const MAXIMAL_AGREEMENT: f64 = 1e-12;

const FORWARD_TRIALS: u64 = 100;
const FORWARD_BUDGET: Duration = Duration::from_secs(120);

const EXHIBIT_CEILING: f64 = 10.0;
const EXHIBIT_CLASSICAL_FLOOR: f64 = 1e3;

const WEAK_TYPE_TOLERANCE: f64 = 1e-9;
const WEAK_TYPE_TRIALS: u64 = 200;

const GROWTH_TOLERANCE: f64 = 0.10;

const RDF_TRIALS: u64 = 100;

const SLOPE_SLACK: f64 = 0.1;

const TWO_WEIGHT_BUDGET: f64 = 10.0;
const TWO_WEIGHT_TRIALS: u64 = 50;
const NORMALIZATION_TOLERANCE: f64 = 1e-6;

const VERIFY_ALL_BUDGET: Duration = Duration::from_secs(600);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Result<Verdict> {
    Ok(Verdict {
        pass,
        detail: detail.into(),
    })
}

fn records_pass(records: &[CheckRecord]) -> bool {
    records.iter().all(|r| r.pass)
}

fn trials_of(r: &CheckRecord) -> u64 {
    r.params["trials"].as_u64().unwrap_or(0)
}

fn critical_radius_closed_forms() -> Result<Verdict> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let cases = [(3usize, 3.0 / (4.0 * std::f64::consts::PI)), (1, 0.5)];
    let (mut worst_rho, mut worst_residual) = (0.0f64, 0.0f64);
    for (dim, value) in cases {
        let radius = CriticalRadius::new(Potential::Constant { value }, dim)?;
        worst_rho = worst_rho.max((radius.at(&point(&[0.0; 3][..dim]))? - 1.0).abs());
        for _ in 0..RESIDUAL_SAMPLES {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-4.0..4.0)).collect();
            worst_residual = worst_residual.max(radius.residual(&point(&x))?);
        }
    }
    let records = rho::closed_forms(SEED)?;
    let elapsed = start.elapsed();
    verdict(
        worst_rho <= RHO_TOLERANCE && worst_residual <= RESIDUAL_TOLERANCE && records_pass(&records) && elapsed < RHO_BUDGET,
        format!("|rho(0)-1| = {worst_rho:.2e}, residual {worst_residual:.2e}, {elapsed:.2?}"),
    )
}

fn hermite_asymptotics() -> Result<Verdict> {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (dim, coarse) in [(1usize, 256usize), (3, 64)] {
        let a = rho::hermite_band(dim, coarse)?;
        let b = rho::hermite_band(dim, 2 * coarse)?;
        pass &= a < HERMITE_BAND && b < HERMITE_BAND && b <= a * (1.0 + BAND_REFINEMENT_SLACK);
        parts.push(format!("n={dim}: {a:.4} -> {b:.4}"));
    }
    let elapsed = start.elapsed();
    verdict(pass && elapsed < HERMITE_BUDGET, format!("{}, {elapsed:.2?}", parts.join(", ")))
}

fn classical_degeneration() -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut psi_dev = 0.0f64;
    let mut one_dev = 0.0f64;
    let mut max_dev = 0.0f64;
    for n in [8usize, 16, 32] {
        let grid = Grid::new(1, 2.0, n)?;
        let cubes = enumerate_cubes(&grid, Strategy::ExhaustiveSmall)?;
        let field = Arc::new(RadiusField::for_potential(Potential::Zero, &grid)?);
        let one = Weight::constant(&grid, 1.0)?;
        let f = GridFunction::new(grid, (0..grid.len()).map(|_| rng.gen_range(0.0..1.0)).collect())?;
        let classical = maximal_restricted(&f, &cubes)?.function;
        for theta in [0.5, 1.0, 2.0, 4.0] {
            let psi = PsiFunctional::new(field.clone(), theta, PsiMode::Centered)?;
            psi_dev = psi_dev.max(psi.values(&cubes)?.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max));
            for p in [1.5, 2.0, 4.0] {
                let e = ExponentSet::classical(1.0, p, theta)?;
                one_dev = one_dev.max((ap_theta(&one, &e, &psi, &cubes)?.value - 1.0).abs());
                let m = maximal_adapted(&f, &e, &psi, &cubes)?.function;
                let d = m.samples().iter().zip(classical.samples()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                max_dev = max_dev.max(d);
            }
        }
    }
    let record = weights::classical_degeneration(&SuiteConfig::default(), SEED)?;
    verdict(
        psi_dev == 0.0 && one_dev <= DEGENERATION_TOLERANCE && max_dev <= MAXIMAL_AGREEMENT && record.pass,
        format!("psi-1 = {psi_dev:.1e}, [1]-1 = {one_dev:.2e}, |M^θ-M| = {max_dev:.2e}"),
    )
}

fn bmo_forward_bound() -> Result<Verdict> {
    let start = Instant::now();
    let r = bmo::forward_bound(&SuiteConfig::default(), SEED)?;
    let elapsed = start.elapsed();
    verdict(
        r.pass && trials_of(&r) == FORWARD_TRIALS && r.params["violations"] == 0 && elapsed < FORWARD_BUDGET,
        format!("{} trials, worst norm/bound {:.4}, {elapsed:.2?}", trials_of(&r), r.fitted_constant.unwrap_or(f64::NAN)),
    )
}

fn hermite_exhibit() -> Result<Verdict> {
    let ex = weights::exhibit_sweep()?;
    let hit = ex
        .sweep
        .iter()
        .filter(|(eta, adapted, classical)| *eta > 0.0 && *adapted <= EXHIBIT_CEILING && *classical > EXHIBIT_CLASSICAL_FLOOR)
        .last()
        .copied();
    match hit {
        Some((eta, adapted, classical)) => verdict(
            ex.witness == Some(eta),
            format!("eta = {eta}: adapted {adapted:.4}, classical {classical:.4e}"),
        ),
        None => verdict(false, "no eta separates the brackets"),
    }
}

fn dyadic_weak_type() -> Result<Verdict> {
    let r = maximal::weak_type(&SuiteConfig::default(), SEED)?;
    let worst = r.fitted_constant.unwrap_or(f64::INFINITY);
    verdict(
        worst <= 1.0 + WEAK_TYPE_TOLERANCE && trials_of(&r) == WEAK_TYPE_TRIALS && r.params["violations"] == 0,
        format!("{} trials, worst ratio {worst:.12}", trials_of(&r)),
    )
}

fn heat_domination() -> Result<Verdict> {
    let mut pass = true;
    let mut parts = Vec::new();
    for v in heat::domination_potentials() {
        let table = heat::domination_table(v)?;
        let finite = table.iter().flatten().all(|c| c.is_finite());
        let growth = (0..heat::HEAT_THETAS.len())
            .map(|j| max_growth(&table.iter().map(|row| row[j]).collect::<Vec<_>>()))
            .fold(0.0, f64::max);
        let monotone = table.iter().all(|row| row.windows(2).all(|w| w[1] <= w[0]));
        pass &= finite && growth < GROWTH_TOLERANCE && monotone;
        let finest = table.last().map(|row| format!("{row:.3?}")).unwrap_or_default();
        parts.push(format!(
            "{}: C(θ=1,2,4) at N=512 {finest}, growth {growth:.3}, finite {finite}, nonincreasing {monotone}",
            v.label()
        ));
    }
    verdict(pass, parts.join("; "))
}

fn rubio_de_francia() -> Result<Verdict> {
    let records = rdf::suite(&SuiteConfig::default(), SEED)?;
    let find = |id: &str| records.iter().find(|r| r.check == id);
    let asserted = ["rdf.dominates", "rdf.norm-doubling", "rdf.tail-bound"]
        .iter()
        .all(|id| find(id).is_some_and(|r| r.pass && trials_of(r) == RDF_TRIALS));
    let ratio = find("rdf.characteristic-ratio").and_then(|r| r.fitted_constant).unwrap_or(f64::INFINITY);
    verdict(
        asserted && ratio.is_finite(),
        format!("{RDF_TRIALS} trials, max [Gv]/[v] = {ratio:.4}"),
    )
}

fn stratification() -> Result<Verdict> {
    let r = fracint::stratification(&SuiteConfig::default(), SEED)?;
    verdict(
        r.pass && r.params["lattices"] == 3 && r.params["cells"] == 64,
        format!("worst bin-width ratio {:.4}", r.fitted_constant.unwrap_or(f64::NAN)),
    )
}

fn stratum_growth() -> Result<Verdict> {
    let r = fracint::stratum_growth(&SuiteConfig::default(), SEED)?;
    verdict(
        r.pass && r.params["violations"] == 0,
        format!("{} trials, worst bracket/bound {:.4}", trials_of(&r), r.fitted_constant.unwrap_or(f64::NAN)),
    )
}

fn fractional_domination() -> Result<Verdict> {
    let mut pass = true;
    let mut parts = Vec::new();
    for v in [Potential::Zero, Potential::Hermite] {
        let fits: Vec<f64> = [128, 256, 512].iter().map(|&n| fracint::domination_constant(v, n)).collect::<Result<_>>()?;
        let growth = max_growth(&fits);
        pass &= fits.iter().all(|c| c.is_finite()) && growth < GROWTH_TOLERANCE;
        parts.push(format!("{}: {fits:.4?} growth {growth:.3}", v.label()));
    }
    verdict(pass, parts.join("; "))
}

fn norm_slope() -> Result<Verdict> {
    let fit = fracint::slope_fit(SEED)?;
    let (p, q, alpha, n) = (2.0, 6.0, 1.0 / 3.0, 1.0);
    let predicted = (1.0 - alpha / n) * f64::max(1.0, conjugate(p) / q);
    verdict(
        (fit.predicted - predicted).abs() < 1e-12 && fit.slope <= predicted + SLOPE_SLACK,
        format!("slope {:.4} vs predicted {predicted:.4} + {SLOPE_SLACK}", fit.slope),
    )
}

fn two_weight() -> Result<Verdict> {
    let cfg = SuiteConfig::default();
    let random = twoweight::random_instances(&cfg, SEED)?;
    let worst = random.fitted_constant.unwrap_or(f64::INFINITY);
    let stable = twoweight::stability_record()?;
    let mut norm_dev = 0.0f64;
    for p in [1.5, 2.0, 4.0] {
        for q in [p, conjugate(p)] {
            for delta in [0.1, 0.5, 1.0, 2.0] {
                norm_dev = norm_dev.max((EntropyFunction::new(q, delta)?.normalization() - 1.0).abs());
            }
        }
    }
    verdict(
        worst <= TWO_WEIGHT_BUDGET
            && random.pass
            && trials_of(&random) == TWO_WEIGHT_TRIALS
            && stable.pass
            && norm_dev <= NORMALIZATION_TOLERANCE,
        format!(
            "worst ratio {worst:.4}, stability {} (growth {:.3}), |∫ε-1| = {norm_dev:.2e}",
            stable.fitted_constant.unwrap_or(f64::NAN),
            stable.params["max_growth"].as_f64().unwrap_or(f64::NAN)
        ),
    )
}

fn negative_controls() -> Result<Verdict> {
    let gaussian = controls::wrong_gaussian()?;
    let penalty = controls::off_by_one_penalty(&SuiteConfig::default())?;
    let sweep = refinement_sweep(SweepCheck::HeatKernelWrongGaussian, &heat::KERNEL_CELLS)?;
    verdict(
        gaussian.pass && penalty.pass && !sweep.stable,
        format!(
            "wrong Gaussian constant fitted {:.3e} (sweep stable: {}), off-by-one penalty worst ratio {:.4}",
            gaussian.fitted_constant.unwrap_or(f64::NAN),
            sweep.stable,
            penalty.fitted_constant.unwrap_or(f64::NAN)
        ),
    )
}

fn verify_all_runtime() -> Result<Verdict> {
    let start = Instant::now();
    let report = run_suite(Suite::All, &SuiteConfig::default(), SEED)?;
    let elapsed = start.elapsed();
    verdict(
        elapsed < VERIFY_ALL_BUDGET,
        format!("{} checks ({} failing) in {elapsed:.2?}", report.checks.len(), report.failed()),
    )
}

fn main() -> ExitCode {
    type Criterion = fn() -> Result<Verdict>;
    let criteria: [(&str, Criterion); 15] = [
        ("critical radius closed forms", critical_radius_closed_forms),
        ("hermite radius asymptotics", hermite_asymptotics),
        ("classical degeneration", classical_degeneration),
        ("bmo forward bound", bmo_forward_bound),
        ("hermite exponential weight exhibit", hermite_exhibit),
        ("dyadic weak type with constant 1", dyadic_weak_type),
        ("heat domination", heat_domination),
        ("rubio de francia majorant", rubio_de_francia),
        ("stratification", stratification),
        ("stratum characteristic growth", stratum_growth),
        ("fractional integral domination", fractional_domination),
        ("norm exponent slope", norm_slope),
        ("two-weight bump bound", two_weight),
        ("negative controls", negative_controls),
        ("verify all under 10 minutes", verify_all_runtime),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let (status, detail) = match run() {
            Ok(v) => (if v.pass { "PASS" } else { "FAIL" }, v.detail),
            Err(e) => ("FAIL", format!("error: {e}")),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} criterion {:>2} {name}: {detail}", k + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
