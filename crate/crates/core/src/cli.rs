//! The `swlab` command line: one subcommand per capability, each driven by
//! a JSON run configuration and emitting a table plus a summary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bmo::{bmo_theta_norm, exp_log_backward};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::grid::{enumerate_cubes, point, Grid, GridFunction};
use crate::harness::{fracint::lattices, refinement_sweep, rng_for, run_suite, Suite};
use crate::io::{number, write_report, Format, Output, Table};
use crate::operators::{
    domination_check, maximal_adapted, maximal_restricted, rdf_iterate, standard_probes, stratify, weak_type_check,
    RdfNormalization,
};
use crate::potential::{CriticalRadius, PsiFunctional, PsiMode, RadiusField};
use crate::semigroup::{Boundary, DiscreteOperator};
use crate::twoweight::{bump_characteristic, two_weight_check, EntropyPair};
use crate::weights::{ap_theta, apq_alpha_theta, restricted_ap, restricted_apq, ExponentSet, Weight};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
struct Global {
    /// JSON run configuration; defaults are used for missing blocks.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory; tables go to stdout when absent (reports to `.`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the critical radius along the first axis.
    Rho,
    /// Adapted and classical weight characteristics with per-cube factors.
    Char,
    /// BMO norm of log w and the backward exp-log sweep.
    Bmo,
    /// Adapted and classical maximal functions of a Gaussian bump.
    Maximal,
    /// Fitted heat-domination constants for each configured θ.
    Heat,
    /// Spectral negative power against the dyadic fractional sums.
    Fracint,
    /// Rubio de Francia majorant of a Gaussian bump.
    Rdf,
    /// Bump table and two-weight ratios per stratum.
    Twoweight,
    /// Run a verification suite and write its report.
    Verify {
        /// rho, weights, bmo, maximal, heat, fracint, rdf, twoweight or all.
        #[arg(value_parser = parse_suite)]
        suite: Suite,
    },
    /// Refinement sweep of one fitted constant.
    Sweep,
}

fn parse_suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "swlab", version, about = "Weights, maximal operators and fractional integrals adapted to -Δ + V")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn main_with_args<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(stderr, "{text}") } else { write!(stdout, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_FAIL,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<bool> {
    let mut cfg = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.global.seed {
        cfg.seed = seed;
    }
    let format = Format::from(cli.global.format);
    if let Command::Verify { suite } = cli.command {
        let report = run_suite(suite, &cfg.suite, cfg.seed)?;
        let dir = cli.global.out.clone().unwrap_or_else(|| PathBuf::from("."));
        let path = write_report(&report, &dir, format)?;
        for c in &report.checks {
            writeln!(stdout, "{c}")?;
        }
        writeln!(stdout, "{} passed, {} failed; report in {}", report.passed(), report.failed(), path.display())?;
        return Ok(report.all_passed());
    }
    let output = match cli.command {
        Command::Rho => rho(&cfg)?,
        Command::Char => characteristic(&cfg)?,
        Command::Bmo => bmo(&cfg)?,
        Command::Maximal => maximal(&cfg)?,
        Command::Heat => heat(&cfg)?,
        Command::Fracint => fracint(&cfg)?,
        Command::Rdf => rdf(&cfg)?,
        Command::Twoweight => twoweight(&cfg)?,
        Command::Sweep => sweep(&cfg)?,
        Command::Verify { .. } => unreachable!("handled above"),
    };
    match &cli.global.out {
        Some(dir) => {
            for path in output.write_to_dir(dir, format)? {
                writeln!(stdout, "wrote {}", path.display())?;
            }
        }
        None => output.write_to(&mut *stdout, format)?,
    }
    Ok(output.pass)
}

fn coordinate_columns(dim: usize) -> Vec<String> {
    ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect()
}

fn with_coords(grid: &Grid, i: usize, rest: &[f64]) -> Vec<f64> {
    let c = grid.center(i);
    c[..grid.dim()].iter().chain(rest).copied().collect()
}

/// `exp(-|x|²)`.
fn bump(grid: &Grid) -> GridFunction {
    grid.sample(|x| (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp())
}

fn field(cfg: &RunConfig, grid: &Grid) -> Result<Arc<RadiusField>> {
    Ok(Arc::new(RadiusField::for_potential(cfg.potential()?, grid)?))
}

fn weight(cfg: &RunConfig, grid: &Grid) -> Result<Weight> {
    cfg.weight.build(grid, &mut rng_for(cfg.seed, "weight"))
}

/// `ρ` at the cell centers of the first axis, columns `x, rho,
/// one_plus_abs_x_rho`.
pub fn rho(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let potential = cfg.potential()?;
    let radius = CriticalRadius::for_grid(potential, &grid)?;
    let mut table = Table::new(["x", "rho", "one_plus_abs_x_rho"]);
    for i in 0..grid.cells_per_axis() {
        let x = grid.axis_center(i);
        let r = radius.at(&point(&[x]))?;
        table.push(vec![x, r, (1.0 + x.abs()) * r])?;
    }
    let scaled = table.column("one_plus_abs_x_rho").unwrap_or_default();
    let (lo, hi) = scaled.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    Ok(Output {
        command: "rho".into(),
        table,
        summary: json!({"potential": potential.label(), "dim": grid.dim(), "scaled_ratio": number(hi / lo)}),
        pass: true,
    })
}

/// Adapted characteristic with per-cube factors, and its classical
/// counterpart on the same collection.
pub fn characteristic(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let e = cfg.exponent_set()?;
    let w = weight(cfg, &grid)?;
    let cubes = enumerate_cubes(&grid, cfg.collection)?;
    let psi = PsiFunctional::new(field(cfg, &grid)?, e.theta, PsiMode::Centered)?;
    let diagonal = e.alpha == 0.0;
    let (adapted, classical) = if diagonal {
        (ap_theta(&w, &e, &psi, &cubes)?, restricted_ap(&w, e.p, &cubes)?)
    } else {
        (apq_alpha_theta(&w, &e, &psi, &cubes)?, restricted_apq(&w, e.p, e.q, &cubes)?)
    };
    let mut columns = coordinate_columns(grid.dim());
    columns.extend(["side", "factor1", "factor2", "product"].map(String::from));
    let mut table = Table::new(columns);
    for row in &adapted.per_cube {
        let mut r: Vec<f64> = row.cube.center[..grid.dim()].to_vec();
        r.extend([row.cube.side, row.factor1, row.factor2, row.product]);
        table.push(r)?;
    }
    Ok(Output {
        command: "char".into(),
        table,
        summary: json!({
            "characteristic": if diagonal { "ap-theta" } else { "apq-alpha-theta" },
            "value": number(adapted.value), "argmax_cube": adapted.argmax_cube,
            "classical": number(classical.value), "collection": adapted.collection, "cubes": cubes.len(),
        }),
        pass: adapted.value.is_finite(),
    })
}

/// `‖log w‖_{BMO_θ}` and the `A_p^θ` bracket of `w^η` over the configured
/// `η`.
pub fn bmo(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let e = cfg.exponent_set()?;
    let w = weight(cfg, &grid)?;
    let f = GridFunction::new(grid, w.log_samples().to_vec())?;
    let cubes = enumerate_cubes(&grid, cfg.collection)?;
    let psi = PsiFunctional::new(field(cfg, &grid)?, e.theta, PsiMode::Centered)?;
    let norm = bmo_theta_norm(&f, &psi, &cubes)?;
    let classical = ExponentSet::classical(e.n, e.p, e.theta)?;
    let back = exp_log_backward(&f, &cfg.bmo.etas, &classical, &psi, &cubes, cfg.bmo.ceiling)?;
    let mut table = Table::new(["eta", "characteristic"]);
    for (eta, c) in &back.sweep {
        table.push(vec![*eta, *c])?;
    }
    Ok(Output {
        command: "bmo".into(),
        table,
        summary: json!({"bmo_norm": number(norm.value), "argmax_cube": norm.argmax_cube, "ceiling": cfg.bmo.ceiling, "best_eta": back.best_eta}),
        pass: norm.value.is_finite(),
    })
}

/// `M^θ f` and `M f` of `exp(-|x|²)`; on a nested collection also the
/// weak-type ratio for the configured weight, which must not exceed 1.
pub fn maximal(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let e = ExponentSet::classical(grid.dim() as f64, cfg.exponents.p, cfg.exponents.theta)
        .map_err(|err| Error::Config(err.to_string()))?;
    let cubes = enumerate_cubes(&grid, cfg.collection)?;
    let psi = PsiFunctional::new(field(cfg, &grid)?, e.theta, PsiMode::Centered)?;
    let f = bump(&grid);
    let adapted = maximal_adapted(&f, &e, &psi, &cubes)?.function;
    let classical = maximal_restricted(&f, &cubes)?.function;
    let mut columns = coordinate_columns(grid.dim());
    columns.extend(["f", "adapted", "classical"].map(String::from));
    let mut table = Table::new(columns);
    for i in 0..grid.len() {
        table.push(with_coords(&grid, i, &[f.samples()[i], adapted.samples()[i], classical.samples()[i]]))?;
    }
    let weak = if cubes.is_nested() {
        Some(weak_type_check(&f, &weight(cfg, &grid)?, &e, &psi, &cubes, None)?)
    } else {
        None
    };
    let pass = weak.as_ref().is_none_or(|r| r.holds);
    Ok(Output {
        command: "maximal".into(),
        table,
        summary: json!({"theta": e.theta, "collection": cubes.tag(), "weak_type": weak}),
        pass,
    })
}

/// `C_θ` in `|e^{-tL} f| <= C_θ M^θ f` for `f = exp(-|x|²)`, one row per
/// configured `θ`.
pub fn heat(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let op = DiscreteOperator::new(&grid, cfg.potential()?, Boundary::Dirichlet)?;
    let field = field(cfg, &grid)?;
    let cubes = enumerate_cubes(&grid, cfg.collection)?;
    let f = bump(&grid);
    let mut table = Table::new(["theta", "fitted_constant", "argmax_x", "argmax_t"]);
    let mut finite = true;
    for &theta in &cfg.heat.thetas {
        let rep = crate::operators::heat_domination_check(&op, &field, &f, theta, &cfg.heat.times, &cubes)?;
        finite &= rep.finite;
        table.push(vec![theta, rep.fitted_constant, rep.argmax.0, rep.argmax.1])?;
    }
    Ok(Output {
        command: "heat".into(),
        table,
        summary: json!({"potential": op.potential().label(), "times": cfg.heat.times, "collection": cubes.tag()}),
        pass: finite,
    })
}

/// `L^{-α/2} f` against the sum of the dyadic fractional integrals over
/// the shifted lattices, for `f = exp(-|x|²)`.
pub fn fracint(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let e = cfg.exponent_set()?;
    let op = DiscreteOperator::new(&grid, cfg.potential()?, Boundary::Dirichlet)?;
    let field = field(cfg, &grid)?;
    let f = bump(&grid);
    let lats = lattices(&grid)?;
    let psi = PsiFunctional::new(field.clone(), e.theta, PsiMode::Sup)?;
    let lhs = op.frac_power_apply(&f, e.alpha)?;
    let mut rhs = vec![0.0; grid.len()];
    for lattice in &lats {
        let part = crate::operators::dyadic_frac_int(&f, &e, &psi, lattice)?;
        rhs.iter_mut().zip(part.samples()).for_each(|(a, b)| *a += b);
    }
    let rep = domination_check(&op, &field, &f, &e, &lats)?;
    let mut table = Table::new(["x", "negative_power", "dyadic_sum"]);
    for i in 0..grid.len() {
        table.push(vec![grid.center(i)[0], lhs.samples()[i], rhs[i]])?;
    }
    Ok(Output {
        command: "fracint".into(),
        table,
        summary: json!({"alpha": e.alpha, "theta": e.theta, "domination": rep}),
        pass: rep.finite,
    })
}

/// Majorant of `exp(-|x|²)` for the configured weight. Non-nested
/// collections fall back to the characteristic normalization, under which
/// norm doubling is reported but not asserted.
pub fn rdf(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let v = weight(cfg, &grid)?;
    let cubes = enumerate_cubes(&grid, cfg.collection)?;
    let normalization = if cubes.is_nested() {
        RdfNormalization::Rigorous
    } else {
        RdfNormalization::Characteristic
    };
    let g = bump(&grid);
    let out = rdf_iterate(&g, &v, cfg.rdf.r0, cfg.rdf.r, &cubes, cfg.rdf.terms, normalization)?;
    let mut columns = coordinate_columns(grid.dim());
    columns.extend(["g", "majorant"].map(String::from));
    let mut table = Table::new(columns);
    for i in 0..grid.len() {
        table.push(with_coords(&grid, i, &[g.samples()[i], out.majorant.samples()[i]]))?;
    }
    let r = &out.report;
    Ok(Output {
        command: "rdf".into(),
        table,
        pass: r.dominates && r.tail_honored && (r.norm_doubling || normalization == RdfNormalization::Characteristic),
        summary: serde_json::to_value(r)?,
    })
}

/// Bump characteristics and two-weight ratios per stratum for
/// `σ = |x|^s` and the configured weight.
pub fn twoweight(cfg: &RunConfig) -> Result<Output> {
    let grid = cfg.grid()?;
    let e = cfg.exponent_set()?;
    let sigma = Weight::power(&grid, cfg.twoweight.sigma_power)?;
    let w = weight(cfg, &grid)?;
    let psi = PsiFunctional::new(field(cfg, &grid)?, e.theta, PsiMode::Sup)?;
    let lattice = crate::grid::build_lattice(&grid, grid.max_depth(), 0)?;
    let strat = stratify(&lattice, e.theta, &psi)?;
    let eps = EntropyPair::new(&e, cfg.twoweight.delta)?;
    let bump = bump_characteristic(&sigma, &w, &e, &eps, &strat, &psi)?;
    let probes = standard_probes(&grid, &w, e.p, 4, &mut rng_for(cfg.seed, "twoweight.probes"))?;
    let rep = two_weight_check(&sigma, &w, &e, &bump, &strat, &probes, cfg.twoweight.budget)?;
    let mut table = Table::new(["stratum", "cubes", "characteristic", "bound", "ratio"]);
    for row in &bump.strata {
        let ratio = rep.rows.iter().find(|t| t.r == row.r).map_or(0.0, |t| t.ratio);
        table.push(vec![f64::from(row.r), row.cubes as f64, row.characteristic, row.bound, ratio])?;
    }
    Ok(Output {
        command: "twoweight".into(),
        table,
        summary: json!({
            "global": number(bump.global), "consistent": bump.consistent, "max_ratio": number(rep.max_ratio),
            "composed_ratio": number(rep.composed_ratio), "composed_budget": rep.composed_budget, "budget": rep.budget,
        }),
        pass: rep.holds && bump.consistent,
    })
}

pub fn sweep(cfg: &RunConfig) -> Result<Output> {
    let t = refinement_sweep(cfg.sweep.check, &cfg.sweep.cells)?;
    let mut table = Table::new(["n", "fitted"]);
    for row in &t.rows {
        table.push(vec![row.n as f64, row.fitted])?;
    }
    Ok(Output {
        command: "sweep".into(),
        table,
        summary: json!({"check": t.check, "max_growth": number(t.max_growth), "stable": t.stable}),
        pass: t.stable,
    })
}
