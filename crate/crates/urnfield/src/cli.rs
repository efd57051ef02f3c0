//! Command-line interface.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Serialize, Serializer};

use urnfield_core::closed_form;
use urnfield_core::dist::{default_atom_tol, largest_atom, QuantileDist};
use urnfield_core::params::{dilute, ReinforcementPair};
use urnfield_core::solver::{self, from_star, GridSpec, Initial, SolutionField, SolverConfig, StopRule};
use urnfield_core::urn::{self, RunConfig, UrnState};

use crate::error::CliError;
use crate::io::{read_json, write_csv, write_csv_table, write_json};
use crate::manifest::ManifestBuilder;
use crate::spec::{BoundarySpec, DistSpec};

#[derive(Parser, Debug)]
#[command(name = "urnfield", version, about = "Limit laws of randomly reinforced urns: fixed-point solver, simulator and reference solutions")]
pub struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON object of flag values (keys are long flag names); flags given on
    /// the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve for the field of limit laws and write it as JSON.
    Solve(SolveArgs),
    /// Estimate the limit law at one starting point by simulation.
    Simulate(SimulateArgs),
    /// Restricted distances d_n and the field distance d between two fields.
    Compare(CompareArgs),
    /// Largest nodewise change under one application of the operator.
    Residual(ResidualArgs),
    /// Monte Carlo check of the martingale bounds, as CSV.
    Diagnostics(DiagnosticsArgs),
    /// Reference laws or fields with known closed forms.
    ClosedForm(ClosedFormArgs),
    /// Largest detected point mass at every node, as CSV.
    Atoms(AtomsArgs),
    /// Plot-ready CSV of selected quantiles and CDF values at every node.
    Table(TableArgs),
}

fn as_display<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Args, Debug, Serialize)]
pub struct PairArgs {
    /// Law of black reinforcements.
    #[arg(long)]
    #[serde(serialize_with = "as_display")]
    pub mu: DistSpec,
    /// Law of white reinforcements.
    #[arg(long)]
    #[serde(serialize_with = "as_display")]
    pub nu: DistSpec,
    /// Support bound of both laws [default: the larger of their maxima].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Lower bound on the common mean [default: half the mean].
    #[arg(long)]
    pub m0: Option<f64>,
    /// Dilute both laws: keep mass FRAC and move the rest to 0.
    #[arg(long, value_name = "FRAC")]
    pub dilute: Option<f64>,
    /// Quantiles per law.
    #[arg(long, default_value_t = urnfield_core::dist::DEFAULT_K)]
    pub k: usize,
}

#[derive(Args, Debug, Clone, Copy, Serialize)]
pub struct GridArgs {
    /// Grid nodes along x*.
    #[arg(long, default_value_t = 129)]
    pub mx: usize,
    /// Grid nodes along y*.
    #[arg(long, default_value_t = 129)]
    pub my: usize,
    /// Right edge of the grid in x* = 1/(x+y).
    #[arg(long, default_value_t = 8.0)]
    pub x_star_max: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitArg {
    FarField,
    Floor,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopArg {
    Update,
    ErrorEstimate,
}

#[derive(Args, Debug, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Boundary datum.
    #[arg(long, default_value = "delta")]
    #[serde(serialize_with = "as_display")]
    pub boundary: BoundarySpec,
    /// Nodes of the boundary datum's t grid.
    #[arg(long, default_value_t = urnfield_core::boundary::DEFAULT_T)]
    pub t_nodes: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1e-4)]
    pub tol_iter: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = InitArg::FarField)]
    pub init: InitArg,
    #[arg(long, value_enum, default_value_t = StopArg::ErrorEstimate)]
    pub stop: StopArg,
    /// Iterate the axis rows instead of pinning them.
    #[arg(long)]
    pub no_pin_axes: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    /// Initial black balls.
    #[arg(long)]
    pub x: f64,
    /// Initial white balls.
    #[arg(long)]
    pub y: f64,
    /// Target bias of the stopped proportion.
    #[arg(long, default_value_t = 0.05)]
    pub eps: f64,
    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,
    /// Random seed [default: generated and recorded].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Step budget per trajectory [default: sized from the threshold].
    #[arg(long)]
    pub max_steps: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct CompareArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    /// Report only d_N (and d).
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct ResidualArgs {
    pub field: PathBuf,
    #[command(flatten)]
    pub pair: PairArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct DiagnosticsArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Beta(x, y): the urn with unit reinforcements.
    Beta,
    /// Law of W^(1/gamma) for W ~ Beta(x, y).
    Kumaraswamy,
    /// Scaled-Bernoulli urn with the canonical boundary datum.
    ScaledBernoulli,
    /// Beta(x/kmu, y/knu): scaled-Bernoulli urn with boundary hdelta.
    ScaledBeta,
}

#[derive(Args, Debug, Serialize)]
pub struct ClosedFormArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long)]
    pub kmu: Option<f64>,
    #[arg(long)]
    pub knu: Option<f64>,
    #[arg(long, default_value_t = urnfield_core::dist::DEFAULT_K)]
    pub k: usize,
    /// Write the whole field on the grid instead of one law.
    #[arg(long)]
    pub field: bool,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct AtomsArgs {
    pub field: PathBuf,
    /// Quantiles within TOL of each other count as one atom [default: 1e-9].
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct TableArgs {
    pub field: PathBuf,
    /// Probability levels of the reported quantiles.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.25,0.5,0.75,0.95")]
    pub levels: Vec<f64>,
    /// Points at which the CDF is reported.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
    pub cdf_at: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Appends the entries of `--config FILE` that are not already on the command
/// line.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, CliError> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(argv);
    };
    let config: serde_json::Map<String, serde_json::Value> = read_json(Path::new(&path))?;
    let mut out = argv;
    for (key, value) in config {
        let flag = format!("--{key}");
        let given = out.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given || key == "config" {
            continue;
        }
        match value {
            serde_json::Value::Bool(true) => out.push(flag),
            serde_json::Value::Bool(false) | serde_json::Value::Null => {}
            serde_json::Value::String(s) => out.extend([flag, s]),
            serde_json::Value::Number(n) => out.extend([flag, n.to_string()]),
            serde_json::Value::Array(items) => {
                let joined: Vec<String> = items
                    .iter()
                    .map(|v| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string()))
                    .collect();
                out.extend([flag, joined.join(",")]);
            }
            serde_json::Value::Object(_) => {
                return Err(CliError::Usage(format!("config key `{key}` has an object value")));
            }
        }
    }
    Ok(out)
}

/// Runs the command line and returns the process exit status.
pub fn run(argv: Vec<String>) -> u8 {
    let argv = match merge_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    if let Some(n) = cli.threads {
        // fails only if a pool already exists, in which case it is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    match dispatch(&cli.command, &argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command, argv: &[String]) -> Result<(), CliError> {
    match command {
        Command::Solve(a) => solve(a, argv),
        Command::Simulate(a) => simulate(a, argv),
        Command::Compare(a) => compare(a, argv),
        Command::Residual(a) => residual(a),
        Command::Diagnostics(a) => diagnostics(a, argv),
        Command::ClosedForm(a) => closed_form_cmd(a, argv),
        Command::Atoms(a) => atoms(a, argv),
        Command::Table(a) => table(a, argv),
    }
}

fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

/// Builds and validates the reinforcement pair.
pub fn build_pair(args: &PairArgs) -> Result<ReinforcementPair, CliError> {
    let beta = match args.beta {
        Some(b) => b,
        None => args.mu.natural_upper()?.max(args.nu.natural_upper()?),
    };
    if !(beta.is_finite() && beta > 0.0) {
        return Err(CliError::Usage(format!("support bound beta must be positive, got {beta} (set --beta)")));
    }
    let mu = args.mu.build(beta, args.k)?;
    let nu = args.nu.build(beta, args.k)?;
    let pair = match args.m0 {
        Some(m0) => ReinforcementPair::validate(mu, nu, beta, m0)?,
        None => ReinforcementPair::with_default_m0(mu, nu, beta)?,
    };
    Ok(match args.dilute {
        Some(frac) => dilute(&pair, frac)?,
        None => pair,
    })
}

fn pair_label(args: &PairArgs, pair: &ReinforcementPair) -> String {
    let mut s = format!("mu={} nu={} beta={}", args.mu, args.nu, pair.beta());
    if let Some(f) = args.dilute {
        s.push_str(&format!(" dilute={f}"));
    }
    s
}

fn grid_spec(g: &GridArgs) -> Result<GridSpec, CliError> {
    Ok(GridSpec::new(g.mx, g.my, g.x_star_max)?)
}

fn solve(a: &SolveArgs, argv: &[String]) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::start("solve", argv, params(a));
    let pair = build_pair(&a.pair)?;
    let phi = a.boundary.build(a.t_nodes, a.pair.k)?;
    let cfg = SolverConfig {
        grid: grid_spec(&a.grid)?,
        k: a.pair.k,
        tol_iter: a.tol_iter,
        max_iters: a.max_iters,
        init: match a.init {
            InitArg::FarField => Initial::FarField,
            InitArg::Floor => Initial::Floor,
        },
        stop: match a.stop {
            StopArg::Update => StopRule::Update,
            StopArg::ErrorEstimate => StopRule::ErrorEstimate,
        },
        pin_axes: !a.no_pin_axes,
    };
    let mut field = solver::solve(&pair, &phi, &cfg)?;
    field.meta_mut().pair = pair_label(&a.pair, &pair);
    field.meta_mut().boundary = a.boundary.to_string();
    let meta = field.meta().clone();
    eprintln!(
        "{} after {} sweeps, last update {:e}",
        if meta.converged { "converged" } else { "not converged" },
        meta.iterations,
        meta.final_update
    );
    write_json(&a.out, &field, false)?;
    if !meta.converged {
        manifest.status("not-converged");
    }
    manifest.finish(&a.out)?;
    if meta.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged { iterations: meta.iterations, final_update: meta.final_update })
    }
}

/// A seed from the standard library's per-process random hasher keys.
fn generate_seed() -> u64 {
    use std::hash::{BuildHasher, Hasher};
    let mut h = std::collections::hash_map::RandomState::new().build_hasher();
    h.write_u128(std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0));
    h.finish()
}

fn run_config(r: &RunArgs, manifest: &mut ManifestBuilder) -> Result<RunConfig, CliError> {
    let seed = r.seed.unwrap_or_else(|| {
        let s = generate_seed();
        eprintln!("seed: {s}");
        s
    });
    manifest.seed(seed);
    let mut cfg = RunConfig::new(seed, r.eps, r.replicates)?;
    cfg.max_steps = r.max_steps;
    Ok(cfg)
}

fn simulate(a: &SimulateArgs, argv: &[String]) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::start("simulate", argv, params(a));
    let pair = build_pair(&a.pair)?;
    let cfg = run_config(&a.run, &mut manifest)?;
    let samples = urn::sample_limit(a.run.x, a.run.y, &pair, &cfg)?;
    let law = QuantileDist::from_samples(&samples.z, 1.0, pair.k())?;
    let mean_steps = samples.steps.iter().sum::<u64>() as f64 / samples.steps.len() as f64;
    eprintln!(
        "{} replicates, threshold {}, mean steps {mean_steps:.1}, mean limit {:.6}",
        samples.z.len(),
        samples.threshold,
        law.mean()
    );
    write_json(&a.out, &law, true)?;
    if samples.truncated > 0 {
        manifest.status("truncated");
    }
    manifest.finish(&a.out)?;
    if samples.truncated > 0 {
        return Err(CliError::Truncated { count: samples.truncated, total: samples.z.len(), max_steps: samples.max_steps });
    }
    Ok(())
}

#[derive(Serialize)]
struct MetricRow {
    metric: String,
    value: f64,
}

fn compare(a: &CompareArgs, argv: &[String]) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("compare", argv, params(a));
    let f1: SolutionField = read_json(&a.a)?;
    let f2: SolutionField = read_json(&a.b)?;
    let n_max = f1.grid().x_star_max.floor() as u32;
    let ns: Vec<u32> = match a.n {
        Some(n) => vec![n],
        None => (1..=n_max).collect(),
    };
    let mut rows = Vec::new();
    for n in ns {
        rows.push(MetricRow { metric: format!("d_{n}"), value: solver::restricted_distance(&f1, &f2, n as f64)? });
    }
    rows.push(MetricRow { metric: "d".into(), value: solver::field_distance(&f1, &f2)? });
    write_csv(None, &rows)?;
    if let Some(out) = &a.out {
        write_csv(Some(out), &rows)?;
        manifest.finish(out)?;
    }
    Ok(())
}

fn residual(a: &ResidualArgs) -> Result<(), CliError> {
    let field: SolutionField = read_json(&a.field)?;
    let pair = build_pair(&a.pair)?;
    println!("{}", solver::residual(&field, &pair));
    Ok(())
}

#[derive(Serialize)]
struct BoundRow {
    check: String,
    step: Option<u64>,
    estimate: f64,
    std_error: f64,
    bound: f64,
    pass: bool,
}

fn diagnostics(a: &DiagnosticsArgs, argv: &[String]) -> Result<(), CliError> {
    let mut manifest = ManifestBuilder::start("diagnostics", argv, params(a));
    let pair = build_pair(&a.pair)?;
    let cfg = run_config(&a.run, &mut manifest)?;
    let report = urn::diagnostics_bounds_check(&pair, UrnState::new(a.run.x, a.run.y)?, &cfg)?;
    let rows: Vec<BoundRow> = report
        .checks
        .iter()
        .map(|c| BoundRow {
            check: c.name.clone(),
            step: c.step,
            estimate: c.estimate,
            std_error: c.std_error,
            bound: c.bound,
            pass: c.pass,
        })
        .collect();
    write_csv(a.out.as_deref(), &rows)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!("{} of {} checks pass", rows.len() - failed, rows.len());
    if let Some(out) = &a.out {
        if failed > 0 {
            manifest.status(format!("{failed} checks above bound"));
        }
        manifest.finish(out)?;
    }
    Ok(())
}

fn need(v: Option<f64>, flag: &str, family: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for family {family}")))
}

fn closed_form_cmd(a: &ClosedFormArgs, argv: &[String]) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("closed-form", argv, params(a));
    let family = a.family.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let scales = || -> Result<(f64, f64), CliError> { Ok((need(a.kmu, "kmu", &family)?, need(a.knu, "knu", &family)?)) };
    if a.field {
        let grid = grid_spec(&a.grid)?;
        let mut field = match a.family {
            Family::Beta => closed_form::beta_field(grid, a.k)?,
            Family::Kumaraswamy => {
                if !(a.gamma.is_finite() && a.gamma > 0.0) {
                    return Err(CliError::Usage(format!("--gamma must be positive, got {}", a.gamma)));
                }
                let inv = 1.0 / a.gamma;
                closed_form::beta_field(grid, a.k)?.pushforward(|t| t.powf(inv))?
            }
            Family::ScaledBernoulli => {
                let (kmu, knu) = scales()?;
                closed_form::scaled_bernoulli_field(kmu, knu, grid, a.k)?
            }
            Family::ScaledBeta => {
                let (kmu, knu) = scales()?;
                closed_form::scaled_beta_field(kmu, knu, grid, a.k)?
            }
        };
        field.meta_mut().boundary = format!("closed-form {family}");
        field.meta_mut().converged = true;
        write_json(&a.out, &field, false)?;
    } else {
        let (x, y) = (need(a.x, "x", &family)?, need(a.y, "y", &family)?);
        let law = match a.family {
            Family::Beta => closed_form::beta_quantile_dist(x, y, a.k)?,
            Family::Kumaraswamy => closed_form::kumaraswamy_dist(a.gamma, x, y, a.k)?,
            Family::ScaledBernoulli => {
                let (kmu, knu) = scales()?;
                closed_form::scaled_bernoulli_solution(kmu, knu, x, y, a.k)?
            }
            Family::ScaledBeta => {
                let (kmu, knu) = scales()?;
                closed_form::beta_quantile_dist(x / kmu, y / knu, a.k)?
            }
        };
        write_json(&a.out, &law, true)?;
    }
    manifest.finish(&a.out)?;
    Ok(())
}

#[derive(Serialize)]
struct AtomRow {
    i: usize,
    j: usize,
    x_star: f64,
    y_star: f64,
    interior: bool,
    location: f64,
    mass_estimate: f64,
}

fn atoms(a: &AtomsArgs, argv: &[String]) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("atoms", argv, params(a));
    let field: SolutionField = read_json(&a.field)?;
    let tol = a.tol.unwrap_or_else(|| default_atom_tol(1.0));
    let g = *field.grid();
    let mut rows = Vec::with_capacity(field.node_count());
    for i in 0..g.mx {
        for j in 0..g.my {
            let r = largest_atom(&field.node_dist(i, j), tol);
            rows.push(AtomRow {
                i,
                j,
                x_star: g.x_star(i),
                y_star: g.y_star(j),
                interior: g.is_interior(i, j),
                location: r.location,
                mass_estimate: r.mass_estimate,
            });
        }
    }
    write_csv(a.out.as_deref(), &rows)?;
    let worst = rows.iter().filter(|r| r.interior).map(|r| r.mass_estimate).fold(0.0, f64::max);
    eprintln!("largest interior atom mass {worst} (1/K = {})", 1.0 / field.k() as f64);
    if let Some(out) = &a.out {
        manifest.finish(out)?;
    }
    Ok(())
}

fn table(a: &TableArgs, argv: &[String]) -> Result<(), CliError> {
    let manifest = ManifestBuilder::start("table", argv, params(a));
    if let Some(bad) = a.levels.iter().find(|u| !(0.0..=1.0).contains(*u)) {
        return Err(CliError::Usage(format!("level {bad} outside [0, 1]")));
    }
    let field: SolutionField = read_json(&a.field)?;
    let g = *field.grid();
    let mut header: Vec<String> = ["x", "y", "x_star", "y_star"].iter().map(|s| s.to_string()).collect();
    header.extend(a.levels.iter().map(|u| format!("q_{u}")));
    header.extend(a.cdf_at.iter().map(|z| format!("cdf_{z}")));
    let mut rows = Vec::with_capacity(field.node_count());
    for i in 0..g.mx {
        for j in 0..g.my {
            let (xs, ys) = (g.x_star(i), g.y_star(j));
            let (x, y) = if i == 0 { (f64::INFINITY, f64::INFINITY) } else { from_star(xs, ys)? };
            let node = field.node_dist(i, j);
            let mut row = vec![x.to_string(), y.to_string(), xs.to_string(), ys.to_string()];
            row.extend(a.levels.iter().map(|&u| node.quantile(u).to_string()));
            row.extend(a.cdf_at.iter().map(|&z| node.cdf(z).to_string()));
            rows.push(row);
        }
    }
    write_csv_table(a.out.as_deref(), &header, &rows)?;
    if let Some(out) = &a.out {
        manifest.finish(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn config_fills_missing_flags_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"mu": "delta:2", "nu": "delta:2", "tol-iter": 0.001, "no-pin-axes": true, "levels": [0.1, 0.9]}"#).unwrap();
        let argv: Vec<String> = ["urnfield", "solve", "--mu", "delta:1", "--config", path.to_str().unwrap()]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let merged = merge_config(argv).unwrap();
        let pos = merged.iter().position(|a| a == "--mu").unwrap();
        assert_eq!(merged[pos + 1], "delta:1");
        assert_eq!(merged.iter().filter(|a| *a == "--mu").count(), 1);
        assert!(merged.windows(2).any(|w| w[0] == "--nu" && w[1] == "delta:2"));
        assert!(merged.windows(2).any(|w| w[0] == "--tol-iter" && w[1] == "0.001"));
        assert!(merged.windows(2).any(|w| w[0] == "--levels" && w[1] == "0.1,0.9"));
        assert!(merged.iter().any(|a| a == "--no-pin-axes"));
    }

    #[test]
    fn pair_defaults() {
        let args = PairArgs {
            mu: "bernoulli:p=0.5,scale=1".parse().unwrap(),
            nu: "bernoulli:p=0.25,scale=2".parse().unwrap(),
            beta: None,
            m0: None,
            dilute: Some(0.5),
            k: 64,
        };
        let pair = build_pair(&args).unwrap();
        assert_eq!(pair.beta(), 2.0);
        assert!((pair.mean() - 0.25).abs() < 1e-12);
        let bad = PairArgs { nu: "delta:1".parse().unwrap(), dilute: None, ..args };
        assert!(matches!(build_pair(&bad), Err(CliError::Core(urnfield_core::Error::Parameter(_)))));
    }
}
