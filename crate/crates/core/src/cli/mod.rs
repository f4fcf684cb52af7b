//! Command-line front end: `simulate`, `audit`, `verify`, `multipliers`,
//! `order` and `convergence`.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 for usage, config and I/O errors.

mod config;

pub use config::{parse_ic, ConvergenceConfig, OutputConfig, RunConfig};

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::audit::{audit, convergence_study, AuditOptions, ConvergenceSpec, Reference, Tolerances, Transform};
use crate::scheme_library::{
    check_symmetries, get_scheme, verify_conservation_identity, ConservationTriple, IdentityForm, SchemeName,
};
use crate::solver::{run, write_binary, write_csv, BcConfig, GridConfig, IcPreset, SimulationConfig, Trajectory};
use crate::stencil_algebra::jet::taylor_leading;
use crate::stencil_algebra::{consistency_report, multiplier_space, sexp, AnsatzSpec};

#[derive(Debug, Parser)]
#[command(name = "fdcons", version, about = "Conservation laws of finite-difference wave-equation schemes")]
pub struct Cli {
    /// TOML file with defaults for every flag.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a scheme and write the trajectory.
    Simulate(SimulateArgs),
    /// Integrate a scheme and audit conservation, residuals and symmetries.
    Audit(AuditArgs),
    /// Check the stored conservation laws, symmetries and consistency symbolically.
    Verify(VerifyArgs),
    /// Solve for all multipliers of a scheme within a named ansatz.
    Multipliers(MultipliersArgs),
    /// Consistency orders from the Taylor expansion.
    Order(OrderArgs),
    /// Observed convergence order under refinement.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scheme: Option<SchemeName>,
    /// Number of unknown nodes.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Dirichlet boundary values instead of a periodic grid.
    #[arg(long, num_args = 2, value_names = ["LEFT", "RIGHT"], allow_negative_numbers = true)]
    pub dirichlet: Option<Vec<f64>>,
    /// Preset name or inline fields, e.g. `preset=gaussian,center=0.5,width=0.1`.
    #[arg(long)]
    pub ic: Option<String>,
    /// Seed for `random_smooth` (selects that preset when `--ic` is absent).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub stride: Option<usize>,
    /// CSV output (`n,t,m,x,U`); standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Binary output.
    #[arg(long)]
    pub binary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// CSV of `level,triple,Q_h,drift`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Transform to apply, `name[:value]`; repeatable.
    #[arg(long = "transform")]
    pub transforms: Vec<String>,
    /// Law of another scheme to track, `Scheme:Label`; repeatable.
    #[arg(long)]
    pub foreign: Vec<String>,
    /// Also run the default convergence study for the scheme.
    #[arg(long)]
    pub convergence: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Scheme to verify; all four when absent.
    #[arg(long)]
    pub scheme: Option<SchemeName>,
    /// JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MultipliersArgs {
    #[arg(long)]
    pub scheme: Option<SchemeName>,
    /// cross5_linear, nine_linear, affine_tx or cross5_affine_differences.
    #[arg(long)]
    pub ansatz: Option<String>,
    /// Print the basis as S-expressions, one per line.
    #[arg(long)]
    pub sexp: bool,
    /// Write the basis as S-expressions to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrderArgs {
    /// Scheme to expand; all four when absent.
    #[arg(long)]
    pub scheme: Option<SchemeName>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub scheme: Option<SchemeName>,
    /// Comma-separated node counts, coarse to fine.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    /// `tau / h`.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub final_time: Option<f64>,
    /// Refinement factor of the self-convergence reference.
    #[arg(long)]
    pub refine: Option<usize>,
    /// CSV order table; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Audit(_) => "audit",
            Command::Verify(_) => "verify",
            Command::Multipliers(_) => "multipliers",
            Command::Order(_) => "order",
            Command::Convergence(_) => "convergence",
        }
    }
}

/// Entry point of the `fdcons` binary.
pub fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = run_cli(std::env::args_os(), &mut out, &mut std::io::stderr());
    ExitCode::from(code as u8)
}

/// Parses `args` and runs the command, writing reports to `out` and
/// diagnostics to `err`. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(CliError::Usage(m)) | Err(CliError::Io(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(CliError::Usage)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &cfg.command {
        if c != cli.command.name() {
            return Err(usage(format!("config is for `{c}`, invoked `{}`", cli.command.name())));
        }
    }
    match &cli.command {
        Command::Simulate(a) => simulate(a, &cfg, out, err),
        Command::Audit(a) => audit_cmd(a, &cfg, out, err),
        Command::Verify(a) => verify(a, &cfg, out),
        Command::Multipliers(a) => multipliers(a, &cfg, out),
        Command::Order(a) => order(a, &cfg, out),
        Command::Convergence(a) => convergence(a, &cfg, out, err),
    }
}

fn require_scheme(flag: Option<SchemeName>, cfg: &RunConfig) -> Result<SchemeName, CliError> {
    flag.or(cfg.scheme).ok_or_else(|| usage("--scheme is required"))
}

fn schemes(flag: Option<SchemeName>, cfg: &RunConfig) -> Vec<SchemeName> {
    match flag.or(cfg.scheme) {
        Some(s) => vec![s],
        None => SchemeName::ALL.to_vec(),
    }
}

/// Merges flags over the config file. Defaults: 128 periodic nodes,
/// `tau = h/2`, seeded random smooth data, 100 steps.
pub fn simulation_config(a: &RunArgs, cfg: &RunConfig, stride: Option<usize>) -> Result<SimulationConfig, CliError> {
    let scheme = require_scheme(a.scheme, cfg)?;
    let mut grid = cfg.grid.clone().unwrap_or(GridConfig::periodic(128));
    if let Some(m) = a.m {
        grid.m = m;
    }
    if a.h.is_some() {
        grid.h = a.h;
    }
    if a.tau.is_some() {
        grid.tau = a.tau;
    }
    if let Some(d) = &a.dirichlet {
        grid.bc = BcConfig::Dirichlet { left: d[0], right: d[1] };
    }
    grid.build().map_err(usage)?;
    let ic = match (&a.ic, a.seed) {
        (Some(s), seed) => {
            let mut ic = parse_ic(s).map_err(CliError::Usage)?;
            if let (IcPreset::RandomSmooth { seed: s, .. }, Some(v)) = (&mut ic, seed) {
                *s = v;
            }
            ic
        }
        (None, Some(seed)) => IcPreset::RandomSmooth { seed, amplitude: 0.08, modes: 4 },
        (None, None) => cfg.ic.clone().unwrap_or(IcPreset::RandomSmooth { seed: 1, amplitude: 0.08, modes: 4 }),
    };
    let record_stride = stride.or(cfg.record_stride).unwrap_or(1);
    if record_stride == 0 {
        return Err(usage("--stride must be at least 1"));
    }
    Ok(SimulationConfig { scheme, grid, ic, steps: a.steps.or(cfg.steps).unwrap_or(100), record_stride })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn simulate(a: &SimulateArgs, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    let sc = simulation_config(&a.run, cfg, a.stride)?;
    let traj = run(&sc).map_err(usage)?;
    let io = |e: crate::solver::SolverError| CliError::Io(e.to_string());
    match a.out.as_ref().or(cfg.output.csv.as_ref()) {
        Some(p) => write_csv(&traj, create(p)?).map_err(io)?,
        None => write_csv(&traj, &mut *out).map_err(io)?,
    }
    if let Some(p) = a.binary.as_ref().or(cfg.output.binary.as_ref()) {
        write_binary(&traj, create(p)?).map_err(io)?;
    }
    writeln!(err, "{}: {} levels, final time {}", traj.scheme, traj.layers.len(), traj.final_time())?;
    Ok(true)
}

fn foreign_triple(spec: &str) -> Result<ConservationTriple, CliError> {
    let (s, label) = spec.split_once(':').ok_or_else(|| usage(format!("--foreign expects Scheme:Label, got `{spec}`")))?;
    let scheme = get_scheme(s.parse().map_err(usage)?);
    let mut t = scheme.triple(label).cloned().ok_or_else(|| usage(format!("{s} has no triple `{label}`")))?;
    t.label = format!("{s}:{}", t.label);
    Ok(t)
}

fn audit_cmd(a: &AuditArgs, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    let sc = simulation_config(&a.run, cfg, None)?;
    if sc.record_stride != 1 {
        return Err(usage("audit needs every level recorded (record_stride = 1)"));
    }
    let traj: Trajectory = run(&sc).map_err(usage)?;
    let transforms = if a.transforms.is_empty() { cfg.transforms.clone().unwrap_or_default() } else { a.transforms.clone() };
    let foreign = if a.foreign.is_empty() { cfg.foreign.clone().unwrap_or_default() } else { a.foreign.clone() };
    let opts = AuditOptions {
        tolerances: cfg.tolerances,
        transforms: transforms.iter().map(|t| t.parse::<Transform>().map_err(usage)).collect::<Result<_, _>>()?,
        foreign: foreign.iter().map(|f| foreign_triple(f)).collect::<Result<_, _>>()?,
    };
    let mut report = audit(&traj, &opts).map_err(usage)?;
    if a.convergence {
        let spec = convergence_spec(sc.scheme, cfg.convergence.as_ref(), None)?;
        let table = convergence_study(&spec).map_err(usage)?;
        report = report.with_convergence(table, get_scheme(sc.scheme).min_order.0 as f64);
    }

    writeln!(out, "audit {} on {} levels, M = {}, h = {}, tau = {}, ic {}", report.scheme, report.levels, traj.grid.m, traj.grid.h, traj.grid.tau, traj.meta.ic)?;
    for d in &report.foreign_drift {
        writeln!(out, "  {:<28} rel drift {:>10.3e}  (tracked, not certified)", d.label, d.max_rel_drift)?;
    }
    for c in &report.checks {
        let mark = if c.passed { "ok" } else { "FAIL" };
        writeln!(out, "  {:<28} {:>10.3e} <= {:>8.1e}  {mark}", c.name, c.value, c.tolerance)?;
    }
    if let Some(p) = a.out.as_ref().or(cfg.output.csv.as_ref()) {
        report.write_csv(create(p)?).map_err(usage)?;
    }
    if let Some(p) = a.json.as_ref().or(cfg.output.json.as_ref()) {
        writeln!(create(p)?, "{}", report.to_json())?;
    }
    let passed = report.passed();
    if !passed {
        writeln!(err, "{} of {} checks failed", report.failures().count(), report.checks.len())?;
    }
    Ok(passed)
}

#[derive(Clone, Copy, Serialize)]
struct SymmetryOk {
    name: &'static str,
    applicable: bool,
    ok: bool,
}

#[derive(Serialize)]
struct Reconstructed {
    density: String,
    flux: String,
}

#[derive(Serialize)]
struct VerifyRow {
    scheme: SchemeName,
    triple: String,
    continuum: String,
    identity_ok: bool,
    form: IdentityForm,
    reconstructed: Option<Reconstructed>,
    multiplier_ok: bool,
    limit_ok: bool,
    symmetry_ok: Vec<SymmetryOk>,
    passed: bool,
}

fn verify(a: &VerifyArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let mut rows = Vec::new();
    let mut all = true;
    for name in schemes(a.scheme, cfg) {
        let s = get_scheme(name);
        let report = verify_conservation_identity(&s);
        let sym = check_symmetries(&s);
        let cons = consistency_report(&s.residual, &s.target).map_err(usage)?;
        let order_ok = cons.orders_at_least(s.min_order.0.min(s.min_order.1));
        writeln!(out, "{name}: {}/{} triples pass", report.passed_count(), report.triples.len())?;
        for t in &report.triples {
            let how = match t.form {
                IdentityForm::Stored => "identity holds as stored",
                IdentityForm::Reconstructed => "reconstructed density/flux",
                IdentityForm::MultiplierOnly => "multiplier only, no density/flux found",
                IdentityForm::NotMultiplier => "not a multiplier",
            };
            let mark = if t.passed() && t.limit_ok { "pass" } else { "FAIL" };
            let limit = if t.limit_ok { "" } else { ", continuum limit differs" };
            writeln!(out, "  {:<9} {:<20} {mark}  ({how}{limit})", t.label, t.continuum_label)?;
        }
        for c in &sym.checks {
            let mark = match (c.applicable, c.ok) {
                (false, _) => "n/a ",
                (true, true) => "pass",
                (true, false) => "FAIL",
            };
            writeln!(out, "  symmetry {:<12} {mark}  {}  [{}]", c.name, c.transform, c.detail)?;
        }
        for e in &sym.excluded {
            writeln!(out, "  note: {e}")?;
        }
        writeln!(
            out,
            "  consistency: {}, order (tau, h) = ({}, {})",
            if cons.consistent { "consistent" } else { "INCONSISTENT" },
            fmt_order(cons.order_t),
            fmt_order(cons.order_x)
        )?;
        all &= report.all_passed() && sym.all_ok() && order_ok;

        let symmetry_ok: Vec<SymmetryOk> =
            sym.checks.iter().map(|c| SymmetryOk { name: c.name, applicable: c.applicable, ok: c.ok }).collect();
        for t in &report.triples {
            rows.push(VerifyRow {
                scheme: name,
                triple: t.label.clone(),
                continuum: t.continuum_label.clone(),
                identity_ok: t.identity_ok(),
                form: t.form,
                reconstructed: t.reconstructed.as_ref().map(|(d, f)| Reconstructed { density: sexp::to_sexp(d), flux: sexp::to_sexp(f) }),
                multiplier_ok: t.multiplier_ok,
                limit_ok: t.limit_ok,
                symmetry_ok: symmetry_ok.clone(),
                passed: t.passed() && t.limit_ok,
            });
        }
    }
    if let Some(p) = a.json.as_ref().or(cfg.output.json.as_ref()) {
        let text = serde_json::to_string_pretty(&rows).map_err(|e| CliError::Io(e.to_string()))?;
        writeln!(create(p)?, "{text}")?;
    }
    Ok(all)
}

fn fmt_order(o: Option<i32>) -> String {
    o.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn multipliers(a: &MultipliersArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    let name = require_scheme(a.scheme, cfg)?;
    let ansatz_name = a.ansatz.clone().or(cfg.ansatz.clone()).unwrap_or_else(|| "cross5_linear".into());
    let ansatz = AnsatzSpec::by_name(&ansatz_name).ok_or_else(|| usage(format!("unknown ansatz `{ansatz_name}`")))?;
    let s = get_scheme(name);
    let space = multiplier_space(&s.residual, &ansatz).map_err(usage)?;

    if a.sexp {
        write!(out, "{}", sexp::to_sexp_lines(&space.multipliers))?;
    } else {
        writeln!(out, "{name}, ansatz {ansatz_name} ({} elements): {} multiplier(s)", ansatz.len(), space.multipliers.len())?;
        for (i, (m, c)) in space.multipliers.iter().zip(&space.coords).enumerate() {
            writeln!(out, "  [{i}] {m}")?;
            writeln!(out, "      = {}", combination(ansatz.names(), c))?;
            match taylor_leading(m, 3) {
                Some((0, lead)) => writeln!(out, "      limit: {lead}")?,
                Some((d, lead)) => writeln!(out, "      limit: 0 (vanishes in the continuum limit; leading term {lead} has degree {d})")?,
                None => writeln!(out, "      limit: 0 through degree 3")?,
            }
        }
    }
    if let Some(p) = &a.out {
        write!(create(p)?, "{}", sexp::to_sexp_lines(&space.multipliers))?;
    }
    Ok(true)
}

/// `a*name1 - name2 + ...` over the nonzero coefficients.
fn combination(names: &[String], coeffs: &[crate::stencil_algebra::Rational]) -> String {
    use num_traits::{One, Signed, Zero};
    let mut s = String::new();
    for (n, v) in names.iter().zip(coeffs).filter(|(_, v)| !v.is_zero()) {
        let sign = if v.is_negative() { "-" } else { "+" };
        let mag = v.abs();
        let term = if mag.is_one() { n.clone() } else { format!("{mag}*{n}") };
        if s.is_empty() {
            s = if v.is_negative() { format!("-{term}") } else { term };
        } else {
            s.push_str(&format!(" {sign} {term}"));
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn order(a: &OrderArgs, cfg: &RunConfig, out: &mut dyn Write) -> Result<bool, CliError> {
    writeln!(out, "{:<16} {:<11} {:>7} {:>7}  leading remainder", "scheme", "consistent", "tau", "h")?;
    let mut all = true;
    for name in schemes(a.scheme, cfg) {
        let s = get_scheme(name);
        match consistency_report(&s.residual, &s.target) {
            Ok(r) => {
                let ok = r.consistent && r.orders_at_least(s.min_order.0.min(s.min_order.1));
                all &= ok;
                writeln!(
                    out,
                    "{:<16} {:<11} {:>7} {:>7}  {}",
                    name,
                    if r.consistent { "yes" } else { "NO" },
                    fmt_order(r.order_t),
                    fmt_order(r.order_x),
                    r.leading_residual
                )?;
            }
            Err(e) => {
                all = false;
                writeln!(out, "{name:<16} NO  {e}")?;
            }
        }
    }
    Ok(all)
}

fn convergence_spec(scheme: SchemeName, cfg: Option<&ConvergenceConfig>, a: Option<&ConvergenceArgs>) -> Result<ConvergenceSpec, CliError> {
    let mut spec = ConvergenceSpec::default_for(scheme);
    let pick = |flag: Option<f64>, file: Option<f64>, dflt: f64| flag.or(file).unwrap_or(dflt);
    if let Some(levels) = a.and_then(|a| a.levels.clone()).or(cfg.and_then(|c| c.levels.clone())) {
        spec.levels = levels;
    }
    spec.ratio = pick(a.and_then(|a| a.ratio), cfg.and_then(|c| c.ratio), spec.ratio);
    spec.final_time = pick(a.and_then(|a| a.final_time), cfg.and_then(|c| c.final_time), spec.final_time);
    if let Some(r) = a.and_then(|a| a.refine).or(cfg.and_then(|c| c.refine)) {
        if let Reference::SelfConvergence { refine } = &mut spec.reference {
            *refine = r;
        }
    }
    if spec.levels.len() < 2 {
        return Err(usage("convergence needs at least two levels"));
    }
    Ok(spec)
}

fn convergence(a: &ConvergenceArgs, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    let name = require_scheme(a.scheme, cfg)?;
    let spec = convergence_spec(name, cfg.convergence.as_ref(), Some(a))?;
    let table = convergence_study(&spec).map_err(usage)?;
    match a.out.as_ref().or(cfg.output.csv.as_ref()) {
        Some(p) => table.write_csv(create(p)?).map_err(usage)?,
        None => table.write_csv(&mut *out).map_err(usage)?,
    }
    let expected = get_scheme(name).min_order.0 as f64;
    let tol: Tolerances = cfg.tolerances;
    let ok = table.orders_within(expected, tol.order_tol);
    let orders: Vec<String> = table.orders().iter().map(|o| format!("{o:.3}")).collect();
    writeln!(
        err,
        "{name} against {}: orders [{}], expected {expected} +- {}{}",
        table.reference,
        orders.join(", "),
        tol.order_tol,
        if table.monotone { "" } else { " (errors not monotone)" }
    )?;
    Ok(ok)
}
