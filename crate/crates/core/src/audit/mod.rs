//! Numerical checks on trajectories: drift of conserved quantities,
//! pointwise conservation-law residuals, windowed flux balance, symmetry
//! residuals and convergence order.
//!
//! Every tolerance here is a regression value for binary64 runs; none is a
//! property of the schemes themselves.

mod convergence;
mod drift;
mod symmetry;

pub use convergence::{convergence_study, ConvergenceRow, ConvergenceSpec, ConvergenceTable, Reference};
pub use drift::{
    admissible_levels, default_window, drift_series, evaluate_density, flux_balance, grid_sum, pointwise_residual,
    DriftRecord, FluxBalance, GridSum, PointwiseRecord, TripleKernels,
};
pub use symmetry::{symmetry_residual, SymmetryResidual, Transform};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::numeric::KernelError;
use crate::scheme_library::{get_scheme, ConservationTriple, SchemeName};
use crate::solver::{fmt17, Grid1D, SolverError, Stepper, Trajectory, TrajectoryMeta};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AuditError {
    #[error("trajectory must record every level (stride 1), got stride {0}")]
    Stride(usize),
    #[error("{0} needs a periodic grid; use flux_balance on Dirichlet grids")]
    RequiresPeriodic(&'static str),
    #[error("{what} stencil leaves the stored data at level {n}, node {m}")]
    StencilOutside { what: String, n: usize, m: i64 },
    #[error("trajectory too short: need at least {needed} levels")]
    TooShort { needed: usize },
    #[error("window [{m1}, {m2}] does not fit the grid and the flux stencil")]
    Window { m1: i64, m2: i64 },
    #[error("inapplicable transform: {0}")]
    Inapplicable(String),
    #[error("convergence study: {0}")]
    Convergence(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("io: {0}")]
    Io(String),
}

impl From<csv::Error> for AuditError {
    fn from(e: csv::Error) -> Self {
        AuditError::Io(e.to_string())
    }
}

impl From<std::io::Error> for AuditError {
    fn from(e: std::io::Error) -> Self {
        AuditError::Io(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative drift of certified conserved quantities.
    pub drift_rel: f64,
    /// `D-tau Theta + D-h Phi - Lambda F` relative to its term magnitudes.
    pub pointwise_rel: f64,
    /// Windowed flux balance, relative.
    pub flux_rel: f64,
    /// Scheme residual of the (transformed) trajectory, relative.
    pub symmetry_rel: f64,
    /// Scheme residual of the trajectory itself, relative.
    pub scheme_rel: f64,
    /// Allowed deviation of the observed convergence order.
    pub order_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            drift_rel: 1e-10,
            pointwise_rel: 1e-12,
            flux_rel: 1e-11,
            symmetry_rel: 1e-10,
            scheme_rel: 1e-12,
            order_tol: 0.2,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AuditOptions {
    pub tolerances: Tolerances,
    /// Transforms to apply; empty selects [`Transform::defaults_for`].
    pub transforms: Vec<Transform>,
    /// Laws of other schemes to track on this trajectory. They are reported
    /// but never counted as checks.
    pub foreign: Vec<ConservationTriple>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: String, value: f64, tolerance: f64) -> Self {
        Check { name, value, tolerance, passed: value.is_finite() && value <= tolerance }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub scheme: SchemeName,
    pub grid: Grid1D,
    pub meta: TrajectoryMeta,
    pub levels: usize,
    pub scheme_residual_abs: f64,
    pub scheme_residual_rel: f64,
    pub drift: Vec<DriftRecord>,
    pub foreign_drift: Vec<DriftRecord>,
    pub pointwise: Vec<PointwiseRecord>,
    pub flux_balance: Vec<FluxBalance>,
    pub symmetry: Vec<SymmetryResidual>,
    pub convergence: Option<ConvergenceTable>,
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn drift(&self, label: &str) -> Option<&DriftRecord> {
        self.drift.iter().chain(&self.foreign_drift).find(|d| d.label == label)
    }

    /// Attaches a convergence table, checking its orders against `expected`.
    pub fn with_convergence(mut self, table: ConvergenceTable, expected: f64) -> Self {
        for (i, o) in table.orders().into_iter().enumerate() {
            let tol = self.tolerances.order_tol;
            self.checks.push(Check::at_most(format!("order[{i}] - {expected}"), (o - expected).abs(), tol));
        }
        self.convergence = Some(table);
        self
    }

    /// Columns `level,triple,Q_h,drift`, drift measured from the first level.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AuditError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["level", "triple", "Q_h", "drift"])?;
        for d in self.drift.iter().chain(&self.foreign_drift) {
            let q0 = d.q.first().copied().unwrap_or(0.0);
            for (n, q) in d.levels().zip(&d.q) {
                w.write_record([n.to_string(), d.label.clone(), fmt17(*q), fmt17(q - q0)])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields serialize")
    }
}

/// Runs every trajectory check for the scheme's certified triples.
///
/// Periodic grids get drift series; Dirichlet grids get the windowed flux
/// balance on the widest window that fits.
pub fn audit(traj: &Trajectory, opts: &AuditOptions) -> Result<AuditReport, AuditError> {
    drift::require_unit_stride(traj)?;
    let tol = opts.tolerances;
    let scheme = get_scheme(traj.scheme);
    let (res_abs, res_rel) = Stepper::new(&scheme, traj.grid)?.max_residual(&traj.layers, 0);
    let mut checks = vec![Check::at_most("scheme residual".into(), res_rel, tol.scheme_rel)];

    let mut drift = Vec::new();
    let mut pointwise = Vec::new();
    let mut balance = Vec::new();
    for triple in &scheme.triples {
        let p = pointwise_residual(traj, triple)?;
        checks.push(Check::at_most(format!("{} pointwise", p.label), p.max_rel, tol.pointwise_rel));
        pointwise.push(p);
        if traj.grid.is_periodic() {
            let d = drift_series(traj, triple)?;
            checks.push(Check::at_most(format!("{} drift", d.label), d.max_rel_drift, tol.drift_rel));
            drift.push(d);
        } else {
            let b = flux_balance(traj, triple, default_window(traj, triple)?)?;
            checks.push(Check::at_most(format!("{} flux balance", b.label), b.max_rel, tol.flux_rel));
            balance.push(b);
        }
    }

    let mut foreign_drift = Vec::new();
    for triple in &opts.foreign {
        if traj.grid.is_periodic() {
            foreign_drift.push(drift_series(traj, triple)?);
        } else {
            balance.push(flux_balance(traj, triple, default_window(traj, triple)?)?);
        }
    }

    let transforms = if opts.transforms.is_empty() { Transform::defaults_for(traj) } else { opts.transforms.clone() };
    let mut symmetry = Vec::new();
    for t in transforms {
        let s = symmetry_residual(traj, t)?;
        checks.push(Check::at_most(format!("{} residual", s.label), s.max_rel, tol.symmetry_rel));
        symmetry.push(s);
    }

    Ok(AuditReport {
        scheme: traj.scheme,
        grid: traj.grid,
        meta: traj.meta.clone(),
        levels: traj.layers.len(),
        scheme_residual_abs: res_abs,
        scheme_residual_rel: res_rel,
        drift,
        foreign_drift,
        pointwise,
        flux_balance: balance,
        symmetry,
        convergence: None,
        tolerances: tol,
        checks,
    })
}
