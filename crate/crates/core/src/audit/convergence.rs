use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::scheme_library::SchemeName;
use crate::solver::{fmt17, run, BcConfig, GridConfig, IcPreset, SimulationConfig, SolverError};

use super::AuditError;

/// Solution the computed layers are compared with.
#[derive(Clone)]
pub enum Reference {
    /// Closed-form `u(t, x)`.
    Exact { name: String, u: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> },
    /// The same scheme on a grid `refine` times finer than the finest level.
    SelfConvergence { refine: usize },
}

impl Reference {
    pub fn exact(name: &str, u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Reference::Exact { name: name.to_string(), u: Arc::new(u) }
    }

    /// `sin(2 pi (x - t))`, matching [`IcPreset::Sine`] with `traveling = true`.
    pub fn traveling_sine() -> Self {
        Reference::exact("sin(2 pi (x - t))", |t, x| (2.0 * PI * (x - t)).sin())
    }

    pub fn describe(&self) -> String {
        match self {
            Reference::Exact { name, .. } => format!("exact {name}"),
            Reference::SelfConvergence { refine } => format!("self-convergence, reference {refine}x finer"),
        }
    }
}

impl std::fmt::Debug for Reference {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.describe())
    }
}

/// A refinement study at fixed `tau / h` and final time.
#[derive(Clone, Debug)]
pub struct ConvergenceSpec {
    pub scheme: SchemeName,
    pub ic: IcPreset,
    pub bc: BcConfig,
    /// Node counts, coarse to fine; each must divide evenly into the next
    /// (`h` is halved when `M` doubles on periodic grids).
    pub levels: Vec<usize>,
    pub ratio: f64,
    pub final_time: f64,
    pub reference: Reference,
}

impl ConvergenceSpec {
    /// LinearCross against the exact traveling wave.
    pub fn linear_default() -> Self {
        ConvergenceSpec {
            scheme: SchemeName::LinearCross,
            ic: IcPreset::Sine { k: 1.0, amplitude: 1.0, traveling: true },
            bc: BcConfig::Periodic,
            levels: vec![32, 64, 128, 256],
            ratio: 0.5,
            final_time: 0.5,
            reference: Reference::traveling_sine(),
        }
    }

    /// A nonlinear scheme against its own solution on a 4x finer grid.
    pub fn nonlinear_default(scheme: SchemeName) -> Self {
        ConvergenceSpec {
            scheme,
            ic: IcPreset::Sine { k: 1.0, amplitude: 0.1, traveling: false },
            bc: BcConfig::Periodic,
            levels: vec![32, 64, 128, 256],
            ratio: 0.5,
            final_time: 0.5,
            reference: Reference::SelfConvergence { refine: 4 },
        }
    }

    pub fn default_for(scheme: SchemeName) -> Self {
        if scheme.is_nonlinear() {
            Self::nonlinear_default(scheme)
        } else {
            Self::linear_default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub h: f64,
    pub tau: f64,
    pub steps: usize,
    pub error: f64,
    /// `log(e_{i-1} / e_i) / log(h_{i-1} / h_i)`; absent on the first row and
    /// when both errors vanish.
    pub order: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub scheme: SchemeName,
    pub reference: String,
    pub final_time: f64,
    pub rows: Vec<ConvergenceRow>,
    /// Errors decrease strictly from level to level.
    pub monotone: bool,
}

impl ConvergenceTable {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    /// Order between the two finest levels.
    pub fn observed_order(&self) -> Option<f64> {
        self.orders().last().copied()
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }

    /// Every observed order within `tol` of `expected`.
    pub fn orders_within(&self, expected: f64, tol: f64) -> bool {
        let o = self.orders();
        !o.is_empty() && o.iter().all(|p| (p - expected).abs() <= tol)
    }

    /// Columns `m,h,tau,steps,error,order`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AuditError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "h", "tau", "steps", "error", "order"])?;
        for r in &self.rows {
            w.write_record([
                r.m.to_string(),
                fmt17(r.h),
                fmt17(r.tau),
                r.steps.to_string(),
                fmt17(r.error),
                r.order.map(fmt17).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(SolverError::from)?;
        Ok(())
    }
}

fn grid_config(bc: BcConfig, m: usize, ratio: f64) -> GridConfig {
    let cells = match bc {
        BcConfig::Periodic => m,
        BcConfig::Dirichlet { .. } => m + 1,
    };
    let h = 1.0 / cells as f64;
    GridConfig { m, h: Some(h), tau: Some(ratio * h), x0: 0.0, bc }
}

fn steps_for(final_time: f64, tau: f64) -> Result<usize, AuditError> {
    let steps = (final_time / tau).round();
    if steps < 1.0 || ((steps * tau) - final_time).abs() > 1e-9 * final_time.max(1.0) {
        return Err(AuditError::Convergence(format!("final time {final_time} is not a multiple of tau = {tau}")));
    }
    Ok(steps as usize)
}

fn final_layer(scheme: SchemeName, ic: &IcPreset, grid: GridConfig, steps: usize) -> Result<(crate::solver::Grid1D, Vec<f64>), AuditError> {
    let traj = run(&SimulationConfig { scheme, grid, ic: ic.clone(), steps, record_stride: steps })?;
    let layer = traj.layers.last().cloned().ok_or(AuditError::TooShort { needed: 2 })?;
    Ok((traj.grid, layer))
}

/// Max-norm errors over the unknowns at the final time, and observed orders.
/// Non-monotone errors are reported in the table, not treated as failures.
pub fn convergence_study(spec: &ConvergenceSpec) -> Result<ConvergenceTable, AuditError> {
    if spec.levels.is_empty() {
        return Err(AuditError::Convergence("no refinement levels".into()));
    }
    let cells = |m: usize| match spec.bc {
        BcConfig::Periodic => m,
        BcConfig::Dirichlet { .. } => m + 1,
    };
    let reference = match &spec.reference {
        Reference::Exact { .. } => None,
        Reference::SelfConvergence { refine } => {
            let finest = *spec.levels.iter().max().unwrap();
            let m_ref = cells(finest) * refine - (cells(finest) - finest);
            let g = grid_config(spec.bc, m_ref, spec.ratio);
            let steps = steps_for(spec.final_time, g.tau.unwrap())?;
            Some(final_layer(spec.scheme, &spec.ic, g, steps)?)
        }
    };

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &m in &spec.levels {
        let gc = grid_config(spec.bc, m, spec.ratio);
        let steps = steps_for(spec.final_time, gc.tau.unwrap())?;
        let (grid, layer) = final_layer(spec.scheme, &spec.ic, gc, steps)?;
        let t = grid.t(steps as i64);
        let mut error = 0.0f64;
        for j in grid.unknowns() {
            let v = layer[grid.slot(j).unwrap()];
            let exact = match (&spec.reference, &reference) {
                (Reference::Exact { u, .. }, _) => u(t, grid.x(j)),
                (_, Some((rg, rl))) => {
                    let r = cells(rg.m) / cells(m);
                    if cells(m) * r != cells(rg.m) {
                        return Err(AuditError::Convergence(format!("level {m} does not nest in the reference grid")));
                    }
                    let jr = match spec.bc {
                        BcConfig::Periodic => j * r as i64,
                        BcConfig::Dirichlet { .. } => (j + 1) * r as i64 - 1,
                    };
                    rl[rg.slot(jr).unwrap()]
                }
                _ => unreachable!("self reference computed above"),
            };
            error = error.max((v - exact).abs());
        }
        let order = rows.last().and_then(|p: &ConvergenceRow| {
            if p.error == 0.0 && error == 0.0 {
                None
            } else {
                Some((p.error / error).ln() / (p.h / grid.h).ln())
            }
        });
        rows.push(ConvergenceRow { m, h: grid.h, tau: grid.tau, steps, error, order });
    }
    let monotone = rows.windows(2).all(|w| w[1].error < w[0].error);
    Ok(ConvergenceTable {
        scheme: spec.scheme,
        reference: spec.reference.describe(),
        final_time: spec.final_time,
        rows,
        monotone,
    })
}
