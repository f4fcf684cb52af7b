use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::scheme_library::{get_scheme, SchemeName};
use crate::solver::{Bc, Stepper, Trajectory};

use super::drift::require_unit_stride;
use super::AuditError;

/// Finite point transformations applied to a whole trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transform {
    /// `U -> U + eps`
    Gauge(f64),
    /// `U -> U + eps t`
    Galilei(f64),
    /// `U -> U + eps x`; needs a Dirichlet grid and the linear scheme.
    StretchX(f64),
    /// `t, x, h, tau, U -> lam (t, x, h, tau, U)`
    Scale(f64),
}

impl Transform {
    pub fn name(&self) -> &'static str {
        match self {
            Transform::Gauge(_) => "gauge",
            Transform::Galilei(_) => "galilei",
            Transform::StretchX(_) => "stretch_x",
            Transform::Scale(_) => "scale",
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            Transform::Gauge(p) | Transform::Galilei(p) | Transform::StretchX(p) | Transform::Scale(p) => p,
        }
    }

    /// Transforms used when none are requested: all that apply to the trajectory.
    pub fn defaults_for(traj: &Trajectory) -> Vec<Transform> {
        let mut v = vec![Transform::Gauge(1.0), Transform::Galilei(0.37)];
        if traj.scheme == SchemeName::LinearCross && !traj.grid.is_periodic() {
            v.push(Transform::StretchX(0.25));
        }
        v.push(Transform::Scale(2.0));
        v
    }

    pub fn apply(&self, traj: &Trajectory) -> Result<Trajectory, AuditError> {
        let g = traj.grid;
        let tau = g.tau;
        Ok(match *self {
            Transform::Gauge(e) => shift_bc(traj.map_values(|_, _, v| v + e), e, e),
            Transform::Galilei(e) => traj.map_values(|n, _, v| v + e * tau * n as f64),
            Transform::StretchX(e) => {
                if traj.scheme != SchemeName::LinearCross {
                    return Err(AuditError::Inapplicable(format!("stretch_x is not a symmetry of {}", traj.scheme)));
                }
                if g.is_periodic() {
                    return Err(AuditError::Inapplicable("stretch_x needs a Dirichlet grid".into()));
                }
                shift_bc(traj.map_values(|_, j, v| v + e * g.x(j)), e * g.x(-1), e * g.x(g.m as i64))
            }
            Transform::Scale(l) => {
                if !(l > 0.0 && l.is_finite()) {
                    return Err(AuditError::Inapplicable(format!("scale factor must be positive, got {l}")));
                }
                let mut out = traj.map_values(|_, _, v| l * v);
                out.grid.h *= l;
                out.grid.tau *= l;
                out.grid.x0 *= l;
                if let Bc::Dirichlet { left, right } = g.bc {
                    out.grid.bc = Bc::Dirichlet { left: l * left, right: l * right };
                }
                out
            }
        })
    }
}

fn shift_bc(mut traj: Trajectory, dl: f64, dr: f64) -> Trajectory {
    if let Bc::Dirichlet { left, right } = traj.grid.bc {
        traj.grid.bc = Bc::Dirichlet { left: left + dl, right: right + dr };
    }
    traj
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name(), self.parameter())
    }
}

/// `name` or `name:value`, e.g. `galilei:0.37`.
impl FromStr for Transform {
    type Err = AuditError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, value) = match s.split_once([':', '=']) {
            Some((n, v)) => {
                let v = v.trim().parse::<f64>().map_err(|e| AuditError::Inapplicable(format!("{s}: {e}")))?;
                (n.trim(), Some(v))
            }
            None => (s.trim(), None),
        };
        Ok(match name.to_ascii_lowercase().as_str() {
            "gauge" => Transform::Gauge(value.unwrap_or(1.0)),
            "galilei" => Transform::Galilei(value.unwrap_or(0.37)),
            "stretch_x" | "stretch" => Transform::StretchX(value.unwrap_or(0.25)),
            "scale" => Transform::Scale(value.unwrap_or(2.0)),
            other => return Err(AuditError::Inapplicable(format!("unknown transform `{other}`"))),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryResidual {
    pub transform: Transform,
    pub label: String,
    /// Residual of the untransformed trajectory, relative to its largest term scale.
    pub baseline_rel: f64,
    pub max_abs: f64,
    /// `max_abs` over the largest pointwise term scale of the transformed
    /// residual. Pointwise ratios are meaningless where the solution is flat.
    pub max_rel: f64,
}

/// Applies `transform` to every layer (and the mesh, for scaling) and
/// re-evaluates the scheme residual at every interior level.
pub fn symmetry_residual(traj: &Trajectory, transform: Transform) -> Result<SymmetryResidual, AuditError> {
    require_unit_stride(traj)?;
    let scheme = get_scheme(traj.scheme);
    let image = transform.apply(traj)?;
    let base = Stepper::new(&scheme, traj.grid)?.residual_stats(&traj.layers, 0);
    let moved = Stepper::new(&scheme, image.grid)?.residual_stats(&image.layers, 0);
    Ok(SymmetryResidual {
        transform,
        label: transform.to_string(),
        baseline_rel: base.global_rel(),
        max_abs: moved.max_abs,
        max_rel: moved.global_rel(),
    })
}
