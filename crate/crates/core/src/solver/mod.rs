//! Time integration of the schemes on a 1D periodic or Dirichlet grid.
//!
//! Every scheme here is linear in the upper time layer, so one step is a
//! (cyclic) tridiagonal solve; explicit schemes reduce to the diagonal.

mod config;
mod export;
mod ic;
mod stepper;
mod tridiag;

pub use config::{BcConfig, GridConfig, SimulationConfig};
pub use export::{fmt17, read_binary, write_binary, write_csv, BINARY_MAGIC};
pub use ic::{random_smooth_fields, IcPreset, InitialData};
pub use stepper::{init_state, init_state_from_layers, run, step, ResidualStats, Stepper};
pub use tridiag::{solve_tridiagonal, solve_tridiagonal_cyclic, TridiagError};

use serde::{Deserialize, Serialize};

use crate::numeric::KernelError;
use crate::scheme_library::SchemeName;
use crate::stencil_algebra::AlgebraError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bc {
    Periodic,
    Dirichlet { left: f64, right: f64 },
}

/// Uniform grid with `m` unknown nodes.
///
/// Periodic: nodes `x0 + j h`, `j = 0..m`, period `m h`.
/// Dirichlet: unknowns at `x0 + (j + 1) h`, `j = 0..m`, with fixed values at
/// the end nodes `x0` (index `-1`) and `x0 + (m + 1) h` (index `m`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub m: usize,
    pub h: f64,
    pub tau: f64,
    pub x0: f64,
    pub bc: Bc,
}

impl Grid1D {
    pub fn new(m: usize, h: f64, tau: f64, x0: f64, bc: Bc) -> Result<Self, SolverError> {
        let g = Grid1D { m, h, tau, x0, bc };
        g.validate()?;
        Ok(g)
    }

    /// Periodic grid on `[0, 1)` with `tau = ratio * h`.
    pub fn periodic_unit(m: usize, ratio: f64) -> Self {
        let h = 1.0 / m as f64;
        Grid1D { m, h, tau: ratio * h, x0: 0.0, bc: Bc::Periodic }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.m < 3 {
            return Err(SolverError::Grid(format!("need at least 3 nodes, got {}", self.m)));
        }
        if !(self.h > 0.0 && self.h.is_finite()) || !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(SolverError::Grid(format!("steps must be positive, got h={} tau={}", self.h, self.tau)));
        }
        Ok(())
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.bc, Bc::Periodic)
    }

    /// Values stored per time layer: `m`, plus the two end nodes for Dirichlet.
    pub fn layer_len(&self) -> usize {
        match self.bc {
            Bc::Periodic => self.m,
            Bc::Dirichlet { .. } => self.m + 2,
        }
    }

    /// Storage index of node `j`, wrapping for periodic grids.
    pub fn slot(&self, j: i64) -> Option<usize> {
        let m = self.m as i64;
        match self.bc {
            Bc::Periodic => Some(j.rem_euclid(m) as usize),
            Bc::Dirichlet { .. } => (-1..=m).contains(&j).then(|| (j + 1) as usize),
        }
    }

    /// Coordinate of node `j`, unwrapped past the periodic seam.
    pub fn x(&self, j: i64) -> f64 {
        match self.bc {
            Bc::Periodic => self.x0 + j as f64 * self.h,
            Bc::Dirichlet { .. } => self.x0 + (j + 1) as f64 * self.h,
        }
    }

    pub fn t(&self, n: i64) -> f64 {
        n as f64 * self.tau
    }

    /// Length of the domain covered by the summation `sum_j h * (...)`.
    pub fn length(&self) -> f64 {
        self.m as f64 * self.h
    }

    /// Layer filled from a function of `x` (end nodes included).
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        match self.bc {
            Bc::Periodic => (0..self.m as i64).map(|j| f(self.x(j))).collect(),
            Bc::Dirichlet { .. } => (-1..=self.m as i64).map(|j| f(self.x(j))).collect(),
        }
    }

    /// Node indices of the unknowns.
    pub fn unknowns(&self) -> std::ops::Range<i64> {
        0..self.m as i64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionState {
    /// Time index of `curr`.
    pub n: usize,
    pub prev: Vec<f64>,
    pub curr: Vec<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub ic: String,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub scheme: SchemeName,
    /// Recorded layers; layer `j` is time level `j * stride`.
    pub layers: Vec<Vec<f64>>,
    pub stride: usize,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn level(&self, j: usize) -> usize {
        j * self.stride
    }

    pub fn final_time(&self) -> f64 {
        self.grid.t(self.level(self.layers.len().saturating_sub(1)) as i64)
    }

    /// Applies `f(n, j, value)` to every stored value (end nodes included).
    pub fn map_values(&self, f: impl Fn(usize, i64, f64) -> f64) -> Trajectory {
        let offset = if self.grid.is_periodic() { 0 } else { 1 };
        let layers = self
            .layers
            .iter()
            .enumerate()
            .map(|(i, layer)| {
                let n = self.level(i);
                layer.iter().enumerate().map(|(s, v)| f(n, s as i64 - offset, *v)).collect()
            })
            .collect();
        Trajectory { layers, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("layer has {got} values, grid expects {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("singular step system at time level {n}: {source}")]
    Singular { n: usize, source: TridiagError },
    #[error("non-finite value produced at time level {n}, node {node}")]
    NonFinite { n: usize, node: usize },
    #[error("scheme is not linear in the upper layer: {0}")]
    NotLinearInUpperLayer(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for SolverError {
    fn from(e: std::io::Error) -> Self {
        SolverError::Io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_slots_wrap() {
        let g = Grid1D::periodic_unit(8, 0.5);
        assert_eq!(g.slot(-1), Some(7));
        assert_eq!(g.slot(8), Some(0));
        assert_eq!(g.x(-1), -0.125);
    }

    #[test]
    fn dirichlet_slots_stop_at_end_nodes() {
        let g = Grid1D::new(4, 0.2, 0.1, 0.0, Bc::Dirichlet { left: 0.0, right: 0.0 }).unwrap();
        assert_eq!(g.slot(-1), Some(0));
        assert_eq!(g.slot(4), Some(5));
        assert_eq!(g.slot(5), None);
        assert!((g.x(4) - 1.0).abs() < 1e-15);
        assert_eq!(g.layer_len(), 6);
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(Grid1D::new(2, 0.1, 0.1, 0.0, Bc::Periodic).is_err());
        assert!(Grid1D::new(8, 0.0, 0.1, 0.0, Bc::Periodic).is_err());
        assert!(Grid1D::new(8, 0.1, -1.0, 0.0, Bc::Periodic).is_err());
    }
}
