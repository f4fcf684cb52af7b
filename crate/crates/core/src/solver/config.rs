use serde::{Deserialize, Serialize};

use crate::scheme_library::SchemeName;

use super::{Bc, Grid1D, IcPreset, SolverError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BcConfig {
    #[default]
    Periodic,
    Dirichlet { left: f64, right: f64 },
}

/// Grid section of a config file. Missing steps default to a unit domain
/// and `tau = h/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub m: usize,
    #[serde(default)]
    pub h: Option<f64>,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub bc: BcConfig,
}

impl GridConfig {
    pub fn periodic(m: usize) -> Self {
        GridConfig { m, h: None, tau: None, x0: 0.0, bc: BcConfig::Periodic }
    }

    pub fn build(&self) -> Result<Grid1D, SolverError> {
        let (bc, cells) = match self.bc {
            BcConfig::Periodic => (Bc::Periodic, self.m),
            BcConfig::Dirichlet { left, right } => (Bc::Dirichlet { left, right }, self.m + 1),
        };
        let h = self.h.unwrap_or(1.0 / cells.max(1) as f64);
        let tau = self.tau.unwrap_or(h / 2.0);
        Grid1D::new(self.m, h, tau, self.x0, bc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub scheme: SchemeName,
    pub grid: GridConfig,
    pub ic: IcPreset,
    pub steps: usize,
    #[serde(default = "one")]
    pub record_stride: usize,
}

fn one() -> usize {
    1
}

impl SimulationConfig {
    pub fn from_toml(text: &str) -> Result<Self, SolverError> {
        toml::from_str(text).map_err(|e| SolverError::Config(e.to_string()))
    }
}
