use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::audit::Tolerances;
use crate::scheme_library::SchemeName;
use crate::solver::{GridConfig, IcPreset};

/// Contents of a `--config` file. Every field is optional; command-line
/// flags take precedence.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand the file is meant for; checked against the one invoked.
    pub command: Option<String>,
    pub scheme: Option<SchemeName>,
    pub steps: Option<usize>,
    pub record_stride: Option<usize>,
    pub grid: Option<GridConfig>,
    pub ic: Option<IcPreset>,
    #[serde(default)]
    pub output: OutputConfig,
    /// Ansatz name for `multipliers`.
    pub ansatz: Option<String>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub convergence: Option<ConvergenceConfig>,
    /// Transforms for `audit`, e.g. `["gauge:1", "galilei:0.37"]`.
    pub transforms: Option<Vec<String>>,
    /// Laws of other schemes tracked by `audit`, as `Scheme:Label`.
    pub foreign: Option<Vec<String>>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub binary: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub levels: Option<Vec<usize>>,
    pub ratio: Option<f64>,
    pub final_time: Option<f64>,
    /// Refinement factor of the self-convergence reference.
    pub refine: Option<usize>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let c: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if let Some(g) = &self.grid {
            g.build().map_err(|e| e.to_string())?;
        }
        if self.record_stride == Some(0) {
            return Err("record_stride must be at least 1".into());
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("drift_rel", t.drift_rel),
            ("pointwise_rel", t.pointwise_rel),
            ("flux_rel", t.flux_rel),
            ("symmetry_rel", t.symmetry_rel),
            ("scheme_rel", t.scheme_rel),
            ("order_tol", t.order_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        if let Some(c) = &self.convergence {
            if c.levels.as_ref().is_some_and(|l| l.len() < 2) {
                return Err("convergence needs at least two levels".into());
            }
            if c.ratio.is_some_and(|r| r <= 0.0 || r.is_nan()) || c.final_time.is_some_and(|t| t <= 0.0 || t.is_nan()) {
                return Err("convergence ratio and final_time must be positive".into());
            }
            if c.refine.is_some_and(|r| r < 2) {
                return Err("convergence refine must be at least 2".into());
            }
        }
        Ok(())
    }
}

/// `--ic` value: a preset name (`sine`) or inline fields
/// (`preset=gaussian,center=0.5,width=0.1`).
pub fn parse_ic(s: &str) -> Result<IcPreset, String> {
    let text = if s.contains('=') {
        s.split(',')
            .map(|kv| {
                let (k, v) = kv.split_once('=').ok_or_else(|| format!("bad --ic field `{kv}`"))?;
                let v = v.trim();
                let quoted = v.parse::<f64>().is_err() && v != "true" && v != "false";
                Ok(if quoted { format!("{} = \"{v}\"", k.trim()) } else { format!("{} = {v}", k.trim()) })
            })
            .collect::<Result<Vec<_>, String>>()?
            .join("\n")
    } else {
        format!("preset = \"{}\"", s.trim())
    };
    toml::from_str(&text).map_err(|e| format!("--ic {s}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_file_parses() {
        let c = RunConfig::from_toml(
            r#"
            command = "audit"
            scheme = "NonlinearNine3"
            steps = 200
            transforms = ["gauge", "scale:3"]
            [grid]
            m = 64
            [ic]
            preset = "random_smooth"
            seed = 5
            [output]
            csv = "drift.csv"
            [tolerances]
            drift_rel = 1e-9
            [convergence]
            levels = [16, 32, 64]
            "#,
        )
        .unwrap();
        assert_eq!(c.scheme, Some(SchemeName::NonlinearNine3));
        assert_eq!(c.tolerances.drift_rel, 1e-9);
        assert_eq!(c.tolerances.pointwise_rel, Tolerances::default().pointwise_rel);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(RunConfig::from_toml("speed = 1").is_err());
        assert!(RunConfig::from_toml("[output]\npng = \"a.png\"").is_err());
        assert!(RunConfig::from_toml("[tolerances]\ndrift = 1.0").is_err());
        assert!(RunConfig::from_toml("[grid]\nm = 2").is_err());
        assert!(RunConfig::from_toml("[tolerances]\ndrift_rel = -1.0").is_err());
        assert!(RunConfig::from_toml("[ic]\npreset = \"zero\"\nbogus = 1").is_err());
    }

    #[test]
    fn ic_flag_forms() {
        assert_eq!(parse_ic("zero").unwrap(), IcPreset::Zero {});
        assert_eq!(
            parse_ic("preset=gaussian,center=0.5,width=0.1").unwrap(),
            IcPreset::Gaussian { center: 0.5, width: 0.1, amplitude: 1.0 }
        );
        assert!(parse_ic("square").is_err());
    }
}
