use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Bc, Grid1D, TrajectoryMeta};

/// Initial displacement and velocity sampled on a grid layer.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData {
    pub u0: Vec<f64>,
    pub v0: Vec<f64>,
}

impl InitialData {
    pub fn from_fns(grid: &Grid1D, u0: impl Fn(f64) -> f64, v0: impl Fn(f64) -> f64) -> Self {
        let mut d = InitialData { u0: grid.sample(u0), v0: grid.sample(v0) };
        d.apply_bc(grid);
        d
    }

    /// Dirichlet end nodes take the boundary values and zero velocity.
    fn apply_bc(&mut self, grid: &Grid1D) {
        if let Bc::Dirichlet { left, right } = grid.bc {
            let last = self.u0.len() - 1;
            self.u0[0] = left;
            self.u0[last] = right;
            self.v0[0] = 0.0;
            self.v0[last] = 0.0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum IcPreset {
    Zero {},
    Affine {
        a: f64,
        b: f64,
    },
    /// `amplitude * sin(2 pi k x / L)`; `traveling` adds the velocity of a
    /// right-moving unit-speed wave.
    Sine {
        #[serde(default = "one")]
        k: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        traveling: bool,
    },
    Gaussian {
        center: f64,
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// A few Fourier modes with random amplitudes and phases.
    RandomSmooth {
        seed: u64,
        #[serde(default = "default_random_amplitude")]
        amplitude: f64,
        #[serde(default = "default_modes")]
        modes: u32,
    },
}

fn one() -> f64 {
    1.0
}

fn default_random_amplitude() -> f64 {
    0.08
}

fn default_modes() -> u32 {
    4
}

impl IcPreset {
    pub fn describe(&self) -> String {
        match self {
            IcPreset::Zero {} => "zero".into(),
            IcPreset::Affine { a, b } => format!("affine(a={a}, b={b})"),
            IcPreset::Sine { k, amplitude, traveling } => {
                format!("sine(k={k}, amplitude={amplitude}{})", if *traveling { ", traveling" } else { "" })
            }
            IcPreset::Gaussian { center, width, amplitude } => {
                format!("gaussian(center={center}, width={width}, amplitude={amplitude})")
            }
            IcPreset::RandomSmooth { seed, amplitude, modes } => {
                format!("random_smooth(seed={seed}, amplitude={amplitude}, modes={modes})")
            }
        }
    }

    pub fn meta(&self) -> TrajectoryMeta {
        let seed = match self {
            IcPreset::RandomSmooth { seed, .. } => Some(*seed),
            _ => None,
        };
        TrajectoryMeta { ic: self.describe(), seed }
    }

    pub fn sample(&self, grid: &Grid1D) -> InitialData {
        let len = grid.length();
        let x0 = grid.x0;
        match *self {
            IcPreset::Zero {} => InitialData::from_fns(grid, |_| 0.0, |_| 0.0),
            IcPreset::Affine { a, b } => InitialData::from_fns(grid, |x| a + b * x, |_| 0.0),
            IcPreset::Sine { k, amplitude, traveling } => {
                let w = 2.0 * PI * k / len;
                let c = if traveling { -amplitude * w } else { 0.0 };
                InitialData::from_fns(grid, |x| amplitude * (w * (x - x0)).sin(), |x| c * (w * (x - x0)).cos())
            }
            IcPreset::Gaussian { center, width, amplitude } => {
                let periodic = grid.is_periodic();
                let dist = move |x: f64| {
                    let d = x - center;
                    if periodic {
                        d - len * (d / len).round()
                    } else {
                        d
                    }
                };
                InitialData::from_fns(grid, |x| amplitude * (-(dist(x) / width).powi(2)).exp(), |_| 0.0)
            }
            IcPreset::RandomSmooth { seed, amplitude, modes } => {
                let (u, v) = random_smooth_fields(seed, amplitude, modes, len);
                InitialData::from_fns(grid, |x| u(x - x0), |x| v(x - x0))
            }
        }
    }
}

/// Seeded random displacement and velocity, each a sum of `modes` Fourier
/// modes of period `len` with amplitudes decaying like `1/j^2`.
pub fn random_smooth_fields(seed: u64, amplitude: f64, modes: u32, len: f64) -> (impl Fn(f64) -> f64, impl Fn(f64) -> f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |scale: f64| -> Vec<(f64, f64, f64)> {
        (1..=modes)
            .map(|j| {
                let j = j as f64;
                let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                let a = sign * rng.gen_range(0.5..1.0) * scale / (j * j);
                (j, a, rng.gen_range(0.0..2.0 * PI))
            })
            .collect()
    };
    let u_modes = draw(amplitude);
    let v_modes = draw(amplitude * 2.0 * PI / len);
    let eval = move |modes: Vec<(f64, f64, f64)>| {
        move |x: f64| {
            modes
                .iter()
                .map(|(j, a, phi)| a * (2.0 * PI * j * x / len + phi).sin())
                .sum::<f64>()
        }
    };
    (eval(u_modes), eval(v_modes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_smooth_is_reproducible_and_moderate() {
        let g = Grid1D::periodic_unit(128, 0.5);
        let p = IcPreset::RandomSmooth { seed: 42, amplitude: 0.08, modes: 4 };
        let a = p.sample(&g);
        assert_eq!(a, p.sample(&g));
        let max_ux = (0..128)
            .map(|j| ((a.u0[(j + 1) % 128] - a.u0[j]) / g.h).abs())
            .fold(0.0, f64::max);
        assert!(max_ux > 0.1 && max_ux < 1.5, "{max_ux}");
    }

    #[test]
    fn presets_parse_from_toml() {
        let p: IcPreset = toml::from_str("preset = \"sine\"\nk = 2.0\ntraveling = true").unwrap();
        assert_eq!(p, IcPreset::Sine { k: 2.0, amplitude: 1.0, traveling: true });
        assert!(toml::from_str::<IcPreset>("preset = \"zero\"\nbogus = 1").is_err());
    }

    #[test]
    fn dirichlet_end_nodes_take_boundary_values() {
        let g = Grid1D::new(5, 0.1, 0.05, 0.0, Bc::Dirichlet { left: 1.0, right: 2.0 }).unwrap();
        let d = IcPreset::Zero {}.sample(&g);
        assert_eq!(d.u0, vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 2.0]);
    }
}
