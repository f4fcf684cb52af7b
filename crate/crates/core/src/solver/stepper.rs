use crate::numeric::{eval_at, Evaluation, Kernel};
use crate::scheme_library::{get_scheme, Scheme, SchemeName, StepperKind};
use crate::stencil_algebra::{DiffPoly, Var};

use super::ic::InitialData;
use super::{solve_tridiagonal, solve_tridiagonal_cyclic, Bc, Grid1D, SimulationConfig, SolutionState, SolverError, Trajectory};

/// Residual maxima over a stretch of layers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ResidualStats {
    pub max_abs: f64,
    /// Largest pointwise `|F| / scale`.
    pub max_rel: f64,
    /// Largest pointwise scale (sum of absolute term values).
    pub max_scale: f64,
}

impl ResidualStats {
    /// `max_abs / max_scale`: the residual against the trajectory-wide
    /// magnitude of the scheme terms.
    pub fn global_rel(&self) -> f64 {
        if self.max_scale > 0.0 {
            self.max_abs / self.max_scale
        } else {
            self.max_abs
        }
    }
}

/// A scheme compiled for a fixed grid.
///
/// The residual `F` is affine in `Uhat_-`, `Uhat`, `Uhat_+`; with
/// `a_l = dF/dU[1,l]` (independent of the upper layer) and any guess `G`,
/// the new layer is `G + d` where `sum_l a_l d_{j+l} = -F(G)`.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Grid1D,
    scheme: SchemeName,
    residual: Kernel,
    upper: [Kernel; 3],
    explicit: bool,
}

fn upper_layer_check(f: &DiffPoly) -> Result<(), SolverError> {
    for (m, _) in f.terms() {
        let mut degree = 0;
        for (v, e) in m.factors() {
            if let Var::Grid(1, l) = v {
                if l.abs() > 1 {
                    return Err(SolverError::NotLinearInUpperLayer(format!("upper-layer offset {l} outside [-1, 1]")));
                }
                degree += e;
            } else if let Var::Grid(k, _) = v {
                if *k > 1 {
                    return Err(SolverError::NotLinearInUpperLayer(format!("time offset {k}")));
                }
            }
        }
        if degree > 1 {
            return Err(SolverError::NotLinearInUpperLayer(m.to_string()));
        }
    }
    Ok(())
}

impl Stepper {
    pub fn new(scheme: &Scheme, grid: Grid1D) -> Result<Self, SolverError> {
        grid.validate()?;
        let f = &scheme.residual;
        upper_layer_check(f)?;
        let coef = |l: i32| Kernel::compile(&f.derivative(&Var::Grid(1, l)), grid.h, grid.tau);
        let upper = [coef(-1)?, coef(0)?, coef(1)?];
        let explicit = upper[0].is_zero() && upper[2].is_zero();
        if explicit != (scheme.stepper_kind != StepperKind::ImplicitTridiagonal) {
            return Err(SolverError::NotLinearInUpperLayer(format!(
                "{} declared {:?} but its upper-layer coupling says otherwise",
                scheme.name, scheme.stepper_kind
            )));
        }
        Ok(Stepper {
            grid,
            scheme: scheme.name,
            residual: Kernel::compile(f, grid.h, grid.tau)?,
            upper,
            explicit,
        })
    }

    pub fn for_scheme(name: SchemeName, grid: Grid1D) -> Result<Self, SolverError> {
        Stepper::new(&get_scheme(name), grid)
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn scheme(&self) -> SchemeName {
        self.scheme
    }

    pub fn is_explicit(&self) -> bool {
        self.explicit
    }

    /// Scheme residual centered at level `n` (layers `n-1`, `n`, `n+1`), node `j`.
    pub fn residual_at(&self, prev: &[f64], curr: &[f64], next: &[f64], n: usize, j: i64) -> Evaluation {
        let n = n as i64;
        let layer = |lv: i64| match lv - n {
            -1 => Some(prev),
            0 => Some(curr),
            1 => Some(next),
            _ => None,
        };
        eval_at(&self.residual, &self.grid, layer, n, j).expect("residual stencil fits the three layers")
    }

    /// Largest absolute and relative residual over every interior level of `layers`,
    /// where `layers[i]` is time level `first_level + i`.
    pub fn max_residual(&self, layers: &[Vec<f64>], first_level: usize) -> (f64, f64) {
        let s = self.residual_stats(layers, first_level);
        (s.max_abs, s.max_rel)
    }

    pub fn residual_stats(&self, layers: &[Vec<f64>], first_level: usize) -> ResidualStats {
        let mut s = ResidualStats::default();
        for i in 1..layers.len().saturating_sub(1) {
            for j in self.grid.unknowns() {
                let e = self.residual_at(&layers[i - 1], &layers[i], &layers[i + 1], first_level + i, j);
                s.max_abs = s.max_abs.max(e.value.abs());
                s.max_rel = s.max_rel.max(e.relative());
                s.max_scale = s.max_scale.max(e.scale);
            }
        }
        s
    }

    pub fn step(&self, state: &SolutionState) -> Result<SolutionState, SolverError> {
        let g = &self.grid;
        let len = g.layer_len();
        for layer in [&state.prev, &state.curr] {
            if layer.len() != len {
                return Err(SolverError::Dimension { expected: len, got: layer.len() });
            }
        }
        let mut guess: Vec<f64> = state.curr.iter().zip(&state.prev).map(|(c, p)| 2.0 * c - p).collect();
        if let Bc::Dirichlet { left, right } = g.bc {
            guess[0] = left;
            guess[len - 1] = right;
        }

        let n = state.n;
        let mm = g.m;
        let mut rhs = vec![0.0; mm];
        let mut sub = vec![0.0; mm];
        let mut diag = vec![0.0; mm];
        let mut sup = vec![0.0; mm];
        let layer = |lv: i64| match lv - n as i64 {
            -1 => Some(state.prev.as_slice()),
            0 => Some(state.curr.as_slice()),
            1 => Some(guess.as_slice()),
            _ => None,
        };
        for j in g.unknowns() {
            let i = j as usize;
            let at = |k: &Kernel| eval_at(k, g, layer, n as i64, j).map(|e| e.value).unwrap_or(0.0);
            rhs[i] = -at(&self.residual);
            diag[i] = at(&self.upper[1]);
            if !self.explicit {
                sub[i] = at(&self.upper[0]);
                sup[i] = at(&self.upper[2]);
            }
        }

        let delta = if self.explicit {
            let mut d = Vec::with_capacity(mm);
            for i in 0..mm {
                if diag[i] == 0.0 {
                    return Err(SolverError::Singular { n, source: super::TridiagError::ZeroPivot { row: i } });
                }
                d.push(rhs[i] / diag[i]);
            }
            d
        } else if g.is_periodic() {
            let corners = (sub[0], sup[mm - 1]);
            solve_tridiagonal_cyclic(&sub, &diag, &sup, corners, &rhs).map_err(|source| SolverError::Singular { n, source })?
        } else {
            solve_tridiagonal(&sub, &diag, &sup, &rhs).map_err(|source| SolverError::Singular { n, source })?
        };

        let mut next = guess;
        for j in g.unknowns() {
            let s = g.slot(j).expect("unknowns lie on the grid");
            next[s] += delta[j as usize];
            if !next[s].is_finite() {
                return Err(SolverError::NonFinite { n: n + 1, node: j as usize });
            }
        }
        Ok(SolutionState { n: n + 1, prev: state.curr.clone(), curr: next })
    }

    /// Steps `steps` times, returning every `stride`-th level starting at `state.n - 1`.
    pub fn integrate(&self, state: SolutionState, steps: usize, stride: usize) -> Result<Vec<Vec<f64>>, SolverError> {
        let stride = stride.max(1);
        let base = state.n - 1;
        let mut out = Vec::new();
        if base.is_multiple_of(stride) {
            out.push(state.prev.clone());
        }
        if state.n.is_multiple_of(stride) {
            out.push(state.curr.clone());
        }
        let mut s = state;
        for _ in 0..steps {
            s = self.step(&s)?;
            if s.n.is_multiple_of(stride) {
                out.push(s.curr.clone());
            }
        }
        Ok(out)
    }
}

/// Builds levels 0 and 1: `u0` and the Taylor start
/// `u0 + tau v0 + tau^2/2 (1 + c u0_x^2) u0_xx` with centered differences,
/// `c = 1` for the nonlinear equation and `0` for the linear one.
pub fn init_state(grid: &Grid1D, data: &InitialData, scheme: SchemeName) -> Result<SolutionState, SolverError> {
    grid.validate()?;
    let len = grid.layer_len();
    for v in [&data.u0, &data.v0] {
        if v.len() != len {
            return Err(SolverError::Dimension { expected: len, got: v.len() });
        }
    }
    let c = if scheme.is_nonlinear() { 1.0 } else { 0.0 };
    let (h, tau) = (grid.h, grid.tau);
    let u = &data.u0;
    let at = |j: i64| u[grid.slot(j).expect("neighbors of unknowns exist")];
    let mut layer1 = u.clone();
    for j in grid.unknowns() {
        let s = grid.slot(j).unwrap();
        let ux = (at(j + 1) - at(j - 1)) / (2.0 * h);
        let uxx = ((at(j + 1) - at(j)) - (at(j) - at(j - 1))) / (h * h);
        layer1[s] = u[s] + tau * data.v0[s] + 0.5 * tau * tau * (1.0 + c * ux * ux) * uxx;
    }
    Ok(SolutionState { n: 1, prev: u.clone(), curr: layer1 })
}

/// Explicit two-layer start.
pub fn init_state_from_layers(grid: &Grid1D, layer0: Vec<f64>, layer1: Vec<f64>) -> Result<SolutionState, SolverError> {
    let len = grid.layer_len();
    for v in [&layer0, &layer1] {
        if v.len() != len {
            return Err(SolverError::Dimension { expected: len, got: v.len() });
        }
    }
    Ok(SolutionState { n: 1, prev: layer0, curr: layer1 })
}

pub fn step(state: &SolutionState, scheme: &Scheme, grid: &Grid1D) -> Result<SolutionState, SolverError> {
    Stepper::new(scheme, *grid)?.step(state)
}

pub fn run(config: &SimulationConfig) -> Result<Trajectory, SolverError> {
    let grid = config.grid.build()?;
    let data = config.ic.sample(&grid);
    let state = init_state(&grid, &data, config.scheme)?;
    let stepper = Stepper::for_scheme(config.scheme, grid)?;
    let stride = config.record_stride.max(1);
    let layers = stepper.integrate(state, config.steps, stride)?;
    Ok(Trajectory { grid, scheme: config.scheme, layers, stride, meta: config.ic.meta() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::IcPreset;
    use std::f64::consts::PI;

    fn dirichlet_affine(a: f64, b: f64) -> (Grid1D, InitialData) {
        let h = 0.1;
        let g = Grid1D::new(9, h, 0.05, 0.0, Bc::Dirichlet { left: a, right: a + b * 1.0 }).unwrap();
        (g, IcPreset::Affine { a, b }.sample(&g))
    }

    #[test]
    fn zero_state_stays_zero() {
        for n in SchemeName::ALL {
            let g = Grid1D::periodic_unit(16, 0.5);
            let s0 = init_state(&g, &IcPreset::Zero {}.sample(&g), n).unwrap();
            let s1 = Stepper::for_scheme(n, g).unwrap().step(&s0).unwrap();
            assert!(s1.curr.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn affine_data_is_a_fixed_point() {
        for n in SchemeName::ALL {
            let (g, d) = dirichlet_affine(0.3, -1.7);
            let s0 = init_state(&g, &d, n).unwrap();
            for (a, b) in s0.prev.iter().zip(&s0.curr) {
                assert!((a - b).abs() < 1e-13);
            }
            let layers = Stepper::for_scheme(n, g).unwrap().integrate(s0, 5, 1).unwrap();
            for l in &layers {
                for (a, b) in l.iter().zip(&layers[0]) {
                    assert!((a - b).abs() < 1e-12, "{n}");
                }
            }
        }
    }

    #[test]
    fn taylor_start_matches_traveling_wave() {
        let err = |m: usize| {
            let g = Grid1D::periodic_unit(m, 0.5);
            let d = IcPreset::Sine { k: 1.0, amplitude: 1.0, traveling: true }.sample(&g);
            let s = init_state(&g, &d, SchemeName::LinearCross).unwrap();
            g.unknowns()
                .map(|j| (s.curr[j as usize] - (2.0 * PI * (g.x(j) - g.tau)).sin()).abs())
                .fold(0.0, f64::max)
        };
        // Local error O(tau^3): halving the steps divides it by about 8.
        let ratio = err(64) / err(128);
        assert!((7.0..9.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn nine3_step_residual_is_tiny() {
        let g = Grid1D::periodic_unit(64, 0.5);
        let d = IcPreset::RandomSmooth { seed: 3, amplitude: 0.08, modes: 4 }.sample(&g);
        let st = Stepper::for_scheme(SchemeName::NonlinearNine3, g).unwrap();
        assert!(!st.is_explicit());
        let s0 = init_state(&g, &d, SchemeName::NonlinearNine3).unwrap();
        let s1 = st.step(&s0).unwrap();
        for j in g.unknowns() {
            let e = st.residual_at(&s0.prev, &s0.curr, &s1.curr, 1, j);
            assert!(e.relative() < 1e-12, "{j}: {e:?}");
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g = Grid1D::periodic_unit(8, 0.5);
        let d = InitialData { u0: vec![0.0; 7], v0: vec![0.0; 8] };
        assert!(matches!(init_state(&g, &d, SchemeName::LinearCross), Err(SolverError::Dimension { .. })));
    }
}
