use serde::Serialize;

use crate::numeric::{eval_in, Evaluation, Kernel};
use crate::scheme_library::{get_scheme, ConservationTriple};
use crate::solver::Trajectory;

use super::AuditError;

/// Numeric kernels of a triple, plus the residual of the trajectory's scheme.
#[derive(Clone, Debug)]
pub struct TripleKernels {
    pub label: String,
    pub density: Kernel,
    pub flux: Kernel,
    pub multiplier: Kernel,
    pub residual: Kernel,
}

impl TripleKernels {
    pub fn new(traj: &Trajectory, triple: &ConservationTriple) -> Result<Self, AuditError> {
        let (h, tau) = (traj.grid.h, traj.grid.tau);
        let scheme = get_scheme(traj.scheme);
        Ok(TripleKernels {
            label: triple.label.clone(),
            density: Kernel::compile(&triple.density, h, tau)?,
            flux: Kernel::compile(&triple.flux, h, tau)?,
            multiplier: Kernel::compile(&triple.multiplier, h, tau)?,
            residual: Kernel::compile(&scheme.residual, h, tau)?,
        })
    }
}

pub(crate) fn require_unit_stride(traj: &Trajectory) -> Result<(), AuditError> {
    if traj.stride != 1 {
        return Err(AuditError::Stride(traj.stride));
    }
    Ok(())
}

/// Levels `n` at which every kernel's time stencil lies inside the trajectory.
pub fn admissible_levels(traj: &Trajectory, kernels: &[&Kernel]) -> std::ops::RangeInclusive<usize> {
    let last = traj.layers.len() as i64 - 1;
    let lo = kernels.iter().map(|k| -(k.extent().0 as i64)).max().unwrap_or(0).max(0);
    let hi = kernels.iter().map(|k| last - k.extent().1 as i64).min().unwrap_or(last);
    if hi < lo {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    lo as usize..=hi as usize
}

fn at(kernel: &Kernel, traj: &Trajectory, n: usize, m: i64, what: &str) -> Result<Evaluation, AuditError> {
    eval_in(kernel, &traj.grid, &traj.layers, n as i64, m)
        .ok_or_else(|| AuditError::StencilOutside { what: what.to_string(), n, m })
}

/// `sum_m h * kernel` over the unknowns at level `n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GridSum {
    pub value: f64,
    /// `sum_m h * |kernel|`
    pub magnitude: f64,
    /// `sum_m h * scale`, the rounding scale.
    pub scale: f64,
}

pub fn grid_sum(kernel: &Kernel, traj: &Trajectory, n: usize, what: &str) -> Result<GridSum, AuditError> {
    let h = traj.grid.h;
    let mut s = GridSum::default();
    for m in traj.grid.unknowns() {
        let e = at(kernel, traj, n, m, what)?;
        s.value += h * e.value;
        s.magnitude += h * e.value.abs();
        s.scale += h * e.scale;
    }
    Ok(s)
}

/// `Q_h(n) = sum_m h * Theta(n, m)`.
pub fn evaluate_density(traj: &Trajectory, triple: &ConservationTriple, n: usize) -> Result<f64, AuditError> {
    require_unit_stride(traj)?;
    let k = Kernel::compile(&triple.density, traj.grid.h, traj.grid.tau)?;
    Ok(grid_sum(&k, traj, n, "density")?.value)
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftRecord {
    pub label: String,
    pub first_level: usize,
    /// `Q_h` corrected by the flux through the periodic seam.
    #[serde(skip)]
    pub q: Vec<f64>,
    /// Plain `sum_m h * Theta`.
    #[serde(skip)]
    pub raw_q: Vec<f64>,
    pub q0: f64,
    /// Denominator of the relative drift.
    pub norm: f64,
    pub max_abs_drift: f64,
    pub max_rel_drift: f64,
    pub raw_max_rel_drift: f64,
    /// Whether the flux differs across the seam (explicit `x` in the flux).
    pub seam_flux: bool,
}

impl DriftRecord {
    pub fn levels(&self) -> std::ops::Range<usize> {
        self.first_level..self.first_level + self.q.len()
    }
}

fn max_dev(series: &[f64]) -> f64 {
    let q0 = series.first().copied().unwrap_or(0.0);
    series.iter().map(|q| (q - q0).abs()).fold(0.0, f64::max)
}

/// Series of `Q_h` on a periodic trajectory.
///
/// On a periodic grid `sum_m D-h Phi` telescopes to the seam difference
/// `S_n = Phi(n, M-1) - Phi(n, -1)` (coordinates unwrapped), which is zero
/// unless the flux carries an explicit `x`. The reported series is
/// `Q_h(n) + tau * sum_{j<=n} S_j`; `raw_q` omits the seam term.
pub fn drift_series(traj: &Trajectory, triple: &ConservationTriple) -> Result<DriftRecord, AuditError> {
    require_unit_stride(traj)?;
    if !traj.grid.is_periodic() {
        return Err(AuditError::RequiresPeriodic("drift_series"));
    }
    let (h, tau) = (traj.grid.h, traj.grid.tau);
    let theta = Kernel::compile(&triple.density, h, tau)?;
    let phi = Kernel::compile(&triple.flux, h, tau)?;
    let levels = admissible_levels(traj, &[&theta]);
    let with_flux = admissible_levels(traj, &[&theta, &phi]);
    let first = *levels.start();
    if levels.is_empty() {
        return Err(AuditError::TooShort { needed: (theta.extent().1 - theta.extent().0 + 1) as usize });
    }
    let last_m = traj.grid.m as i64 - 1;

    let start = grid_sum(&theta, traj, first, "density")?;
    let mut raw_q = vec![start.value];
    let mut q = vec![start.value];
    let mut seam = 0.0;
    let mut seam_flux = false;
    for n in first + 1..=*levels.end() {
        if !with_flux.contains(&n) {
            break;
        }
        let s = at(&phi, traj, n, last_m, "flux")?.value - at(&phi, traj, n, -1, "flux")?.value;
        seam_flux |= s != 0.0;
        seam += tau * s;
        let raw = grid_sum(&theta, traj, n, "density")?.value;
        raw_q.push(raw);
        q.push(raw + seam);
    }

    let norm = drift_norm(start);
    let max_abs_drift = max_dev(&q);
    Ok(DriftRecord {
        label: triple.label.clone(),
        first_level: first,
        q0: start.value,
        norm,
        max_abs_drift,
        max_rel_drift: max_abs_drift / norm,
        raw_max_rel_drift: max_dev(&raw_q) / norm,
        seam_flux,
        q,
        raw_q,
    })
}

/// `|Q_h(0)|`, or `sum h |Theta|` when `Q_h(0)` is below a thousandth of it
/// (zero up to discretization-level cancellation).
pub const NEGLIGIBLE_Q0: f64 = 1e-3;

fn drift_norm(s: GridSum) -> f64 {
    if s.value.abs() >= NEGLIGIBLE_Q0 * s.magnitude && s.value != 0.0 {
        s.value.abs()
    } else if s.magnitude > 0.0 {
        s.magnitude
    } else if s.scale > 0.0 {
        s.scale
    } else {
        1.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PointwiseRecord {
    pub label: String,
    pub points: usize,
    pub max_abs: f64,
    /// Largest `|residual| / scale`, the scale summing the magnitudes of
    /// every term of `D-tau Theta + D-h Phi - Lambda F`.
    pub max_rel: f64,
}

/// `D-tau Theta + D-h Phi - Lambda F` at every node where its stencil fits.
pub fn pointwise_residual(traj: &Trajectory, triple: &ConservationTriple) -> Result<PointwiseRecord, AuditError> {
    require_unit_stride(traj)?;
    let k = TripleKernels::new(traj, triple)?;
    let g = &traj.grid;
    let (h, tau) = (g.h, g.tau);
    let eval = |kern: &Kernel, n: usize, m: i64| eval_in(kern, g, &traj.layers, n as i64, m);
    let mut rec = PointwiseRecord { label: triple.label.clone(), points: 0, max_abs: 0.0, max_rel: 0.0 };
    let levels = admissible_levels(traj, &[&k.density, &k.flux, &k.multiplier, &k.residual]);
    for n in levels.filter(|&n| n >= 1) {
        for m in g.unknowns() {
            let parts = (|| {
                Some((
                    eval(&k.density, n, m)?,
                    eval(&k.density, n - 1, m)?,
                    eval(&k.flux, n, m)?,
                    eval(&k.flux, n, m - 1)?,
                    eval(&k.multiplier, n, m)?,
                    eval(&k.residual, n, m)?,
                ))
            })();
            let Some((th, th_prev, ph, ph_left, lam, f)) = parts else { continue };
            let value = (th.value - th_prev.value) / tau + (ph.value - ph_left.value) / h - lam.value * f.value;
            let scale = (th.scale + th_prev.scale) / tau
                + (ph.scale + ph_left.scale) / h
                + lam.value.abs() * f.scale
                + lam.scale * f.value.abs();
            let e = Evaluation { value, scale };
            rec.points += 1;
            rec.max_abs = rec.max_abs.max(value.abs());
            rec.max_rel = rec.max_rel.max(e.relative());
        }
    }
    if rec.points == 0 {
        return Err(AuditError::TooShort { needed: 3 });
    }
    Ok(rec)
}

#[derive(Clone, Debug, Serialize)]
pub struct FluxBalance {
    pub label: String,
    pub window: (i64, i64),
    pub first_level: usize,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    pub max_abs: f64,
    pub max_rel: f64,
}

/// Widest window `[m1, m2]` of unknowns on which `Theta` and the two
/// boundary fluxes `Phi(., m1 - 1)`, `Phi(., m2)` can be evaluated.
pub fn default_window(traj: &Trajectory, triple: &ConservationTriple) -> Result<(i64, i64), AuditError> {
    let (h, tau) = (traj.grid.h, traj.grid.tau);
    let theta = Kernel::compile(&triple.density, h, tau)?;
    let phi = Kernel::compile(&triple.flux, h, tau)?;
    let g = &traj.grid;
    let m = g.m as i64;
    if g.is_periodic() {
        return Ok((0, m - 1));
    }
    let (_, _, tl, th) = theta.extent();
    let (_, _, pl, ph) = phi.extent();
    let m1 = [0, -1 - tl as i64, -pl as i64].into_iter().max().unwrap();
    let m2 = [m - 1, m - th as i64, m - ph as i64].into_iter().min().unwrap();
    if m1 > m2 {
        return Err(AuditError::Window { m1, m2 });
    }
    Ok((m1, m2))
}

/// Residual of the windowed balance
/// `D-tau (sum_{m1..=m2} h Theta) + Phi(n, m2) - Phi(n, m1 - 1)` per level.
pub fn flux_balance(traj: &Trajectory, triple: &ConservationTriple, window: (i64, i64)) -> Result<FluxBalance, AuditError> {
    require_unit_stride(traj)?;
    let (m1, m2) = window;
    let g = &traj.grid;
    if m1 > m2 || m1 < 0 || m2 >= g.m as i64 {
        return Err(AuditError::Window { m1, m2 });
    }
    let (h, tau) = (g.h, g.tau);
    let theta = Kernel::compile(&triple.density, h, tau)?;
    let phi = Kernel::compile(&triple.flux, h, tau)?;
    let dens = admissible_levels(traj, &[&theta]);
    let both = admissible_levels(traj, &[&theta, &phi]);
    let levels: Vec<usize> = both.filter(|&n| n >= 1 && dens.contains(&(n - 1))).collect();
    let first = levels.first().copied().ok_or(AuditError::TooShort { needed: 3 })?;
    let eval = |kern: &Kernel, n: usize, m: i64| {
        eval_in(kern, g, &traj.layers, n as i64, m).ok_or(AuditError::Window { m1, m2 })
    };
    let mut out = FluxBalance { label: triple.label.clone(), window, first_level: first, residuals: vec![], max_abs: 0.0, max_rel: 0.0 };
    for n in levels {
        let mut value = 0.0;
        let mut scale = 0.0;
        for m in m1..=m2 {
            let a = eval(&theta, n, m)?;
            let b = eval(&theta, n - 1, m)?;
            value += h * (a.value - b.value) / tau;
            scale += h * (a.scale + b.scale) / tau;
        }
        let right = eval(&phi, n, m2)?;
        let left = eval(&phi, n, m1 - 1)?;
        value += right.value - left.value;
        scale += right.scale + left.scale;
        let e = Evaluation { value, scale };
        out.residuals.push(value);
        out.max_abs = out.max_abs.max(value.abs());
        out.max_rel = out.max_rel.max(e.relative());
    }
    Ok(out)
}
