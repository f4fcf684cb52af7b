//! Floating-point evaluation of difference polynomials on a grid.
//!
//! A [`Kernel`] is a [`DiffPoly`](crate::stencil_algebra::DiffPoly) with the
//! mesh steps fixed, rewritten in terms of the center value and the
//! differences `U[k,l] - U[0,0]`. Difference quotients such as
//! `(U_+ - 2U + U_-)/h^2` then never subtract two large numbers.

mod kernel;

pub use kernel::{Evaluation, Kernel, KernelError};

use crate::solver::Grid1D;

/// Evaluates `kernel` centered at time level `n`, node `m`.
///
/// `layer(level)` supplies stored layers; `None` is returned when the stencil
/// reaches a missing level or leaves the grid.
pub fn eval_at<'a, F>(kernel: &Kernel, grid: &Grid1D, layer: F, n: i64, m: i64) -> Option<Evaluation>
where
    F: Fn(i64) -> Option<&'a [f64]>,
{
    let (kmin, kmax, lmin, lmax) = kernel.extent();
    let rows: Vec<&[f64]> = (kmin..=kmax).map(|k| layer(n + k as i64)).collect::<Option<_>>()?;
    grid.slot(m + lmin as i64)?;
    grid.slot(m + lmax as i64)?;
    let value = |k: i32, l: i32| rows[(k - kmin) as usize][grid.slot(m + l as i64).expect("checked above")];
    Some(kernel.eval(value, grid.t(n), grid.x(m)))
}

/// [`eval_at`] over a slice where index `j` is time level `j`.
pub fn eval_in<L: AsRef<[f64]>>(kernel: &Kernel, grid: &Grid1D, layers: &[L], n: i64, m: i64) -> Option<Evaluation> {
    eval_at(kernel, grid, |lv| usize::try_from(lv).ok().and_then(|i| layers.get(i)).map(|l| l.as_ref()), n, m)
}
