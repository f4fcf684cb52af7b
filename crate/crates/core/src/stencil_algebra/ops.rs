//! Shift and difference operators on the uniform orthogonal lattice, and the
//! difference Euler operator built from them.

use std::collections::BTreeMap;

use num_traits::One;

use super::poly::{DiffPoly, Rational};
use super::var::{Monomial, Var, DEFAULT_WINDOW};
use super::AlgebraError;

/// Direction of a first-order difference operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    /// `D+h = (S+h - 1)/h`
    PlusH,
    /// `D-h = (1 - S-h)/h`
    MinusH,
    /// `D+tau = (S+tau - 1)/tau`
    PlusTau,
    /// `D-tau = (1 - S-tau)/tau`
    MinusTau,
}

impl Dir {
    pub const ALL: [Dir; 4] = [Dir::PlusH, Dir::MinusH, Dir::PlusTau, Dir::MinusTau];
}

/// Shifts every grid value by `(dk, dl)` using the default window.
pub fn shift(p: &DiffPoly, dk: i32, dl: i32) -> Result<DiffPoly, AlgebraError> {
    shift_in(p, dk, dl, DEFAULT_WINDOW)
}

/// Shifts every grid value by `(dk, dl)`; `t` becomes `t + dk*tau` and `x`
/// becomes `x + dl*h`. Offsets must stay within `|k|, |l| <= window`.
pub fn shift_in(p: &DiffPoly, dk: i32, dl: i32, window: i32) -> Result<DiffPoly, AlgebraError> {
    if dk == 0 && dl == 0 {
        return Ok(p.clone());
    }
    let t_img = &DiffPoly::t() + &DiffPoly::tau().scale_int(dk as i64);
    let x_img = &DiffPoly::x() + &DiffPoly::h().scale_int(dl as i64);
    let mut t_pows: BTreeMap<i32, DiffPoly> = BTreeMap::new();
    let mut x_pows: BTreeMap<i32, DiffPoly> = BTreeMap::new();

    let mut out = DiffPoly::zero();
    for (m, c) in p.terms() {
        let mut plain = Vec::with_capacity(m.factors().len());
        let mut factor = DiffPoly::constant(c.clone());
        for (v, e) in m.factors() {
            match v {
                Var::Grid(k, l) => {
                    let (nk, nl) = (k + dk, l + dl);
                    if nk.abs() > window || nl.abs() > window {
                        return Err(AlgebraError::WindowOverflow { k: nk, l: nl, window });
                    }
                    plain.push((Var::Grid(nk, nl), *e));
                }
                Var::T if dk != 0 => {
                    let pw = t_pows.entry(*e).or_insert_with(|| t_img.pow(*e as u32));
                    factor = &factor * pw;
                }
                Var::X if dl != 0 => {
                    let pw = x_pows.entry(*e).or_insert_with(|| x_img.pow(*e as u32));
                    factor = &factor * pw;
                }
                _ => plain.push((v.clone(), *e)),
            }
        }
        let mono = Monomial::from_pairs(plain).expect("shift preserves exponents");
        out += &(&factor * &DiffPoly::term(Rational::one(), mono));
    }
    Ok(out)
}

/// Applies a first-order difference operator in the default window.
pub fn diff_op(p: &DiffPoly, dir: Dir) -> Result<DiffPoly, AlgebraError> {
    diff_op_in(p, dir, DEFAULT_WINDOW)
}

pub fn diff_op_in(p: &DiffPoly, dir: Dir, window: i32) -> Result<DiffPoly, AlgebraError> {
    let (dk, dl, h_exp, tau_exp) = match dir {
        Dir::PlusH => (0, 1, -1, 0),
        Dir::MinusH => (0, -1, -1, 0),
        Dir::PlusTau => (1, 0, 0, -1),
        Dir::MinusTau => (-1, 0, 0, -1),
    };
    let shifted = shift_in(p, dk, dl, window)?;
    let diff = match dir {
        Dir::PlusH | Dir::PlusTau => &shifted - p,
        Dir::MinusH | Dir::MinusTau => p - &shifted,
    };
    Ok(diff.mul_steps(h_exp, tau_exp))
}

/// Difference Euler operator around the stencil center:
/// `sum_{k,l} S^{-k}_tau S^{-l}_h (d p / d U[k,l])`.
pub fn euler_op(p: &DiffPoly) -> Result<DiffPoly, AlgebraError> {
    euler_op_in(p, DEFAULT_WINDOW)
}

pub fn euler_op_in(p: &DiffPoly, window: i32) -> Result<DiffPoly, AlgebraError> {
    let mut out = DiffPoly::zero();
    for (k, l) in p.grid_offsets() {
        let d = p.derivative(&Var::Grid(k, l));
        out += &shift_in(&d, -k, -l, window)?;
    }
    Ok(out)
}

/// True iff the Euler operator annihilates `p`.
pub fn is_divergence(p: &DiffPoly) -> Result<bool, AlgebraError> {
    Ok(euler_op(p)?.is_zero())
}
