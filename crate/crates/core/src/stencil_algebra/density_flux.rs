//! Reconstruction of a density/flux pair from a divergence expression.
//!
//! `D-tau` and `D-h` preserve the grid degree of every monomial and lower the
//! length weight (with `t`, `x`, `h`, `tau` of weight one) by exactly one, so
//! the problem splits into independent homogeneous blocks.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::linalg::{self, SparseRow};
use super::ops::{diff_op, Dir};
use super::poly::{DiffPoly, Rational};
use super::var::{Monomial, Var, DEFAULT_WINDOW};
use super::AlgebraError;

/// Size of the candidate space for `Theta` and `Phi` beyond what `p` suggests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeBounds {
    /// Extra `h`/`tau` exponents tried on both sides of the range seen in `p`.
    pub mesh_pad: i32,
    /// Extra powers of `t` and `x` beyond those in `p`.
    pub coord_extra: i32,
    /// Extra stencil rows/columns around the window read off `p`.
    pub window_extra: i32,
}

impl Default for DegreeBounds {
    fn default() -> Self {
        DegreeBounds { mesh_pad: 1, coord_extra: 0, window_extra: 0 }
    }
}

impl DegreeBounds {
    pub fn widen(self) -> Self {
        DegreeBounds {
            mesh_pad: self.mesh_pad + 1,
            coord_extra: self.coord_extra + 1,
            window_extra: self.window_extra + 1,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Extent {
    kmin: i32,
    kmax: i32,
    lmin: i32,
    lmax: i32,
}

/// Solves `D-tau Theta + D-h Phi == p` for polynomial `Theta`, `Phi`.
///
/// The representative returned is the reduced-echelon particular solution;
/// it is unique only modulo trivial conservation laws, so compare results
/// by the residual identity.
pub fn find_density_flux(p: &DiffPoly, bounds: DegreeBounds) -> Result<(DiffPoly, DiffPoly), AlgebraError> {
    if p.is_zero() {
        return Ok((DiffPoly::zero(), DiffPoly::zero()));
    }
    if p.has_aux() {
        return Err(AlgebraError::AuxUnsupported);
    }
    let offsets = p.grid_offsets();
    let ext = if offsets.is_empty() {
        Extent { kmin: 0, kmax: 0, lmin: 0, lmax: 0 }
    } else {
        Extent {
            kmin: offsets.iter().map(|o| o.0).min().unwrap() - bounds.window_extra,
            kmax: offsets.iter().map(|o| o.0).max().unwrap() + bounds.window_extra,
            lmin: offsets.iter().map(|o| o.1).min().unwrap() - bounds.window_extra,
            lmax: offsets.iter().map(|o| o.1).max().unwrap() + bounds.window_extra,
        }
    };

    let mut blocks: BTreeMap<(i32, i32), DiffPoly> = BTreeMap::new();
    for (m, c) in p.terms() {
        blocks
            .entry((m.grid_degree(), m.length_weight()))
            .or_default()
            .add_term(m.clone(), c.clone());
    }

    let mut theta = DiffPoly::zero();
    let mut phi = DiffPoly::zero();
    for ((degree, weight), block) in &blocks {
        let (th, ph) = solve_block(block, *degree, *weight, ext, bounds)?;
        theta += &th;
        phi += &ph;
    }
    let check = &(&diff_op(&theta, Dir::MinusTau)? + &diff_op(&phi, Dir::MinusH)?) - p;
    if !check.is_zero() {
        return Err(AlgebraError::Verification(check.to_string()));
    }
    Ok((theta, phi))
}

fn solve_block(
    block: &DiffPoly,
    degree: i32,
    weight: i32,
    ext: Extent,
    bounds: DegreeBounds,
) -> Result<(DiffPoly, DiffPoly), AlgebraError> {
    let exps = |v: &Var| block.terms().map(|(m, _)| m.exponent(v)).collect::<BTreeSet<i32>>();
    let range = |s: BTreeSet<i32>| (*s.first().unwrap(), *s.last().unwrap());
    let (hmin, hmax) = range(exps(&Var::H));
    let (emin, emax) = range(exps(&Var::Tau));
    let coord_extra = bounds.coord_extra + i32::from(degree == 0);
    let tmax = exps(&Var::T).last().copied().unwrap_or(0) + coord_extra;
    let xmax = exps(&Var::X).last().copied().unwrap_or(0) + coord_extra;
    let pad = bounds.mesh_pad;

    let clamp = |lo: i32, hi: i32| (lo.max(-DEFAULT_WINDOW), hi.min(DEFAULT_WINDOW));
    let (tk0, tk1) = clamp(ext.kmin + 1, ext.kmax);
    let (fl0, fl1) = clamp(ext.lmin + 1, ext.lmax);
    let theta_grid = grid_monomials(degree, (tk0, tk1), clamp(ext.lmin, ext.lmax));
    let phi_grid = grid_monomials(degree, clamp(ext.kmin, ext.kmax), (fl0, fl1));

    // Theta's tau exponent is tied to the range in p; Phi's h exponent likewise.
    let mut theta_mesh = Vec::new();
    let mut phi_mesh = Vec::new();
    for a in 0..=tmax {
        for b in 0..=xmax {
            for c in hmin - pad..=hmax + pad {
                let e = weight + 1 - a - b - c;
                theta_mesh.push(mesh_monomial(a, b, c, e));
            }
            for e in emin - pad..=emax + pad {
                let c = weight + 1 - a - b - e;
                phi_mesh.push(mesh_monomial(a, b, c, e));
            }
        }
    }

    let mut columns: Vec<(bool, Monomial)> = Vec::new();
    for g in &theta_grid {
        for m in &theta_mesh {
            columns.push((true, g.mul(m)));
        }
    }
    for g in &phi_grid {
        for m in &phi_mesh {
            columns.push((false, g.mul(m)));
        }
    }

    let mut rows: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
    for (j, (is_theta, m)) in columns.iter().enumerate() {
        let dir = if *is_theta { Dir::MinusTau } else { Dir::MinusH };
        let image = diff_op(&DiffPoly::term(Rational::one(), m.clone()), dir)?;
        for (mono, c) in image.terms() {
            rows.entry(mono.clone()).or_default().insert(j, c.clone());
        }
    }
    let mut target: BTreeMap<Monomial, Rational> = block.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let mut system: Vec<(SparseRow, Rational)> = Vec::with_capacity(rows.len());
    for (mono, row) in rows {
        let rhs = target.remove(&mono).unwrap_or_else(Rational::zero);
        system.push((row, rhs));
    }
    if !target.is_empty() {
        return Err(AlgebraError::Infeasible);
    }
    let (x, _) = linalg::solve(columns.len(), system).ok_or(AlgebraError::Infeasible)?;

    let mut theta = DiffPoly::zero();
    let mut phi = DiffPoly::zero();
    for (coef, (is_theta, m)) in x.into_iter().zip(columns) {
        if coef.is_zero() {
            continue;
        }
        if is_theta {
            theta.add_term(m, coef);
        } else {
            phi.add_term(m, coef);
        }
    }
    Ok((theta, phi))
}

fn mesh_monomial(a: i32, b: i32, c: i32, e: i32) -> Monomial {
    Monomial::from_pairs([(Var::T, a), (Var::X, b), (Var::H, c), (Var::Tau, e)])
        .expect("t and x exponents are nonnegative")
}

/// All monomials of the given degree in grid values of a rectangular window.
fn grid_monomials(degree: i32, ks: (i32, i32), ls: (i32, i32)) -> Vec<Monomial> {
    let points: Vec<Var> = (ks.0..=ks.1)
        .flat_map(|k| (ls.0..=ls.1).map(move |l| Var::Grid(k, l)))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    combinations(&points, 0, degree, &mut current, &mut out);
    out
}

fn combinations(points: &[Var], start: usize, left: i32, current: &mut Vec<(Var, i32)>, out: &mut Vec<Monomial>) {
    if left == 0 {
        out.push(Monomial::from_pairs(current.iter().cloned()).expect("positive exponents"));
        return;
    }
    for i in start..points.len() {
        current.push((points[i].clone(), 1));
        combinations(points, i, left - 1, current, out);
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil_algebra::notation::{dtm, dxm, t_hat, u, ut, utt, ux, uxx};

    fn residual(theta: &DiffPoly, phi: &DiffPoly, p: &DiffPoly) -> DiffPoly {
        &(&dtm(theta) + &dxm(phi)) - p
    }

    #[test]
    fn zero_gives_zero_pair() {
        let (th, ph) = find_density_flux(&DiffPoly::zero(), DegreeBounds::default()).unwrap();
        assert!(th.is_zero() && ph.is_zero());
    }

    #[test]
    fn time_weighted_linear_scheme() {
        let w = &utt() - &uxx();
        let p = &DiffPoly::t() * &w;
        let (th, ph) = find_density_flux(&p, DegreeBounds::default()).unwrap();
        assert!(residual(&th, &ph, &p).is_zero());
        // The printed pair is one valid representative.
        let th0 = &(&t_hat() * &ut()) - &u(1, 0);
        let ph0 = -(&DiffPoly::t() * &ux());
        assert!(residual(&th0, &ph0, &p).is_zero());
    }

    #[test]
    fn grid_monomial_counts() {
        assert_eq!(grid_monomials(2, (0, 1), (-1, 1)).len(), 21);
        assert_eq!(grid_monomials(0, (0, 0), (0, 0)).len(), 1);
    }

    #[test]
    fn non_divergence_is_infeasible() {
        let p = u(0, 0).pow(2);
        assert_eq!(find_density_flux(&p, DegreeBounds::default()), Err(AlgebraError::Infeasible));
    }
}
