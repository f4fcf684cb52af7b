//! Taylor expansion of stencil expressions about the stencil center.
//!
//! A grid value `U[k,l]` is replaced by
//! `sum_{i+j<=N} (k tau)^i (l h)^j / (i! j!) u_{i,j}` where `u_{i,j}` is the
//! jet symbol for `d^{i+j} u / dt^i dx^j`. Coefficients of jet monomials are
//! mesh-symbol polynomials (Laurent in `h`, `tau`, polynomial in `t`, `x`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::poly::{DiffPoly, Rational};
use super::var::Var;
use super::AlgebraError;

/// Product of jet symbols `u_{i,j}^e`, sorted by `(i, j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetMonomial(Vec<((u32, u32), u32)>);

impl JetMonomial {
    pub fn one() -> Self {
        JetMonomial(Vec::new())
    }

    pub fn jet(i: u32, j: u32) -> Self {
        JetMonomial(vec![((i, j), 1)])
    }

    pub fn factors(&self) -> &[((u32, u32), u32)] {
        &self.0
    }

    /// Total number of derivatives carried by the monomial.
    pub fn derivative_order(&self) -> u32 {
        self.0.iter().map(|((i, j), e)| (i + j) * e).sum()
    }

    pub fn mul(&self, other: &JetMonomial) -> JetMonomial {
        let mut map: BTreeMap<(u32, u32), u32> = self.0.iter().cloned().collect();
        for (k, e) in &other.0 {
            *map.entry(*k).or_insert(0) += e;
        }
        JetMonomial(map.into_iter().collect())
    }
}

fn jet_name(i: u32, j: u32) -> String {
    if i == 0 && j == 0 {
        return "u".to_string();
    }
    format!("u_{}{}", "t".repeat(i as usize), "x".repeat(j as usize))
}

impl fmt::Display for JetMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (n, ((i, j), e)) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str("*")?;
            }
            f.write_str(&jet_name(*i, *j))?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in jet symbols with mesh-symbol coefficients, truncated at a
/// total derivative order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JetPoly {
    terms: BTreeMap<JetMonomial, DiffPoly>,
    /// Terms of derivative order above this were discarded. `None` = exact.
    truncation: Option<u32>,
}

impl JetPoly {
    pub fn zero() -> Self {
        JetPoly::default()
    }

    pub fn constant(c: DiffPoly) -> Self {
        let mut p = JetPoly::zero();
        p.add_term(JetMonomial::one(), c);
        p
    }

    /// `u_{i,j}`: `i` time derivatives, `j` space derivatives.
    pub fn jet(i: u32, j: u32) -> Self {
        let mut p = JetPoly::zero();
        p.add_term(JetMonomial::jet(i, j), DiffPoly::one());
        p
    }

    pub fn u() -> Self {
        JetPoly::jet(0, 0)
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn with_truncation(mut self, order: u32) -> Self {
        self.terms.retain(|m, _| m.derivative_order() <= order);
        self.truncation = Some(match self.truncation {
            Some(t) => t.min(order),
            None => order,
        });
        self
    }

    pub fn add_term(&mut self, m: JetMonomial, c: DiffPoly) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = self.truncation {
            if m.derivative_order() > t {
                return;
            }
        }
        let entry = self.terms.entry(m.clone()).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&JetMonomial, &DiffPoly)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &JetMonomial) -> DiffPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    fn combined_truncation(a: Option<u32>, b: Option<u32>) -> Option<u32> {
        match (a, b) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }

    pub fn add(&self, other: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out.truncation = Self::combined_truncation(self.truncation, other.truncation);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        if let Some(t) = out.truncation {
            out.terms.retain(|m, _| m.derivative_order() <= t);
        }
        out
    }

    pub fn sub(&self, other: &JetPoly) -> JetPoly {
        self.add(&other.scale_poly(&DiffPoly::int(-1)))
    }

    pub fn scale_poly(&self, c: &DiffPoly) -> JetPoly {
        let mut out = JetPoly { terms: BTreeMap::new(), truncation: self.truncation };
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> JetPoly {
        self.scale_poly(&DiffPoly::constant(c.clone()))
    }

    /// Product truncated at the smaller of the two truncation orders.
    pub fn mul(&self, other: &JetPoly) -> JetPoly {
        let trunc = Self::combined_truncation(self.truncation, other.truncation);
        let mut out = JetPoly { terms: BTreeMap::new(), truncation: trunc };
        for (ma, ca) in &self.terms {
            let oa = ma.derivative_order();
            for (mb, cb) in &other.terms {
                if let Some(t) = trunc {
                    if oa + mb.derivative_order() > t {
                        continue;
                    }
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Terms whose coefficient has combined `(h, tau)` degree exactly `d`.
    pub fn degree_part(&self, d: i32) -> JetPoly {
        let mut out = JetPoly { terms: BTreeMap::new(), truncation: self.truncation };
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.filter_terms(|mono| mono.step_degree() == d));
        }
        out
    }

    /// Sum of all parts with degree in `lo..=hi`.
    pub fn degree_range(&self, lo: i32, hi: i32) -> JetPoly {
        let mut out = JetPoly { terms: BTreeMap::new(), truncation: self.truncation };
        for (m, c) in &self.terms {
            out.add_term(
                m.clone(),
                c.filter_terms(|mono| (lo..=hi).contains(&mono.step_degree())),
            );
        }
        out
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms
            .values()
            .flat_map(|c| c.terms().map(|(m, _)| m.step_degree()))
            .min()
    }

    /// True when `self` equals `target` up to a nonzero scalar
    /// mesh-symbol factor shared by all terms.
    pub fn proportional_to(&self, target: &JetPoly) -> bool {
        if self.is_zero() || target.is_zero() {
            return false;
        }
        let keys_a: Vec<_> = self.terms.keys().collect();
        let keys_b: Vec<_> = target.terms.keys().collect();
        if keys_a != keys_b {
            return false;
        }
        // Compare ratios via cross multiplication against a reference term.
        let (m0, a0) = self.terms.iter().next().unwrap();
        let b0 = &target.terms[m0];
        self.terms.iter().all(|(m, a)| a * b0 == &target.terms[m] * a0)
    }
}

impl fmt::Display for JetPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if c == &DiffPoly::one() {
                write!(f, "{m}")?;
            } else if c.len() == 1 {
                write!(f, "{c}*{m}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        if let Some(t) = self.truncation {
            write!(f, " + O(d^{})", t + 1)?;
        }
        Ok(())
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Series of `U[k,l]` about the center, truncated at derivative order `n`.
fn grid_series(k: i32, l: i32, n: u32) -> JetPoly {
    let mut s = JetPoly::zero();
    s.truncation = Some(n);
    for i in 0..=n {
        for j in 0..=(n - i) {
            if (k == 0 && i > 0) || (l == 0 && j > 0) {
                continue;
            }
            let num = BigInt::from(k).pow(i) * BigInt::from(l).pow(j);
            let c = Rational::new(num, factorial(i) * factorial(j));
            let coef = DiffPoly::constant(c).mul_steps(j as i32, i as i32);
            s.add_term(JetMonomial::jet(i, j), coef);
        }
    }
    s
}

/// Taylor expansion of `p`, truncated at total derivative order `order`.
pub fn taylor_expand(p: &DiffPoly, order: u32) -> JetPoly {
    let mut cache: BTreeMap<(i32, i32), Vec<JetPoly>> = BTreeMap::new();
    let mut out = JetPoly::zero().with_truncation(order);
    for (m, c) in p.terms() {
        let (grid, mesh) = m.split_grid();
        let mut acc = JetPoly::constant(DiffPoly::term(c.clone(), mesh)).with_truncation(order);
        for (v, e) in grid.factors() {
            let (k, l) = v.grid_offset().expect("grid part");
            let powers = cache.entry((k, l)).or_insert_with(|| vec![JetPoly::constant(DiffPoly::one()), grid_series(k, l, order)]);
            while powers.len() <= *e as usize {
                let next = powers.last().unwrap().mul(&powers[1]);
                powers.push(next);
            }
            acc = acc.mul(&powers[*e as usize]);
        }
        out = out.add(&acc);
    }
    out
}

/// Taylor expansion complete through combined `(h, tau)` degree `max_degree`.
pub fn taylor_through_degree(p: &DiffPoly, max_degree: i32) -> JetPoly {
    let min_own = p.terms().map(|(m, _)| m.step_degree()).min().unwrap_or(0);
    let order = (max_degree - min_own).max(0) as u32;
    taylor_expand(p, order).degree_range(i32::MIN, max_degree)
}

/// Lowest nonvanishing degree part of the expansion, searched up to
/// `max_degree`.
pub fn taylor_leading(p: &DiffPoly, max_degree: i32) -> Option<(i32, JetPoly)> {
    if p.is_zero() {
        return None;
    }
    let full = taylor_through_degree(p, max_degree);
    let lo = full.min_degree()?;
    (lo <= max_degree).then(|| (lo, full.degree_part(lo)))
}

/// Result of comparing a scheme's expansion with a continuum residual.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub consistent: bool,
    /// Lowest degree of a remainder term containing `tau`.
    pub order_t: Option<i32>,
    /// Lowest degree of a remainder term containing `h`.
    pub order_x: Option<i32>,
    /// Lowest degree of any nonvanishing remainder term.
    pub order: Option<i32>,
    /// Degree-zero part of the expansion.
    pub limit: JetPoly,
    /// Lowest nonvanishing remainder part (zero if none through `checked_through`).
    pub leading_residual: JetPoly,
    /// Remainder degrees were examined up to and including this value.
    pub checked_through: i32,
}

impl ConsistencyReport {
    /// Both directional orders are at least `p` (absent means higher than
    /// the checked range).
    pub fn orders_at_least(&self, p: i32) -> bool {
        self.consistent
            && self.order_t.is_none_or(|o| o >= p)
            && self.order_x.is_none_or(|o| o >= p)
    }
}

/// Degree range examined by [`consistency_report`].
pub const CONSISTENCY_DEGREE: i32 = 3;

/// Expands `f`, requires every negative-degree part to cancel, compares the
/// degree-zero part with `target`, and reports approximation orders.
pub fn consistency_report(f: &DiffPoly, target: &JetPoly) -> Result<ConsistencyReport, AlgebraError> {
    consistency_report_through(f, target, CONSISTENCY_DEGREE)
}

pub fn consistency_report_through(
    f: &DiffPoly,
    target: &JetPoly,
    max_degree: i32,
) -> Result<ConsistencyReport, AlgebraError> {
    let full = taylor_through_degree(f, max_degree);
    let negative = full.degree_range(i32::MIN, -1);
    if !negative.is_zero() {
        return Err(AlgebraError::Inconsistent(negative.to_string()));
    }
    let limit = full.degree_part(0);
    let consistent = limit.sub(target).is_zero();
    let remainder = full.degree_range(1, max_degree);

    let mut order_t = None;
    let mut order_x = None;
    let mut order = None;
    for (_, c) in remainder.terms() {
        for (m, _) in c.terms() {
            let d = m.step_degree();
            order = Some(order.map_or(d, |o: i32| o.min(d)));
            if m.exponent(&Var::Tau) > 0 {
                order_t = Some(order_t.map_or(d, |o: i32| o.min(d)));
            }
            if m.exponent(&Var::H) > 0 {
                order_x = Some(order_x.map_or(d, |o: i32| o.min(d)));
            }
        }
    }
    let leading_residual = match order {
        Some(d) => remainder.degree_part(d),
        None => JetPoly::zero(),
    };
    Ok(ConsistencyReport {
        consistent,
        order_t,
        order_x,
        order,
        limit,
        leading_residual,
        checked_through: max_degree,
    })
}

/// Continuum residual `u_tt - u_xx`.
pub fn linear_wave_target() -> JetPoly {
    JetPoly::jet(2, 0).sub(&JetPoly::jet(0, 2))
}

/// Continuum residual `u_tt - (1 + u_x^2) u_xx`.
pub fn nonlinear_wave_target() -> JetPoly {
    let ux2 = JetPoly::jet(0, 1).mul(&JetPoly::jet(0, 1));
    let coef = JetPoly::constant(DiffPoly::one()).add(&ux2);
    JetPoly::jet(2, 0).sub(&coef.mul(&JetPoly::jet(0, 2)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil_algebra::ops::{diff_op, Dir};
    use crate::stencil_algebra::poly::rat;

    fn u(k: i32, l: i32) -> DiffPoly {
        DiffPoly::grid(k, l)
    }

    #[test]
    fn forward_difference_series() {
        let ux = diff_op(&u(0, 0), Dir::PlusH).unwrap();
        let s = taylor_expand(&ux, 3);
        assert_eq!(s.coefficient(&JetMonomial::jet(0, 1)), DiffPoly::one());
        assert_eq!(s.coefficient(&JetMonomial::jet(0, 2)), DiffPoly::constant(rat(1, 2)).mul_steps(1, 0));
        assert_eq!(s.coefficient(&JetMonomial::jet(0, 3)), DiffPoly::constant(rat(1, 6)).mul_steps(2, 0));
        assert!(s.coefficient(&JetMonomial::jet(0, 0)).is_zero());
    }

    #[test]
    fn central_second_difference_series() {
        let utt = diff_op(&diff_op(&u(0, 0), Dir::PlusTau).unwrap(), Dir::MinusTau).unwrap();
        let s = taylor_through_degree(&utt, 2);
        assert_eq!(s.coefficient(&JetMonomial::jet(2, 0)), DiffPoly::one());
        assert_eq!(s.coefficient(&JetMonomial::jet(4, 0)), DiffPoly::constant(rat(1, 12)).mul_steps(0, 2));
        assert!(s.coefficient(&JetMonomial::jet(3, 0)).is_zero());
    }

    #[test]
    fn forward_difference_is_first_order() {
        let ux = diff_op(&u(0, 0), Dir::PlusH).unwrap();
        let r = consistency_report(&ux, &JetPoly::jet(0, 1)).unwrap();
        assert!(r.consistent);
        assert_eq!(r.order_x, Some(1));
        assert_eq!(r.order_t, None);
    }

    #[test]
    fn uncancelled_negative_powers_are_inconsistent() {
        let p = u(1, 0).mul_steps(0, -1);
        assert!(matches!(consistency_report(&p, &JetPoly::jet(1, 0)), Err(AlgebraError::Inconsistent(_))));
    }

    #[test]
    fn coordinates_pass_through() {
        let p = &DiffPoly::t() * &u(0, 1);
        let s = taylor_expand(&p, 1);
        assert_eq!(s.coefficient(&JetMonomial::jet(0, 0)), DiffPoly::t());
        assert_eq!(s.coefficient(&JetMonomial::jet(0, 1)), &DiffPoly::t() * &DiffPoly::h());
    }

    #[test]
    fn proportionality_up_to_mesh_factor() {
        let a = JetPoly::jet(0, 1).scale_poly(&DiffPoly::h().scale_int(2));
        assert!(a.proportional_to(&JetPoly::jet(0, 1)));
        assert!(!a.proportional_to(&JetPoly::jet(1, 0)));
        let mixed = JetPoly::jet(0, 1).add(&JetPoly::jet(1, 0));
        assert!(!mixed.proportional_to(&JetPoly::jet(0, 1)));
    }
}
