use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::var::{Monomial, Var};
use super::AlgebraError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact polynomial over stencil grid values and mesh symbols with rational
/// coefficients. `h` and `tau` may carry negative exponents.
///
/// The representation is canonical (no zero coefficients, monomials in a
/// fixed order), so structural equality is semantic equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        DiffPoly::constant(int(n))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn var(v: Var) -> Self {
        DiffPoly::term(Rational::one(), Monomial::var(v))
    }

    /// `U[k,l]`.
    pub fn grid(k: i32, l: i32) -> Self {
        DiffPoly::var(Var::grid(k, l))
    }

    pub fn t() -> Self {
        DiffPoly::var(Var::T)
    }

    pub fn x() -> Self {
        DiffPoly::var(Var::X)
    }

    pub fn h() -> Self {
        DiffPoly::var(Var::H)
    }

    pub fn tau() -> Self {
        DiffPoly::var(Var::Tau)
    }

    /// `h^a * tau^b` for any integer exponents.
    pub fn steps(h_exp: i32, tau_exp: i32) -> Self {
        let m = Monomial::from_pairs([(Var::H, h_exp), (Var::Tau, tau_exp)])
            .expect("mesh steps admit negative exponents");
        DiffPoly::term(Rational::one(), m)
    }

    pub fn aux(name: &str) -> Self {
        DiffPoly::var(Var::Aux(name.to_string()))
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(it: I) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> DiffPoly {
        self.scale(&int(n))
    }

    /// Multiplies by `h^a * tau^b`.
    pub fn mul_steps(&self, h_exp: i32, tau_exp: i32) -> DiffPoly {
        self * &DiffPoly::steps(h_exp, tau_exp)
    }

    pub fn pow(&self, n: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// All variables occurring in the polynomial.
    pub fn variables(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.clone()))
            .collect()
    }

    /// Grid offsets `(k, l)` occurring in the polynomial, in monomial order.
    pub fn grid_offsets(&self) -> BTreeSet<(i32, i32)> {
        self.variables().iter().filter_map(Var::grid_offset).collect()
    }

    pub fn has_aux(&self) -> bool {
        self.variables().iter().any(|v| matches!(v, Var::Aux(_)))
    }

    pub fn max_grid_degree(&self) -> i32 {
        self.terms.keys().map(Monomial::grid_degree).max().unwrap_or(0)
    }

    /// Formal partial derivative with respect to a variable.
    pub fn derivative(&self, v: &Var) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            out.add_term(lower_exponent(m, v), c * int(e as i64));
        }
        out
    }

    /// Substitutes polynomials for variables. Variables not mapped stay.
    ///
    /// Substituting a variable that appears with a negative exponent is an
    /// error (only `h`/`tau` can, and those are inverted only symbolically).
    pub fn substitute<F>(&self, mut map: F) -> Result<DiffPoly, AlgebraError>
    where
        F: FnMut(&Var) -> Option<DiffPoly>,
    {
        let mut out = DiffPoly::zero();
        let mut cache: BTreeMap<Var, Option<DiffPoly>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut kept = Vec::new();
            let mut prod = DiffPoly::constant(c.clone());
            for (v, e) in m.factors() {
                let image = cache.entry(v.clone()).or_insert_with(|| map(v)).clone();
                match image {
                    None => kept.push((v.clone(), *e)),
                    Some(p) => {
                        if *e < 0 {
                            return Err(AlgebraError::NegativeSubstitution(v.to_string()));
                        }
                        prod = &prod * &p.pow(*e as u32);
                    }
                }
            }
            let rest = Monomial::from_pairs(kept).expect("exponents copied from a valid monomial");
            out += &(&prod * &DiffPoly::term(Rational::one(), rest));
        }
        Ok(out)
    }

    /// Numeric term-by-term evaluation.
    pub fn eval<F: FnMut(&Var) -> f64>(&self, mut value: F) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for (v, e) in m.factors() {
                t *= value(v).powi(*e);
            }
            acc += t;
        }
        acc
    }

    /// Sum of absolute term values, the natural rounding scale of `eval`.
    pub fn eval_abs<F: FnMut(&Var) -> f64>(&self, mut value: F) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN).abs();
            for (v, e) in m.factors() {
                t *= value(v).powi(*e).abs();
            }
            acc += t;
        }
        acc
    }

    /// Keeps only terms satisfying the predicate.
    pub fn filter_terms<F: Fn(&Monomial) -> bool>(&self, keep: F) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Leading coefficient in the monomial order, used for normalization.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next()
    }

    /// Divides by the leading coefficient so the result is monic.
    pub fn monic(&self) -> DiffPoly {
        match self.leading() {
            Some((_, c)) => self.scale(&(Rational::one() / c)),
            None => DiffPoly::zero(),
        }
    }
}

fn lower_exponent(m: &Monomial, v: &Var) -> Monomial {
    Monomial::from_pairs(
        m.factors()
            .iter()
            .map(|(w, e)| if w == v { (w.clone(), e - 1) } else { (w.clone(), *e) }),
    )
    .expect("only h and tau can be lowered below zero")
}

impl From<Var> for DiffPoly {
    fn from(v: Var) -> Self {
        DiffPoly::var(v)
    }
}

impl<'a> Add<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Sub<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(mut self, rhs: DiffPoly) -> DiffPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

impl<'a> Mul<&'a DiffPoly> for &'a DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_drops_zeros() {
        let u = DiffPoly::grid(0, 0);
        let p = &u - &u;
        assert!(p.is_zero());
        assert_eq!(p, DiffPoly::zero());
    }

    #[test]
    fn laurent_steps_cancel() {
        let p = DiffPoly::grid(0, 1).mul_steps(-2, 0).mul_steps(2, 0);
        assert_eq!(p, DiffPoly::grid(0, 1));
    }

    #[test]
    fn derivative_of_power() {
        let u = DiffPoly::grid(0, 0);
        let d = u.pow(3).derivative(&Var::grid(0, 0));
        assert_eq!(d, u.pow(2).scale_int(3));
        let w = DiffPoly::grid(0, 1).mul_steps(-1, 0);
        assert_eq!(w.derivative(&Var::grid(0, 1)), DiffPoly::steps(-1, 0));
    }

    #[test]
    fn substitution_expands() {
        let u = DiffPoly::grid(0, 0);
        let sq = u.pow(2);
        let shifted = sq
            .substitute(|v| (*v == Var::grid(0, 0)).then(|| &u + &DiffPoly::aux("eps")))
            .unwrap();
        let eps = DiffPoly::aux("eps");
        let expect = &(&u.pow(2) + &(&u * &eps).scale_int(2)) + &eps.pow(2);
        assert_eq!(shifted, expect);
    }

    #[test]
    fn display_is_readable() {
        let p = &DiffPoly::grid(0, -1) - &DiffPoly::grid(0, 1);
        assert_eq!(p.to_string(), "U[0,-1] - U[0,1]");
    }
}
