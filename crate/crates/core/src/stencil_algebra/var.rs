use std::fmt;

/// Default bound on `|k|` and `|l|` for grid-value offsets.
pub const DEFAULT_WINDOW: i32 = 4;

/// A symbol that may appear in a difference polynomial.
///
/// The variant order is the monomial order: grid values sorted by
/// `(time offset, space offset)`, then `t`, `x`, `h`, `tau`, auxiliary symbols.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `U[k,l]`, the mesh value at `(t_{n+k}, x_{m+l})`.
    Grid(i32, i32),
    /// Time coordinate `t_n` at the stencil center.
    T,
    /// Space coordinate `x_m` at the stencil center.
    X,
    /// Space step.
    H,
    /// Time step.
    Tau,
    /// Group parameter used in symmetry checks (`eps`, `lam`, ...).
    Aux(String),
}

impl Var {
    pub fn grid(k: i32, l: i32) -> Self {
        Var::Grid(k, l)
    }

    pub fn eps() -> Self {
        Var::Aux("eps".to_string())
    }

    pub fn lam() -> Self {
        Var::Aux("lam".to_string())
    }

    /// Only the mesh steps may carry negative exponents.
    pub fn allows_negative(&self) -> bool {
        matches!(self, Var::H | Var::Tau)
    }

    pub fn is_grid(&self) -> bool {
        matches!(self, Var::Grid(..))
    }

    pub fn grid_offset(&self) -> Option<(i32, i32)> {
        match self {
            Var::Grid(k, l) => Some((*k, *l)),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Grid(k, l) => write!(f, "U[{k},{l}]"),
            Var::T => f.write_str("t"),
            Var::X => f.write_str("x"),
            Var::H => f.write_str("h"),
            Var::Tau => f.write_str("tau"),
            Var::Aux(name) => f.write_str(name),
        }
    }
}

/// A power product of variables, stored sorted with nonzero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Var, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// Builds a monomial from arbitrary `(var, exponent)` pairs, merging repeats.
    ///
    /// Returns `None` when a variable other than `h`/`tau` ends up with a
    /// negative exponent.
    pub fn from_pairs<I: IntoIterator<Item = (Var, i32)>>(pairs: I) -> Option<Self> {
        let mut v: Vec<(Var, i32)> = pairs.into_iter().collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Var, i32)> = Vec::with_capacity(v.len());
        for (var, e) in v {
            match out.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => out.push((var, e)),
            }
        }
        out.retain(|(_, e)| *e != 0);
        if out.iter().any(|(v, e)| *e < 0 && !v.allows_negative()) {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(Var, i32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: &Var) -> i32 {
        self.0
            .iter()
            .find(|(w, _)| w == v)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    /// Product of two monomials. Never fails: negative exponents can only
    /// come from `h`/`tau`, which permit them.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// The monomial with `v` removed entirely.
    pub fn without(&self, v: &Var) -> Monomial {
        Monomial(self.0.iter().filter(|(w, _)| w != v).cloned().collect())
    }

    /// Sum of exponents of grid values.
    pub fn grid_degree(&self) -> i32 {
        self.0.iter().filter(|(v, _)| v.is_grid()).map(|(_, e)| e).sum()
    }

    /// Combined exponent of `h` and `tau`.
    pub fn step_degree(&self) -> i32 {
        self.exponent(&Var::H) + self.exponent(&Var::Tau)
    }

    /// Scaling weight with `t`, `x`, `h`, `tau` of weight one and all else zero.
    pub fn length_weight(&self) -> i32 {
        self.0
            .iter()
            .filter(|(v, _)| matches!(v, Var::T | Var::X | Var::H | Var::Tau))
            .map(|(_, e)| e)
            .sum()
    }

    /// Splits into the grid-value part and the mesh-symbol part.
    pub fn split_grid(&self) -> (Monomial, Monomial) {
        let (g, m): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(v, _)| v.is_grid());
        (Monomial(g), Monomial(m))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else if *e < 0 {
                write!(f, "{v}^({e})")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values_sort_before_mesh_symbols() {
        let mut vars = vec![Var::Tau, Var::X, Var::grid(1, -1), Var::T, Var::H, Var::grid(-1, 1), Var::eps()];
        vars.sort();
        assert_eq!(
            vars,
            vec![Var::grid(-1, 1), Var::grid(1, -1), Var::T, Var::X, Var::H, Var::Tau, Var::eps()]
        );
    }

    #[test]
    fn negative_exponents_only_on_steps() {
        assert!(Monomial::from_pairs([(Var::H, -2), (Var::Tau, -1)]).is_some());
        assert!(Monomial::from_pairs([(Var::grid(0, 0), -1)]).is_none());
        assert!(Monomial::from_pairs([(Var::T, -1)]).is_none());
    }

    #[test]
    fn merging_cancels_to_one() {
        let m = Monomial::from_pairs([(Var::H, 2), (Var::H, -2)]).unwrap();
        assert!(m.is_one());
        let a = Monomial::from_pairs([(Var::H, -1), (Var::grid(0, 1), 1)]).unwrap();
        let b = Monomial::from_pairs([(Var::H, 1)]).unwrap();
        assert_eq!(a.mul(&b), Monomial::var(Var::grid(0, 1)));
    }
}
