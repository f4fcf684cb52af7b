//! Sparse Gauss-Jordan elimination over the rationals.
//!
//! The reduced row echelon form is unique for a fixed column order, so every
//! basis produced here is reproducible regardless of row order.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::poly::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

/// Incrementally maintained reduced row echelon form.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    ncols: usize,
    /// Pivot column -> row with a unit entry there and zeros in every other
    /// pivot column.
    pivots: BTreeMap<usize, SparseRow>,
}

impl Rref {
    pub fn new(ncols: usize) -> Self {
        Rref { ncols, pivots: BTreeMap::new() }
    }

    pub fn from_rows<I: IntoIterator<Item = SparseRow>>(ncols: usize, rows: I) -> Self {
        let mut r = Rref::new(ncols);
        for row in rows {
            r.insert(row);
        }
        r
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn pivot_row(&self, col: usize) -> Option<&SparseRow> {
        self.pivots.get(&col)
    }

    /// Reduces `row` against the current pivots. Returns the remainder.
    pub fn reduce(&self, mut row: SparseRow) -> SparseRow {
        let hits: Vec<(usize, Rational)> = row
            .iter()
            .filter(|(c, _)| self.pivots.contains_key(c))
            .map(|(c, v)| (*c, v.clone()))
            .collect();
        for (c, coef) in hits {
            axpy(&mut row, &-coef, &self.pivots[&c]);
        }
        row
    }

    /// Adds a row; returns `true` if it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> bool {
        let mut row = self.reduce(row);
        row.retain(|_, v| !v.is_zero());
        let Some((&lead, lead_val)) = row.iter().next() else {
            return false;
        };
        let inv = Rational::one() / lead_val;
        for v in row.values_mut() {
            *v *= &inv;
        }
        for other in self.pivots.values_mut() {
            if let Some(coef) = other.get(&lead).cloned() {
                axpy(other, &-coef, &row);
            }
        }
        self.pivots.insert(lead, row);
        true
    }

    /// Basis of `{ v : A v = 0 }`, one vector per free column in column order.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let mut basis = Vec::new();
        for free in 0..self.ncols {
            if self.pivots.contains_key(&free) {
                continue;
            }
            let mut v = vec![Rational::zero(); self.ncols];
            v[free] = Rational::one();
            for (&pc, row) in &self.pivots {
                if let Some(a) = row.get(&free) {
                    v[pc] = -a.clone();
                }
            }
            basis.push(v);
        }
        basis
    }
}

fn axpy(target: &mut SparseRow, coef: &Rational, src: &SparseRow) {
    for (c, v) in src {
        let add = coef * v;
        match target.get_mut(c) {
            Some(existing) => {
                *existing += add;
                if existing.is_zero() {
                    target.remove(c);
                }
            }
            None => {
                if !add.is_zero() {
                    target.insert(*c, add);
                }
            }
        }
    }
}

/// Nullspace of the matrix whose rows are given.
pub fn nullspace(ncols: usize, rows: impl IntoIterator<Item = SparseRow>) -> Vec<Vec<Rational>> {
    Rref::from_rows(ncols, rows).nullspace()
}

/// Solves `A x = b`, where each row carries its right-hand side.
///
/// Returns the particular solution with all free variables set to zero, and
/// a basis of the homogeneous solutions; `None` if inconsistent.
pub fn solve(
    ncols: usize,
    rows: impl IntoIterator<Item = (SparseRow, Rational)>,
) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let rhs_col = ncols;
    let augmented = rows.into_iter().map(|(mut r, b)| {
        if !b.is_zero() {
            r.insert(rhs_col, b);
        }
        r
    });
    let rref = Rref::from_rows(ncols + 1, augmented);
    if rref.pivots.contains_key(&rhs_col) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (&pc, row) in &rref.pivots {
        if let Some(b) = row.get(&rhs_col) {
            x[pc] = b.clone();
        }
    }
    let homogeneous = rref
        .nullspace()
        .into_iter()
        .filter(|v| v[rhs_col].is_zero())
        .map(|mut v| {
            v.truncate(ncols);
            v
        })
        .collect();
    Some((x, homogeneous))
}

/// Dense helper: rank of a set of coefficient vectors.
pub fn rank_of(vectors: &[Vec<Rational>]) -> usize {
    let ncols = vectors.iter().map(Vec::len).max().unwrap_or(0);
    Rref::from_rows(ncols, vectors.iter().map(|v| dense_to_sparse(v))).rank()
}

pub fn dense_to_sparse(v: &[Rational]) -> SparseRow {
    v.iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .map(|(i, a)| (i, a.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil_algebra::poly::int;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|(c, v)| (*c, int(*v))).collect()
    }

    #[test]
    fn nullspace_of_simple_system() {
        // x0 = 0, x1 + x2 = 0, x3 + x4 = 0
        let ns = nullspace(5, [row(&[(0, 2)]), row(&[(1, 1), (2, 1)]), row(&[(3, 3), (4, 3)])]);
        assert_eq!(ns.len(), 2);
        assert_eq!(ns[0], vec![int(0), int(-1), int(1), int(0), int(0)]);
        assert_eq!(ns[1], vec![int(0), int(0), int(0), int(-1), int(1)]);
    }

    #[test]
    fn row_order_does_not_change_rref() {
        let a = [row(&[(0, 1), (1, 2)]), row(&[(1, 1), (2, -1)]), row(&[(0, 2), (2, 3)])];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(nullspace(3, a), nullspace(3, b));
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        let (x, hom) = solve(2, [(row(&[(0, 1), (1, 1)]), int(3)), (row(&[(0, 1)]), int(1))]).unwrap();
        assert_eq!(x, vec![int(1), int(2)]);
        assert!(hom.is_empty());
        assert!(solve(1, [(row(&[(0, 1)]), int(1)), (row(&[(0, 2)]), int(3))]).is_none());
    }

    #[test]
    fn underdetermined_particular_sets_free_to_zero() {
        let (x, hom) = solve(3, [(row(&[(0, 1), (2, 1)]), int(5))]).unwrap();
        assert_eq!(x, vec![int(5), int(0), int(0)]);
        assert_eq!(hom.len(), 2);
    }
}
