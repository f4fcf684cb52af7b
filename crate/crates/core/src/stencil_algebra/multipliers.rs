//! Direct (multiplier) method: linear solves of `E(Lambda * F) == 0`.
//!
//! Either the multiplier or the scheme carries unknown constant coefficients
//! over a fixed basis; the other factor is fixed. Splitting the Euler image
//! by monomials (with `h`, `tau`, `t`, `x` treated as independent symbols)
//! gives a homogeneous linear system over the rationals.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::jet::{taylor_through_degree, JetMonomial, JetPoly};
use super::linalg::{self, Rref, SparseRow};
use super::notation::{center, u};
use super::ops::euler_op;
use super::poly::{DiffPoly, Rational};
use super::var::Monomial;
use super::AlgebraError;

/// A list of basis elements, one unknown constant coefficient per element.
#[derive(Clone, Debug)]
pub struct AnsatzSpec {
    basis: Vec<DiffPoly>,
    names: Vec<String>,
}

impl AnsatzSpec {
    /// Fails if the basis elements are linearly dependent.
    pub fn new(basis: Vec<DiffPoly>, names: Vec<String>) -> Result<Self, AlgebraError> {
        assert_eq!(basis.len(), names.len(), "one name per basis element");
        let (coords, _) = coordinates(&basis);
        let rank = linalg::rank_of(&coords);
        if rank < basis.len() {
            return Err(AlgebraError::DependentAnsatz { rank, len: basis.len() });
        }
        Ok(AnsatzSpec { basis, names })
    }

    /// Uses each element's display form as its name.
    pub fn from_basis(basis: Vec<DiffPoly>) -> Result<Self, AlgebraError> {
        let names = basis.iter().map(|b| b.to_string()).collect();
        AnsatzSpec::new(basis, names)
    }

    pub fn basis(&self) -> &[DiffPoly] {
        &self.basis
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `z1 U + z2 U_+ + z3 U_- + z4 Ucheck + z5 Uhat`.
    pub fn cross5_linear() -> Self {
        let pts = [(0, 0), (0, 1), (0, -1), (-1, 0), (1, 0)];
        AnsatzSpec::new(
            pts.iter().map(|&(k, l)| u(k, l)).collect(),
            pts.iter().map(|&(k, l)| format!("U[{k},{l}]")).collect(),
        )
        .expect("distinct grid values are independent")
    }

    /// The nine-point linear form `z1 U + ... + z9 Ucheck_-` in the usual order
    /// `U, U_+, U_-, Uhat, Uhat_+, Uhat_-, Ucheck, Ucheck_+, Ucheck_-`.
    pub fn nine_linear() -> Self {
        let pts = [(0, 0), (0, 1), (0, -1), (1, 0), (1, 1), (1, -1), (-1, 0), (-1, 1), (-1, -1)];
        AnsatzSpec::new(
            pts.iter().map(|&(k, l)| u(k, l)).collect(),
            pts.iter().map(|&(k, l)| format!("U[{k},{l}]")).collect(),
        )
        .expect("distinct grid values are independent")
    }

    /// `{1, t, x}`.
    pub fn affine_tx() -> Self {
        AnsatzSpec::new(
            vec![DiffPoly::one(), DiffPoly::t(), DiffPoly::x()],
            vec!["1".into(), "t".into(), "x".into()],
        )
        .expect("independent")
    }

    /// `{1, t, x} x {1, U, U_x, U_xbar, U_t, Ucheck_t}` on the cross stencil:
    /// each element tends to a finite continuum limit.
    pub fn cross5_affine_differences() -> Self {
        use super::notation::{ut, ut_check, ux, ux_bar};
        let weights = [("", DiffPoly::one()), ("t*", DiffPoly::t()), ("x*", DiffPoly::x())];
        let fields = [
            ("1", DiffPoly::one()),
            ("U", center()),
            ("U_x", ux()),
            ("U_xbar", ux_bar()),
            ("U_t", ut()),
            ("Ucheck_t", ut_check()),
        ];
        let mut basis = Vec::new();
        let mut names = Vec::new();
        for (wn, w) in &weights {
            for (fname, f) in &fields {
                basis.push(w * f);
                names.push(if wn.is_empty() { fname.to_string() } else { format!("{wn}{fname}") });
            }
        }
        AnsatzSpec::new(basis, names).expect("independent")
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "cross5_linear" => Some(Self::cross5_linear()),
            "nine_linear" => Some(Self::nine_linear()),
            "affine_tx" => Some(Self::affine_tx()),
            "cross5_affine_differences" => Some(Self::cross5_affine_differences()),
            _ => None,
        }
    }

    pub fn combine(&self, coeffs: &[Rational]) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if !c.is_zero() {
                out += &b.scale(c);
            }
        }
        out
    }
}

/// Coefficient vectors of polynomials over the union of their monomials.
fn coordinates(polys: &[DiffPoly]) -> (Vec<Vec<Rational>>, Vec<Monomial>) {
    let monos: BTreeSet<Monomial> = polys.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
    let monos: Vec<Monomial> = monos.into_iter().collect();
    let coords = polys
        .iter()
        .map(|p| monos.iter().map(|m| p.coefficient(m)).collect())
        .collect();
    (coords, monos)
}

/// Rows of the system `sum_j c_j images[j] == 0`, one per monomial.
fn monomial_rows(images: &[DiffPoly]) -> Vec<SparseRow> {
    let mut rows: BTreeMap<Monomial, SparseRow> = BTreeMap::new();
    for (j, img) in images.iter().enumerate() {
        for (m, c) in img.terms() {
            rows.entry(m.clone()).or_default().insert(j, c.clone());
        }
    }
    rows.into_values().collect()
}

/// Solution space of the multiplier determining equations over an ansatz.
#[derive(Clone, Debug)]
pub struct MultiplierSpace {
    /// Reduced-row-echelon nullspace vectors, one per free ansatz coefficient.
    pub coords: Vec<Vec<Rational>>,
    pub multipliers: Vec<DiffPoly>,
}

pub fn multiplier_space(f: &DiffPoly, ansatz: &AnsatzSpec) -> Result<MultiplierSpace, AlgebraError> {
    let images = ansatz
        .basis()
        .iter()
        .map(|b| euler_op(&(b * f)))
        .collect::<Result<Vec<_>, _>>()?;
    let coords = linalg::nullspace(ansatz.len(), monomial_rows(&images));
    let multipliers: Vec<DiffPoly> = coords.iter().map(|c| ansatz.combine(c)).collect();
    for m in &multipliers {
        if !euler_op(&(m * f))?.is_zero() {
            return Err(AlgebraError::Verification(m.to_string()));
        }
    }
    Ok(MultiplierSpace { coords, multipliers })
}

/// Basis of all multipliers in the span of `ansatz` for the scheme `f`.
/// Empty means no multiplier exists in the ansatz.
pub fn find_multipliers(f: &DiffPoly, ansatz: &AnsatzSpec) -> Result<Vec<DiffPoly>, AlgebraError> {
    Ok(multiplier_space(f, ansatz)?.multipliers)
}

/// Reverse mode: `lambda` fixed, scheme coefficients unknown. Returns a
/// basis of all schemes in the span of `scheme_ansatz` admitting `lambda`.
pub fn solve_scheme_coefficients(
    scheme_ansatz: &AnsatzSpec,
    lambda: &DiffPoly,
) -> Result<Vec<DiffPoly>, AlgebraError> {
    let images = scheme_ansatz
        .basis()
        .iter()
        .map(|b| euler_op(&(lambda * b)))
        .collect::<Result<Vec<_>, _>>()?;
    let coords = linalg::nullspace(scheme_ansatz.len(), monomial_rows(&images));
    let schemes: Vec<DiffPoly> = coords.iter().map(|c| scheme_ansatz.combine(c)).collect();
    for s in &schemes {
        if !euler_op(&(lambda * s))?.is_zero() {
            return Err(AlgebraError::Verification(s.to_string()));
        }
    }
    Ok(schemes)
}

/// A consistent representative of a scheme family plus its remaining
/// free directions.
#[derive(Clone, Debug)]
pub struct PinnedScheme {
    pub particular: DiffPoly,
    pub free: Vec<DiffPoly>,
}

/// Key for one scalar equation in a Taylor coefficient match.
type JetKey = (JetMonomial, Monomial);

fn jet_entries(j: &JetPoly) -> BTreeMap<JetKey, Rational> {
    let mut out = BTreeMap::new();
    for (jm, c) in j.terms() {
        for (m, a) in c.terms() {
            out.insert((jm.clone(), m.clone()), a.clone());
        }
    }
    out
}

/// Method of undetermined coefficients over a family: finds the members
/// whose Taylor expansion has no negative-degree terms, equals `target` at
/// degree zero, and vanishes at degrees `1..min_order`.
pub fn pin_by_consistency(family: &[DiffPoly], target: &JetPoly, min_order: i32) -> Option<PinnedScheme> {
    let max_deg = (min_order - 1).max(0);
    let expansions: Vec<BTreeMap<JetKey, Rational>> = family
        .iter()
        .map(|f| jet_entries(&taylor_through_degree(f, max_deg)))
        .collect();
    let target_entries = jet_entries(target);

    let mut keys: BTreeSet<JetKey> = target_entries.keys().cloned().collect();
    for e in &expansions {
        keys.extend(e.keys().cloned());
    }
    let rows = keys.into_iter().map(|key| {
        let row: SparseRow = expansions
            .iter()
            .enumerate()
            .filter_map(|(j, e)| e.get(&key).map(|c| (j, c.clone())))
            .collect();
        let rhs = target_entries.get(&key).cloned().unwrap_or_else(Rational::zero);
        (row, rhs)
    });
    let (x, hom) = linalg::solve(family.len(), rows)?;
    let combine = |c: &[Rational]| {
        let mut out = DiffPoly::zero();
        for (a, f) in c.iter().zip(family) {
            if !a.is_zero() {
                out += &f.scale(a);
            }
        }
        out
    };
    Some(PinnedScheme { particular: combine(&x), free: hom.iter().map(|v| combine(v)).collect() })
}

/// Whether `p` lies in the rational span of `basis`.
pub fn in_span(basis: &[DiffPoly], p: &DiffPoly) -> bool {
    let mut all = basis.to_vec();
    let (coords, _) = coordinates(&all);
    let r0 = linalg::rank_of(&coords);
    all.push(p.clone());
    let (coords, _) = coordinates(&all);
    linalg::rank_of(&coords) == r0
}

/// Whether two lists span the same space.
pub fn same_span(a: &[DiffPoly], b: &[DiffPoly]) -> bool {
    let (ca, _) = coordinates(a);
    let (cb, _) = coordinates(b);
    let mut both = a.to_vec();
    both.extend_from_slice(b);
    let (cab, _) = coordinates(&both);
    let (ra, rb, rab) = (linalg::rank_of(&ca), linalg::rank_of(&cb), linalg::rank_of(&cab));
    ra == rb && ra == rab
}

/// Searches the span of `basis` for an element whose leading Taylor part
/// is `P(h, tau) * target` with `P` a nonzero homogeneous step polynomial.
///
/// Degrees from the lowest occurring degree up to `max_degree` are tried;
/// on success returns the degree and the coefficient vector of a witness.
pub fn span_admits_limit(basis: &[DiffPoly], target: &JetPoly, max_degree: i32) -> Option<(i32, Vec<Rational>)> {
    if basis.is_empty() {
        return None;
    }
    let expansions: Vec<JetPoly> = basis.iter().map(|b| taylor_through_degree(b, max_degree)).collect();
    let lo = expansions.iter().filter_map(JetPoly::min_degree).min()?;
    let target_entries = jet_entries(target);
    let n = basis.len();

    for d in lo..=max_degree {
        // Candidate step factors h^a tau^(d-a) seen among the basis expansions.
        let mut step_exps: BTreeSet<i32> = BTreeSet::new();
        for e in &expansions {
            for (_, c) in e.degree_part(d).terms() {
                for (m, _) in c.terms() {
                    step_exps.insert(m.exponent(&super::var::Var::H));
                }
            }
        }
        if step_exps.is_empty() {
            continue;
        }
        let steps: Vec<i32> = step_exps.into_iter().collect();
        let below: Vec<BTreeMap<JetKey, Rational>> =
            expansions.iter().map(|e| jet_entries(&e.degree_range(i32::MIN, d))).collect();

        // Columns: basis coefficients, then one per step factor.
        let mut rows: BTreeMap<JetKey, SparseRow> = BTreeMap::new();
        for (j, e) in below.iter().enumerate() {
            for (key, c) in e {
                rows.entry(key.clone()).or_default().insert(j, c.clone());
            }
        }
        for (s, &a) in steps.iter().enumerate() {
            let factor = DiffPoly::steps(a, d - a);
            let scaled = jet_entries(&JetPoly::zero().add(target).scale_poly(&factor));
            for (key, c) in scaled {
                rows.entry(key).or_default().insert(n + s, -c);
            }
        }
        debug_assert!(target_entries.keys().all(|_| true));
        let rref = Rref::from_rows(n + steps.len(), rows.into_values());
        for v in rref.nullspace() {
            if v[n..].iter().any(|c| !c.is_zero()) {
                return Some((d, v[..n].to_vec()));
            }
        }
    }
    None
}
