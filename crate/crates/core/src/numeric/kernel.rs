use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::stencil_algebra::{DiffPoly, Var};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KernelError {
    #[error("auxiliary symbol `{0}` has no numeric value")]
    AuxSymbol(String),
}

/// Value of a kernel together with the sum of absolute term values, the
/// natural scale for rounding error.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub scale: f64,
}

impl Evaluation {
    /// `|value| / scale`, or `|value|` when the scale vanishes.
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.abs() / self.scale
        } else {
            self.value.abs()
        }
    }
}

#[derive(Clone, Debug)]
struct Term {
    coef: f64,
    coef_abs: f64,
    center: i32,
    factors: Vec<(usize, i32)>,
    t: i32,
    x: i32,
}

/// A polynomial evaluated either on raw values or on the recentered form
/// `U[k,l] = U[0,0] + D[k,l]`, whichever has the smaller term scale at the
/// point. The recentered form wins on difference expressions over a large
/// background; the raw form wins when the center value does not cancel.
#[derive(Clone, Debug)]
pub struct Kernel {
    /// Off-center offsets referenced by either form.
    offsets: Vec<(i32, i32)>,
    raw: Vec<Term>,
    recentered: Vec<Term>,
    extent: (i32, i32, i32, i32),
}

type Key = (i32, Vec<(usize, i32)>, i32, i32);

fn compile_terms(p: &DiffPoly, index: &BTreeMap<(i32, i32), usize>, h: f64, tau: f64) -> Vec<Term> {
    let mut merged: BTreeMap<Key, (f64, f64)> = BTreeMap::new();
    for (m, c) in p.terms() {
        let mut coef = c.to_f64().unwrap_or(f64::NAN);
        let mut key: Key = (0, Vec::new(), 0, 0);
        for (v, e) in m.factors() {
            match v {
                Var::Grid(0, 0) => key.0 = *e,
                Var::Grid(k, l) => key.1.push((index[&(*k, *l)], *e)),
                Var::T => key.2 = *e,
                Var::X => key.3 = *e,
                Var::H => coef *= h.powi(*e),
                Var::Tau => coef *= tau.powi(*e),
                Var::Aux(_) => unreachable!("rejected in compile"),
            }
        }
        let slot = merged.entry(key).or_insert((0.0, 0.0));
        slot.0 += coef;
        slot.1 += coef.abs();
    }
    merged
        .into_iter()
        .map(|((center, factors, t, x), (coef, coef_abs))| Term { coef, coef_abs, center, factors, t, x })
        .collect()
}

fn eval_terms(terms: &[Term], c: f64, vals: &[f64], t: f64, x: f64) -> Evaluation {
    let mut out = Evaluation::default();
    for term in terms {
        let mut prod = c.powi(term.center) * t.powi(term.t) * x.powi(term.x);
        for &(i, e) in &term.factors {
            prod *= vals[i].powi(e);
        }
        out.value += term.coef * prod;
        out.scale += term.coef_abs * prod.abs();
    }
    out
}

impl Kernel {
    pub fn compile(p: &DiffPoly, h: f64, tau: f64) -> Result<Kernel, KernelError> {
        if let Some(Var::Aux(name)) = p.variables().into_iter().find(|v| matches!(v, Var::Aux(_))) {
            return Err(KernelError::AuxSymbol(name));
        }
        let offs = p.grid_offsets();
        let extent = if offs.is_empty() {
            (0, 0, 0, 0)
        } else {
            (
                offs.iter().map(|o| o.0).min().unwrap(),
                offs.iter().map(|o| o.0).max().unwrap(),
                offs.iter().map(|o| o.1).min().unwrap(),
                offs.iter().map(|o| o.1).max().unwrap(),
            )
        };
        // U[k,l] -> U[0,0] + U[k,l]; afterwards U[k,l] off-center stands for the difference.
        let shifted = p
            .substitute(|v| match v {
                Var::Grid(k, l) if (*k, *l) != (0, 0) => Some(&DiffPoly::grid(0, 0) + &DiffPoly::grid(*k, *l)),
                _ => None,
            })
            .expect("grid values never carry negative exponents");

        let offsets: Vec<(i32, i32)> = offs.into_iter().filter(|&o| o != (0, 0)).collect();
        let index: BTreeMap<(i32, i32), usize> = offsets.iter().enumerate().map(|(i, o)| (*o, i)).collect();
        Ok(Kernel {
            raw: compile_terms(p, &index, h, tau),
            recentered: compile_terms(&shifted, &index, h, tau),
            offsets,
            extent,
        })
    }

    /// `(kmin, kmax, lmin, lmax)` of the source polynomial.
    pub fn extent(&self) -> (i32, i32, i32, i32) {
        self.extent
    }

    pub fn is_zero(&self) -> bool {
        self.raw.is_empty()
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }

    /// Evaluates with `value(k, l)` giving `U[k,l]` and `t`, `x` the center coordinates.
    pub fn eval<F: Fn(i32, i32) -> f64>(&self, value: F, t: f64, x: f64) -> Evaluation {
        let c = value(0, 0);
        let mut vals: Vec<f64> = self.offsets.iter().map(|&(k, l)| value(k, l)).collect();
        let raw = eval_terms(&self.raw, c, &vals, t, x);
        for v in &mut vals {
            *v -= c;
        }
        let rec = eval_terms(&self.recentered, c, &vals, t, x);
        if rec.scale < raw.scale {
            rec
        } else {
            raw
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme_library::{get_scheme, SchemeName};
    use crate::stencil_algebra::notation::uxx;

    fn naive(p: &DiffPoly, vals: impl Fn(i32, i32) -> f64, t: f64, x: f64, h: f64, tau: f64) -> (f64, f64) {
        let lookup = |v: &Var| match v {
            Var::Grid(k, l) => vals(*k, *l),
            Var::T => t,
            Var::X => x,
            Var::H => h,
            Var::Tau => tau,
            Var::Aux(_) => f64::NAN,
        };
        (p.eval(lookup), p.eval_abs(lookup))
    }

    fn sample(k: i32, l: i32) -> f64 {
        (0.3 + 0.17 * k as f64 + 0.29 * l as f64).sin() + 0.4
    }

    #[test]
    fn second_difference_uses_differences() {
        let kern = Kernel::compile(&uxx(), 0.5, 0.25).unwrap();
        // Only D(0,1) and D(0,-1) appear, no center power.
        assert_eq!(kern.recentered.len(), 2);
        let e = kern.eval(sample, 0.0, 0.0);
        let (v, _) = naive(&uxx(), sample, 0.0, 0.0, 0.5, 0.25);
        assert!((e.value - v).abs() < 1e-14);
    }

    #[test]
    fn schemes_and_triples_match_naive_evaluation() {
        let (h, tau, t, x) = (0.37, 0.21, 0.8, -1.3);
        for n in SchemeName::ALL {
            let s = get_scheme(n);
            let mut polys = vec![s.residual.clone()];
            for tr in &s.triples {
                polys.extend([tr.multiplier.clone(), tr.density.clone(), tr.flux.clone()]);
            }
            for p in polys {
                let e = Kernel::compile(&p, h, tau).unwrap().eval(sample, t, x);
                let (v, scale) = naive(&p, sample, t, x, h, tau);
                assert!((e.value - v).abs() <= 1e-14 * scale.max(1.0), "{n}: {p}");
            }
        }
    }

    #[test]
    fn center_value_that_does_not_cancel_uses_raw_values() {
        let p = -DiffPoly::grid(-1, 0);
        let vals = |k: i32, _l: i32| if k == 0 { 0.34240705099320695 } else { -0.0005502143010588828 };
        let e = Kernel::compile(&p, 0.005, 0.005).unwrap().eval(vals, 0.0, 0.0);
        assert_eq!(e.value, 0.0005502143010588828);
    }

    #[test]
    fn aux_is_rejected() {
        assert!(Kernel::compile(&DiffPoly::aux("eps"), 1.0, 1.0).is_err());
    }
}
