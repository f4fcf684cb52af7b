#![allow(dead_code)]

use fdcons::numeric::Kernel;
use fdcons::stencil_algebra::{DiffPoly, Var};
use proptest::prelude::*;

/// `(coef, grid factors, t power, x power, h power, tau power)`
type TermSpec = (i64, Vec<(i32, i32)>, u32, u32, i32, i32);

fn term(spec: &TermSpec) -> DiffPoly {
    let (c, grid, a, b, he, te) = spec;
    let mut p = DiffPoly::int(*c).mul_steps(*he, *te);
    for (k, l) in grid {
        p = &p * &DiffPoly::grid(*k, *l);
    }
    &(&p * &DiffPoly::t().pow(*a)) * &DiffPoly::x().pow(*b)
}

fn build(terms: Vec<TermSpec>) -> DiffPoly {
    terms.iter().fold(DiffPoly::zero(), |acc, t| &acc + &term(t))
}

/// Random polynomial on the 3x3 stencil: up to `max_terms` terms of grid
/// degree at most two, with optional `t`, `x` factors and steps `h^{+-1}`, `tau^{+-1}`.
pub fn poly(max_terms: usize, coords: bool, negative_steps: bool) -> impl Strategy<Value = DiffPoly> {
    let coord = if coords { 0u32..=1 } else { 0u32..=0 };
    let step = if negative_steps { -1i32..=1 } else { 0i32..=1 };
    prop::collection::vec(
        (
            (-4i64..=4).prop_filter("nonzero", |c| *c != 0),
            prop::collection::vec((-1i32..=1, -1i32..=1), 0..=2),
            coord.clone(),
            coord,
            step.clone(),
            step,
        ),
        1..=max_terms,
    )
    .prop_map(build)
}

/// Random polynomial with grid factors only (no coordinates), steps allowed.
pub fn grid_poly(max_terms: usize) -> impl Strategy<Value = DiffPoly> {
    poly(max_terms, false, true)
}

/// Grid values on `k, l in -3..=3`, plus `t, x, h, tau`.
#[derive(Clone, Debug)]
pub struct Point {
    pub values: Vec<f64>,
    pub t: f64,
    pub x: f64,
    pub h: f64,
    pub tau: f64,
}

impl Point {
    pub fn value(&self, k: i32, l: i32) -> f64 {
        self.values[((k + 3) * 7 + (l + 3)) as usize]
    }

    pub fn var(&self, v: &Var) -> f64 {
        match v {
            Var::Grid(k, l) => self.value(*k, *l),
            Var::T => self.t,
            Var::X => self.x,
            Var::H => self.h,
            Var::Tau => self.tau,
            Var::Aux(a) => panic!("no value for {a}"),
        }
    }
}

pub fn point() -> impl Strategy<Value = Point> {
    (
        prop::collection::vec(-2.0f64..2.0, 49),
        -1.0f64..3.0,
        -1.0f64..2.0,
        0.005f64..0.2,
        0.005f64..0.2,
    )
        .prop_map(|(values, t, x, h, tau)| Point { values, t, x, h, tau })
}

/// `(kernel value, naive value, sum of |terms|)`
pub fn kernel_and_naive(p: &DiffPoly, pt: &Point) -> (f64, f64, f64) {
    let k = Kernel::compile(p, pt.h, pt.tau).unwrap();
    let e = k.eval(|a, b| pt.value(a, b), pt.t, pt.x);
    (e.value, p.eval(|v| pt.var(v)), p.eval_abs(|v| pt.var(v)))
}
