//! The four wave-equation schemes and their conservation-law triples.
//!
//! Fluxes are stored with the sign convention
//! `D-tau(Theta) + D-h(Phi) == Lambda * F`, so a law printed as
//! `D-tau(Theta) - D-h(Psi) = 0` appears here with `Phi = -Psi`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::stencil_algebra::jet::{linear_wave_target, nonlinear_wave_target};
use crate::stencil_algebra::notation::{
    center, check, dxm, hat, plus, t_hat, u, ut, ut_check, utt, ux, ux_bar, uxx, x_plus,
};
use crate::stencil_algebra::{rat, DiffPoly, JetPoly};

mod symmetry;
mod verify;

pub use symmetry::{check_symmetries, SymmetryCheck, SymmetryReport, EXCLUDED_LORENTZ};
pub use verify::{verify_conservation_identity, IdentityForm, TripleCheck, VerificationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeName {
    LinearCross,
    NonlinearDiv2,
    NonlinearNine3,
    NonlinearCross1,
}

impl SchemeName {
    pub const ALL: [SchemeName; 4] = [
        SchemeName::LinearCross,
        SchemeName::NonlinearDiv2,
        SchemeName::NonlinearNine3,
        SchemeName::NonlinearCross1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeName::LinearCross => "LinearCross",
            SchemeName::NonlinearDiv2 => "NonlinearDiv2",
            SchemeName::NonlinearNine3 => "NonlinearNine3",
            SchemeName::NonlinearCross1 => "NonlinearCross1",
        }
    }

    /// Whether the scheme approximates `u_tt = (1 + u_x^2) u_xx`.
    pub fn is_nonlinear(self) -> bool {
        self != SchemeName::LinearCross
    }
}

impl fmt::Display for SchemeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown scheme `{0}` (expected LinearCross, NonlinearDiv2, NonlinearNine3 or NonlinearCross1)")]
pub struct UnknownScheme(pub String);

impl FromStr for SchemeName {
    type Err = UnknownScheme;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchemeName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownScheme(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepperKind {
    ExplicitCross,
    ExplicitNine,
    ImplicitTridiagonal,
}

/// Offsets `k in kmin..=kmax`, `l in lmin..=lmax` touched by an expression.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StencilExtent {
    pub kmin: i32,
    pub kmax: i32,
    pub lmin: i32,
    pub lmax: i32,
}

impl StencilExtent {
    pub fn of(p: &DiffPoly) -> Self {
        let offs = p.grid_offsets();
        let k = offs.iter().map(|o| o.0);
        let l = offs.iter().map(|o| o.1);
        StencilExtent {
            kmin: k.clone().min().unwrap_or(0),
            kmax: k.max().unwrap_or(0),
            lmin: l.clone().min().unwrap_or(0),
            lmax: l.max().unwrap_or(0),
        }
    }

    pub fn points(&self) -> usize {
        ((self.kmax - self.kmin + 1) * (self.lmax - self.lmin + 1)) as usize
    }
}

#[derive(Clone, Debug)]
pub struct ConservationTriple {
    /// Short name such as `Lambda3`.
    pub label: String,
    pub multiplier: DiffPoly,
    pub density: DiffPoly,
    pub flux: DiffPoly,
    /// Name of the continuum law, e.g. "energy".
    pub continuum_label: String,
    /// Leading Taylor term of the multiplier.
    pub continuum_multiplier: JetPoly,
}

#[derive(Clone, Debug)]
pub struct Scheme {
    pub name: SchemeName,
    pub residual: DiffPoly,
    pub stencil: StencilExtent,
    pub stepper_kind: StepperKind,
    pub triples: Vec<ConservationTriple>,
    /// Names of the finite transformations the residual is expected to respect.
    pub symmetries: Vec<&'static str>,
    pub target: JetPoly,
    /// Guaranteed consistency orders in `(tau, h)`.
    pub min_order: (i32, i32),
}

impl Scheme {
    pub fn triple(&self, label: &str) -> Option<&ConservationTriple> {
        self.triples.iter().find(|t| t.label.eq_ignore_ascii_case(label))
    }
}

fn triple(label: &str, continuum: &str, limit: JetPoly, lambda: DiffPoly, theta: DiffPoly, phi: DiffPoly) -> ConservationTriple {
    ConservationTriple {
        label: label.to_string(),
        multiplier: lambda,
        density: theta,
        flux: phi,
        continuum_label: continuum.to_string(),
        continuum_multiplier: limit,
    }
}

fn half(p: &DiffPoly) -> DiffPoly {
    p.scale(&rat(1, 2))
}

fn u_x() -> JetPoly {
    JetPoly::jet(0, 1)
}

fn u_t() -> JetPoly {
    JetPoly::jet(1, 0)
}

fn coord(p: DiffPoly) -> JetPoly {
    JetPoly::constant(p)
}

/// `(U_x + U_xbar)/2`
fn lambda2() -> DiffPoly {
    half(&(&ux() + &ux_bar()))
}

/// `(U_t + Ucheck_t)/2 = (Uhat - Ucheck)/(2 tau)`
fn lambda3() -> DiffPoly {
    half(&(&ut() + &ut_check()))
}

fn linear_cross() -> Scheme {
    let t = DiffPoly::t();
    let x = DiffPoly::x();
    let f = &utt() - &uxx();

    let l1 = triple("Lambda1", "momentum", coord(DiffPoly::one()), DiffPoly::one(), ut(), -ux());

    let th2 = &ut() * &half(&(&hat(&ux()) + &hat(&ux_bar())));
    let ph2 = -half(&(&(&ut() * &plus(&ut())) + &ux().pow(2)));
    let l2 = triple("Lambda2", "x-translation", u_x(), lambda2(), th2, ph2);

    let th3 = half(&(&(&ux() * &hat(&ux())) + &ut().pow(2)));
    let ph3 = -(&ux() * &half(&(&plus(&ut()) + &plus(&ut_check()))));
    let l3 = triple("Lambda3", "energy", u_t(), lambda3(), th3, ph3);

    let th4 = &(&t_hat() * &ut()) - &hat(&center());
    let ph4 = -(&t * &ux());
    let l4 = triple("Lambda4", "center of mass", coord(t.clone()), t.clone(), th4, ph4);

    let th5 = &x * &ut();
    let ph5 = -(&(&x_plus() * &ux()) - &u(0, 1));
    let l5 = triple("Lambda5", "x-weighted momentum", coord(x.clone()), x.clone(), th5, ph5);

    let lam7 = &(&t * &lambda2()) + &(&x * &lambda3());
    let th7 = {
        let a = &(&half(&(&t + &t_hat())) * &lambda2()) * &ut();
        let b = &half(&x) * &ut().pow(2);
        let c = &(&(&x.scale_int(3) - &x_plus()).scale(&rat(1, 4)) * &hat(&ux_bar())) * &ux_bar();
        &(&a + &b) + &c
    };
    let ph7 = {
        let a = &(&half(&(&x + &x_plus())) * &ux()) * &lambda3();
        let b = &(&(&t.scale_int(3) - &t_hat()).scale(&rat(1, 4)) * &plus(&ut_check())) * &ut_check();
        let c = &half(&t) * &ux().pow(2);
        -(&(&a + &b) + &c)
    };
    let limit7 = JetPoly::constant(t.clone()).mul(&u_x()).add(&JetPoly::constant(x.clone()).mul(&u_t()));
    let l7 = triple("Lambda7", "boost-type", limit7, lam7, th7, ph7);

    Scheme {
        name: SchemeName::LinearCross,
        stencil: StencilExtent::of(&f),
        residual: f,
        stepper_kind: StepperKind::ExplicitCross,
        triples: vec![l1, l2, l3, l4, l5, l7],
        symmetries: vec!["gauge", "galilei", "stretch_x", "scale", "translation"],
        target: linear_wave_target(),
        min_order: (2, 2),
    }
}

fn nonlinear_div2() -> Scheme {
    let t = DiffPoly::t();
    let cubic = (&ux().pow(3) - &ux_bar().pow(3)).mul_steps(-1, 0).scale(&rat(1, 3));
    let f = &(&utt() - &uxx()) - &cubic;
    let flux_core = &ux() + &ux().pow(3).scale(&rat(1, 3));

    let l1 = triple("Lambda1", "momentum", coord(DiffPoly::one()), DiffPoly::one(), ut(), -flux_core.clone());
    let th4 = &(&t * &ut()) - &center();
    let l4 = triple("Lambda4", "center of mass", coord(t.clone()), t.clone(), th4, -(&t * &flux_core));

    Scheme {
        name: SchemeName::NonlinearDiv2,
        stencil: StencilExtent::of(&f),
        residual: f,
        stepper_kind: StepperKind::ExplicitCross,
        triples: vec![l1, l4],
        symmetries: vec!["gauge", "galilei", "scale", "translation"],
        target: nonlinear_wave_target(),
        min_order: (2, 2),
    }
}

/// `1 + U_x (Uhat_x + Ucheck_x)/6`
fn nine3_factor() -> DiffPoly {
    &DiffPoly::one() + &(&ux() * &(&hat(&ux()) + &check(&ux()))).scale(&rat(1, 6))
}

fn nonlinear_nine3() -> Scheme {
    let t = DiffPoly::t();
    let inner = &ux().pow(2) * &(&hat(&ux()) + &check(&ux()));
    let f = &(&utt() - &uxx()) - &dxm(&inner).scale(&rat(1, 6));
    let k = nine3_factor();

    let l1 = triple("Lambda1", "momentum", coord(DiffPoly::one()), DiffPoly::one(), ut(), -(&ux() * &k));

    let th3 = &half(&(&(&ux() * &hat(&ux())) + &ut().pow(2))) + &(&ux().pow(2) * &hat(&ux()).pow(2)).scale(&rat(1, 12));
    let ph3 = -(&(&ux() * &half(&(&plus(&ut()) + &plus(&ut_check())))) * &k);
    let l3 = triple("Lambda3", "energy", u_t(), lambda3(), th3, ph3);

    let th4 = &(&t * &ut()) - &center();
    let ph4 = -(&(&t * &ux()) * &k);
    let l4 = triple("Lambda4", "center of mass", coord(t.clone()), t.clone(), th4, ph4);

    Scheme {
        name: SchemeName::NonlinearNine3,
        stencil: StencilExtent::of(&f),
        residual: f,
        stepper_kind: StepperKind::ImplicitTridiagonal,
        triples: vec![l1, l3, l4],
        symmetries: vec!["gauge", "galilei", "scale", "translation"],
        target: nonlinear_wave_target(),
        min_order: (2, 2),
    }
}

fn nonlinear_cross1() -> Scheme {
    let coef = half(&(&ux().pow(2) + &ux_bar().pow(2)));
    let f = &(&utt() - &uxx()) - &(&coef * &uxx());
    let th2 = &ut() * &half(&(&hat(&ux()) + &hat(&ux_bar())));
    let ph2 = -(&half(&(&(&ut() * &plus(&ut())) + &ux().pow(2))) + &ux().pow(4).scale(&rat(1, 4)));
    let l2 = triple("Lambda2*", "x-translation", u_x(), lambda2(), th2, ph2);

    Scheme {
        name: SchemeName::NonlinearCross1,
        stencil: StencilExtent::of(&f),
        residual: f,
        stepper_kind: StepperKind::ExplicitCross,
        triples: vec![l2],
        symmetries: vec!["gauge", "galilei", "scale", "translation"],
        target: nonlinear_wave_target(),
        min_order: (2, 2),
    }
}

pub fn get_scheme(name: SchemeName) -> Scheme {
    match name {
        SchemeName::LinearCross => linear_cross(),
        SchemeName::NonlinearDiv2 => nonlinear_div2(),
        SchemeName::NonlinearNine3 => nonlinear_nine3(),
        SchemeName::NonlinearCross1 => nonlinear_cross1(),
    }
}

/// Looks a scheme up by its display name.
pub fn scheme_by_name(name: &str) -> Result<Scheme, UnknownScheme> {
    Ok(get_scheme(name.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stencil_algebra::notation::dtm;
    use crate::stencil_algebra::{euler_op, sexp};

    #[test]
    fn names_round_trip() {
        for n in SchemeName::ALL {
            assert_eq!(n.as_str().parse::<SchemeName>().unwrap(), n);
        }
        assert!("Nope".parse::<SchemeName>().is_err());
    }

    #[test]
    fn linear_cross_is_divergence_form() {
        let s = get_scheme(SchemeName::LinearCross);
        assert_eq!(s.residual, &dtm(&ut()) - &dxm(&ux()));
        assert_eq!(s.stencil, StencilExtent { kmin: -1, kmax: 1, lmin: -1, lmax: 1 });
    }

    #[test]
    fn every_multiplier_passes_the_euler_test() {
        for n in SchemeName::ALL {
            let s = get_scheme(n);
            for tr in &s.triples {
                let e = euler_op(&(&tr.multiplier * &s.residual)).unwrap();
                assert!(e.is_zero(), "{n} {}", tr.label);
            }
        }
    }

    #[test]
    fn cross1_residual_matches_hand_form() {
        let s = get_scheme(SchemeName::NonlinearCross1);
        let text = "(- (* (^ tau -2) (+ U[1,0] (* -2 U[0,0]) U[-1,0])) \
                    (* (+ 1 (* 1/2 (^ h -2) (+ (^ (- U[0,1] U[0,0]) 2) (^ (- U[0,0] U[0,-1]) 2)))) \
                       (^ h -2) (+ U[0,1] (* -2 U[0,0]) U[0,-1])))";
        assert_eq!(sexp::from_sexp(text).unwrap(), s.residual);
    }

    #[test]
    fn upper_layer_enters_linearly() {
        for n in SchemeName::ALL {
            let s = get_scheme(n);
            for (m, _) in s.residual.terms() {
                let upper: i32 = m.factors().iter().filter(|(v, _)| v.grid_offset().is_some_and(|o| o.0 == 1)).map(|(_, e)| e).sum();
                assert!(upper <= 1, "{n}");
            }
        }
    }
}
