use serde::Serialize;

use crate::stencil_algebra::jet::taylor_leading;
use crate::stencil_algebra::notation::{dtm, dxm};
use crate::stencil_algebra::{euler_op, find_density_flux, DegreeBounds, DiffPoly};

use super::{ConservationTriple, Scheme, SchemeName};

/// Which density/flux pair certified a triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityForm {
    /// The stored pair satisfies the identity as written.
    Stored,
    /// The stored pair failed; a reconstructed pair satisfies it.
    Reconstructed,
    /// The multiplier passes the Euler test but no pair was found in bounds.
    MultiplierOnly,
    /// `E(Lambda F) != 0`: not a multiplier at all.
    NotMultiplier,
}

#[derive(Clone, Debug)]
pub struct TripleCheck {
    pub label: String,
    pub continuum_label: String,
    /// `D-tau Theta + D-h Phi - Lambda F` for the stored pair.
    pub stored_residual: DiffPoly,
    pub multiplier_ok: bool,
    pub form: IdentityForm,
    pub reconstructed: Option<(DiffPoly, DiffPoly)>,
    /// The multiplier's leading Taylor term equals the recorded continuum multiplier.
    pub limit_ok: bool,
}

impl TripleCheck {
    pub fn identity_ok(&self) -> bool {
        self.stored_residual.is_zero()
    }

    /// Stored or reconstructed pair certified, multiplier verified.
    pub fn passed(&self) -> bool {
        self.multiplier_ok && matches!(self.form, IdentityForm::Stored | IdentityForm::Reconstructed)
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub scheme: SchemeName,
    pub triples: Vec<TripleCheck>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.triples.iter().all(|t| t.passed() && t.limit_ok)
    }

    pub fn passed_count(&self) -> usize {
        self.triples.iter().filter(|t| t.passed() && t.limit_ok).count()
    }
}

/// `D-tau Theta + D-h Phi - Lambda F`.
pub fn identity_residual(f: &DiffPoly, triple: &ConservationTriple) -> DiffPoly {
    let div = &dtm(&triple.density) + &dxm(&triple.flux);
    &div - &(&triple.multiplier * f)
}

fn check_triple(f: &DiffPoly, triple: &ConservationTriple) -> TripleCheck {
    let stored_residual = identity_residual(f, triple);
    let product = &triple.multiplier * f;
    let multiplier_ok = euler_op(&product).map(|e| e.is_zero()).unwrap_or(false);

    let (form, reconstructed) = if stored_residual.is_zero() {
        (IdentityForm::Stored, None)
    } else if !multiplier_ok {
        (IdentityForm::NotMultiplier, None)
    } else {
        let mut bounds = DegreeBounds::default();
        let mut found = None;
        for _ in 0..3 {
            if let Ok(pair) = find_density_flux(&product, bounds) {
                found = Some(pair);
                break;
            }
            bounds = bounds.widen();
        }
        match found {
            Some(pair) => (IdentityForm::Reconstructed, Some(pair)),
            None => (IdentityForm::MultiplierOnly, None),
        }
    };

    let limit_ok = match taylor_leading(&triple.multiplier, 2) {
        Some((0, lead)) => lead.sub(&triple.continuum_multiplier).is_zero(),
        _ => false,
    };

    TripleCheck {
        label: triple.label.clone(),
        continuum_label: triple.continuum_label.clone(),
        stored_residual,
        multiplier_ok,
        form,
        reconstructed,
        limit_ok,
    }
}

/// Checks `D-tau Theta + D-h Phi == Lambda F` for every triple of `s`,
/// reconstructing a pair from the multiplier when the stored one fails.
pub fn verify_conservation_identity(s: &Scheme) -> VerificationReport {
    VerificationReport {
        scheme: s.name,
        triples: s.triples.iter().map(|t| check_triple(&s.residual, t)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme_library::get_scheme;
    use crate::stencil_algebra::notation::{u, ut, ux};
    use crate::stencil_algebra::{int, JetPoly};

    #[test]
    fn linear_cross_all_certified() {
        let r = verify_conservation_identity(&get_scheme(SchemeName::LinearCross));
        assert_eq!(r.triples.len(), 6);
        for t in &r.triples {
            assert!(t.passed() && t.limit_ok, "{} {:?}", t.label, t.form);
        }
    }

    #[test]
    fn stored_forms_hold_for_nonlinear_schemes() {
        for n in [SchemeName::NonlinearDiv2, SchemeName::NonlinearNine3, SchemeName::NonlinearCross1] {
            let r = verify_conservation_identity(&get_scheme(n));
            for t in &r.triples {
                assert!(t.identity_ok(), "{n} {}: {}", t.label, t.stored_residual);
            }
        }
    }

    #[test]
    fn wrong_flux_is_reconstructed() {
        let mut s = get_scheme(SchemeName::LinearCross);
        s.triples[0].flux = ux();
        let r = verify_conservation_identity(&s);
        assert_eq!(r.triples[0].form, IdentityForm::Reconstructed);
        let (th, ph) = r.triples[0].reconstructed.clone().unwrap();
        let fixed = ConservationTriple { density: th, flux: ph, ..s.triples[0].clone() };
        assert!(identity_residual(&s.residual, &fixed).is_zero());
    }

    #[test]
    fn non_multiplier_is_reported() {
        let mut s = get_scheme(SchemeName::LinearCross);
        s.triples[0].multiplier = u(0, 0);
        s.triples[0].continuum_multiplier = JetPoly::u();
        let r = verify_conservation_identity(&s);
        assert_eq!(r.triples[0].form, IdentityForm::NotMultiplier);
        assert!(!r.all_passed());
    }

    #[test]
    fn synthetic_divergence_scheme_with_unit_multiplier() {
        let theta = &ut() * &u(0, 1);
        let phi = ux().pow(2).scale(&int(3));
        let mut s = get_scheme(SchemeName::LinearCross);
        s.residual = &dtm(&theta) + &dxm(&phi);
        s.triples.truncate(1);
        s.triples[0].density = theta;
        s.triples[0].flux = phi;
        assert!(verify_conservation_identity(&s).triples[0].identity_ok());
    }
}
