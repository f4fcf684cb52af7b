//! Recovers a density and flux from a multiplier and checks the divergence.

use fdcons::scheme_library::{get_scheme, SchemeName};
use fdcons::stencil_algebra::notation::{dtm, dxm};
use fdcons::stencil_algebra::{find_density_flux, DegreeBounds};

fn main() {
    let s = get_scheme(SchemeName::NonlinearNine3);
    for t in &s.triples {
        let p = &t.multiplier * &s.residual;
        let (theta, phi) = find_density_flux(&p, DegreeBounds::default()).unwrap();
        assert_eq!(&dtm(&theta) + &dxm(&phi), p);
        println!("{} ({})", t.label, t.continuum_label);
        println!("  density {theta}");
        println!("  flux    {phi}");
    }
}
