//! Taylor-expands each scheme and reports its order of accuracy.

use fdcons::scheme_library::{get_scheme, SchemeName};
use fdcons::stencil_algebra::consistency_report;

fn main() {
    for name in SchemeName::ALL {
        let s = get_scheme(name);
        let r = consistency_report(&s.residual, &s.target).unwrap();
        println!(
            "{name:<16} consistent {} order (tau {:?}, h {:?}) leading remainder {}",
            r.consistent, r.order_t, r.order_x, r.leading_residual
        );
    }
}
