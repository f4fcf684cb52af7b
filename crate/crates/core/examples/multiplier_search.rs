//! Solves for the multipliers of the linear cross scheme in a few ansatz spaces.

use fdcons::scheme_library::{get_scheme, SchemeName};
use fdcons::stencil_algebra::{find_multipliers, AnsatzSpec};

fn main() {
    let f = get_scheme(SchemeName::LinearCross).residual;
    for name in ["cross5_linear", "affine_tx", "cross5_affine_differences"] {
        let ansatz = AnsatzSpec::by_name(name).unwrap();
        let ms = find_multipliers(&f, &ansatz).unwrap();
        println!("{name}: {} of {} ansatz functions survive", ms.len(), ansatz.len());
        for m in ms {
            println!("  {m}");
        }
    }
}
