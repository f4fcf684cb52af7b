//! Scheme residuals pinned as s-expressions in `tests/golden/`.
//! Regenerate with `FDCONS_BLESS=1 cargo test --test golden`.

use std::path::PathBuf;

use fdcons::scheme_library::{get_scheme, SchemeName};
use fdcons::stencil_algebra::sexp::{from_sexp, to_sexp};

fn path(name: SchemeName) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.sexp"))
}

#[test]
fn residuals_match_golden_files() {
    let bless = std::env::var_os("FDCONS_BLESS").is_some();
    for name in SchemeName::ALL {
        let s = get_scheme(name);
        let p = path(name);
        if bless {
            std::fs::write(&p, to_sexp(&s.residual) + "\n").unwrap();
            continue;
        }
        let text = std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        assert_eq!(from_sexp(text.trim()).unwrap(), s.residual, "{name}");
    }
}
