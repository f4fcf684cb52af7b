//! Checks every stored conservation law of every scheme exactly.

use fdcons::scheme_library::{get_scheme, verify_conservation_identity, SchemeName};

fn main() {
    for name in SchemeName::ALL {
        let report = verify_conservation_identity(&get_scheme(name));
        println!("{name}: {}/{} laws hold", report.passed_count(), report.triples.len());
        for t in &report.triples {
            println!("  {:<9} {:<20} {}", t.label, t.continuum_label, if t.passed() { "ok" } else { "FAILED" });
        }
    }
}
