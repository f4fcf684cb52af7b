//! Observed convergence orders under grid refinement.

use fdcons::audit::{convergence_study, ConvergenceSpec};
use fdcons::scheme_library::SchemeName;

fn main() {
    for spec in [ConvergenceSpec::linear_default(), ConvergenceSpec::nonlinear_default(SchemeName::NonlinearNine3)] {
        let table = convergence_study(&spec).unwrap();
        println!("{} against {}", table.scheme, table.reference);
        for r in &table.rows {
            let order = r.order.map(|p| format!("{p:.3}")).unwrap_or_default();
            println!("  M {:>4} error {:.3e} {order}", r.m, r.error);
        }
    }
}
