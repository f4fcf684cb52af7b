//! Audits conserved quantities of two schemes, including a law the second scheme lacks.

use fdcons::audit::{audit, AuditOptions};
use fdcons::scheme_library::{get_scheme, SchemeName};
use fdcons::solver::{run, BcConfig, GridConfig, IcPreset, SimulationConfig};

fn main() {
    let energy = get_scheme(SchemeName::NonlinearNine3).triple("Lambda3").unwrap().clone();
    for scheme in [SchemeName::NonlinearNine3, SchemeName::NonlinearDiv2] {
        let traj = run(&SimulationConfig {
            scheme,
            grid: GridConfig { m: 128, h: None, tau: None, x0: 0.0, bc: BcConfig::Periodic },
            ic: IcPreset::RandomSmooth { seed: 7, amplitude: 0.1, modes: 4 },
            steps: 1000,
            record_stride: 1,
        })
        .unwrap();
        let foreign = if scheme == SchemeName::NonlinearDiv2 { vec![energy.clone()] } else { vec![] };
        let report = audit(&traj, &AuditOptions { foreign, ..AuditOptions::default() }).unwrap();
        println!("{scheme}: checks {}", if report.passed() { "pass" } else { "fail" });
        for d in report.drift.iter().chain(&report.foreign_drift) {
            println!("  {:<9} Q0 {:+.6e} max relative drift {:.2e}", d.label, d.q0, d.max_rel_drift);
        }
    }
}
