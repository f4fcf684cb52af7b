//! Applies point symmetries to computed trajectories and measures the scheme residual of the image.

use fdcons::audit::{symmetry_residual, Transform};
use fdcons::scheme_library::SchemeName;
use fdcons::solver::{run, BcConfig, GridConfig, IcPreset, SimulationConfig};

fn main() {
    let cases = [
        (SchemeName::LinearCross, BcConfig::Dirichlet { left: 0.0, right: 0.0 }, Transform::StretchX(0.25)),
        (SchemeName::NonlinearNine3, BcConfig::Periodic, Transform::Scale(2.0)),
        (SchemeName::NonlinearCross1, BcConfig::Periodic, Transform::Galilei(0.37)),
        (SchemeName::NonlinearDiv2, BcConfig::Periodic, Transform::Gauge(1.0)),
    ];
    for (scheme, bc, t) in cases {
        let traj = run(&SimulationConfig {
            scheme,
            grid: GridConfig { m: 63, h: None, tau: None, x0: 0.0, bc },
            ic: IcPreset::Gaussian { center: 0.5, width: 0.1, amplitude: 0.05 },
            steps: 200,
            record_stride: 1,
        })
        .unwrap();
        let r = symmetry_residual(&traj, t).unwrap();
        println!("{scheme:<16} {t:<14} residual {:.2e} (untransformed {:.2e})", r.max_rel, r.baseline_rel);
    }
}
