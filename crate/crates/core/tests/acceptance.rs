//! Acceptance criteria. Runs as a plain binary and prints one line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fdcons::audit::{
    audit, convergence_study, symmetry_residual, AuditOptions, ConvergenceSpec, Transform,
};
use fdcons::scheme_library::{get_scheme, verify_conservation_identity, SchemeName};
use fdcons::solver::{run, BcConfig, GridConfig, IcPreset, SimulationConfig, Trajectory};
use fdcons::stencil_algebra::jet::{consistency_report, nonlinear_wave_target, JetPoly};
use fdcons::stencil_algebra::notation::{dtm, dxm};
use fdcons::stencil_algebra::{
    find_density_flux, find_multipliers, is_divergence, same_span, span_admits_limit, AnsatzSpec, DegreeBounds,
    DiffPoly,
};
use proptest::test_runner::{Config, TestCaseError, TestRunner};

const DRIFT_TOL: f64 = 1e-10;
const SEPARATION_MIN: f64 = 1e-8;
const LINEAR_ORDER_TOL: f64 = 0.1;
const NONLINEAR_ORDER_TOL: f64 = 0.2;
const SYMMETRY_TOL: f64 = 1e-10;
const KERNEL_REL_TOL: f64 = 1e-14;
const TRIALS: u32 = 200;
const SEED: u64 = 7;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn u(k: i32, l: i32) -> DiffPoly {
    DiffPoly::grid(k, l)
}

fn periodic(scheme: SchemeName, m: usize, steps: usize, ic: IcPreset) -> Trajectory {
    let h = 1.0 / m as f64;
    let grid = GridConfig { m, h: Some(h), tau: Some(h / 2.0), x0: 0.0, bc: BcConfig::Periodic };
    run(&SimulationConfig { scheme, grid, ic, steps, record_stride: 1 }).unwrap()
}

fn random_ic() -> IcPreset {
    IcPreset::RandomSmooth { seed: SEED, amplitude: 0.1, modes: 4 }
}

fn criterion_1() -> Outcome {
    let lc = verify_conservation_identity(&get_scheme(SchemeName::LinearCross));
    let n3 = verify_conservation_identity(&get_scheme(SchemeName::NonlinearNine3));
    let ok = lc.triples.len() == 6 && lc.all_passed() && n3.triples.len() == 3 && n3.all_passed();
    outcome(ok, format!("LinearCross {}/6, NonlinearNine3 {}/3", lc.passed_count(), n3.passed_count()))
}

fn criterion_2() -> Outcome {
    let f = get_scheme(SchemeName::LinearCross);
    let lin = find_multipliers(&f.residual, &AnsatzSpec::cross5_linear()).unwrap();
    // z1 = 0, z3 = -z2, z5 = -z4 in the order U, U_+, U_-, Ucheck, Uhat.
    let expected = [&u(0, 1) - &u(0, -1), &u(-1, 0) - &u(1, 0)];
    let lin_ok = lin.len() == 2 && same_span(&lin, &expected);

    let mut basis: Vec<DiffPoly> = AnsatzSpec::cross5_linear().basis().to_vec();
    basis.extend(AnsatzSpec::affine_tx().basis().iter().cloned());
    let both = find_multipliers(&f.residual, &AnsatzSpec::from_basis(basis).unwrap()).unwrap();
    let stored: Vec<DiffPoly> =
        ["Lambda1", "Lambda4", "Lambda5"].iter().map(|l| f.triple(l).unwrap().multiplier.clone()).collect();
    let mut all = expected.to_vec();
    all.extend(stored.iter().cloned());
    let affine_ok = both.len() == 5 && same_span(&both, &all);
    let certified = both.iter().all(|m| is_divergence(&(m * &f.residual)).unwrap());
    outcome(
        lin_ok && affine_ok && certified,
        format!("five-point space dim {}, with {{1, t, x}} dim {}", lin.len(), both.len()),
    )
}

fn criterion_3() -> Outcome {
    let f = get_scheme(SchemeName::LinearCross);
    let space = find_multipliers(&f.residual, &AnsatzSpec::cross5_affine_differences()).unwrap();
    let stretch = JetPoly::jet(0, 1).scale_poly(&DiffPoly::x()).add(&JetPoly::jet(1, 0).scale_poly(&DiffPoly::t()));
    let boost = JetPoly::jet(0, 1).scale_poly(&DiffPoly::t()).add(&JetPoly::jet(1, 0).scale_poly(&DiffPoly::x()));
    let a_absent = span_admits_limit(&space, &stretch, 3).is_none();
    let a_control = span_admits_limit(&space, &boost, 3).is_some();

    let g = get_scheme(SchemeName::NonlinearNine3);
    let nine = find_multipliers(&g.residual, &AnsatzSpec::nine_linear()).unwrap();
    let b_absent = span_admits_limit(&nine, &JetPoly::jet(0, 1), 3).is_none();
    outcome(
        a_absent && a_control && b_absent,
        format!(
            "(a) x u_x + t u_t absent: {a_absent} (t u_x + x u_t found: {a_control}); (b) u_x absent among {} nine-point multipliers: {b_absent}",
            nine.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in SchemeName::ALL {
        let s = get_scheme(name);
        let r = consistency_report(&s.residual, &s.target).unwrap();
        let (ot, ox) = (r.order_t.unwrap_or(i32::MAX), r.order_x.unwrap_or(i32::MAX));
        let this = r.consistent
            && match name {
                SchemeName::LinearCross | SchemeName::NonlinearNine3 => (ot, ox) == (2, 2),
                _ => ot >= 2 && ox >= 2 && s.target == nonlinear_wave_target(),
            };
        ok &= this;
        parts.push(format!("{name} ({ot}, {ox})"));
    }
    outcome(ok, parts.join(", "))
}

/// Leapfrog momentum and energy computed directly from the layers.
fn linear_oracle(traj: &Trajectory) -> (f64, f64) {
    let (m, h, tau) = (traj.grid.m, traj.grid.h, traj.grid.tau);
    let invariants = |n: usize| {
        let (a, b) = (&traj.layers[n - 1], &traj.layers[n]);
        let mut p = 0.0;
        let mut e = 0.0;
        for j in 0..m {
            let jp = (j + 1) % m;
            let v = (b[j] - a[j]) / tau;
            p += h * v;
            e += h * 0.5 * (v * v + (b[jp] - b[j]) * (a[jp] - a[j]) / (h * h));
        }
        (p, e)
    };
    let (p0, e0) = invariants(1);
    let (mut dp, mut de) = (0.0f64, 0.0f64);
    for n in 2..traj.layers.len() {
        let (p, e) = invariants(n);
        dp = dp.max((p - p0).abs());
        de = de.max((e - e0).abs() / e0.abs());
    }
    (dp, de)
}

fn criterion_5() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, count) in [(SchemeName::LinearCross, 6), (SchemeName::NonlinearNine3, 3)] {
        let traj = periodic(name, 128, 1000, random_ic());
        let r = audit(&traj, &AuditOptions::default()).unwrap();
        let worst = r.drift.iter().map(|d| d.max_rel_drift).fold(0.0, f64::max);
        ok &= r.drift.len() == count && worst <= DRIFT_TOL;
        parts.push(format!("{name} {} laws max {worst:.1e}", r.drift.len()));
        if name == SchemeName::LinearCross {
            let (dp, de) = linear_oracle(&traj);
            ok &= dp <= DRIFT_TOL && de <= DRIFT_TOL;
            parts.push(format!("direct oracle {dp:.1e}/{de:.1e}"));
        }
    }
    let traj = periodic(SchemeName::NonlinearDiv2, 128, 1000, random_ic());
    let opts = AuditOptions {
        foreign: vec![get_scheme(SchemeName::NonlinearNine3).triple("Lambda3").unwrap().clone()],
        ..AuditOptions::default()
    };
    let r = audit(&traj, &opts).unwrap();
    let own = ["Lambda1", "Lambda4"].map(|l| r.drift.iter().find(|d| d.label == l).map(|d| d.max_rel_drift));
    let energy = r.foreign_drift.first().map(|d| d.max_rel_drift).unwrap_or(0.0);
    ok &= own.iter().all(|d| d.is_some_and(|d| d <= DRIFT_TOL)) && energy > SEPARATION_MIN;
    parts.push(format!(
        "NonlinearDiv2 Lambda1 {:.1e}, Lambda4 {:.1e}, energy-analog {energy:.1e}",
        own[0].unwrap_or(f64::NAN),
        own[1].unwrap_or(f64::NAN)
    ));
    outcome(ok, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let lin = convergence_study(&ConvergenceSpec::linear_default()).unwrap();
    let non = convergence_study(&ConvergenceSpec::nonlinear_default(SchemeName::NonlinearNine3)).unwrap();
    let ok = lin.rows.len() == 4
        && lin.orders_within(2.0, LINEAR_ORDER_TOL)
        && non.rows.len() == 4
        && non.orders_within(2.0, NONLINEAR_ORDER_TOL);
    let fmt = |o: Vec<f64>| o.iter().map(|p| format!("{p:.3}")).collect::<Vec<_>>().join(" ");
    outcome(ok, format!("LinearCross orders {}; NonlinearNine3 orders {}", fmt(lin.orders()), fmt(non.orders())))
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    let mut record = |traj: &Trajectory, t: Transform| {
        let r = symmetry_residual(traj, t).unwrap();
        worst = worst.max(r.max_rel);
        checked += 1;
    };
    for name in SchemeName::ALL {
        let traj = periodic(name, 64, 200, random_ic());
        record(&traj, Transform::Gauge(1.0));
        record(&traj, Transform::Galilei(0.37));
        if name == SchemeName::NonlinearNine3 {
            record(&traj, Transform::Scale(2.0));
        }
    }
    let grid = GridConfig { m: 99, h: None, tau: None, x0: 0.0, bc: BcConfig::Dirichlet { left: 0.0, right: 0.0 } };
    let ic = IcPreset::Gaussian { center: 0.5, width: 0.1, amplitude: 1.0 };
    let traj = run(&SimulationConfig { scheme: SchemeName::LinearCross, grid, ic, steps: 200, record_stride: 1 }).unwrap();
    record(&traj, Transform::StretchX(0.25));
    outcome(worst <= SYMMETRY_TOL, format!("{checked} residuals, max {worst:.1e}"))
}

fn trials(run: impl Fn(&mut TestRunner) -> Result<(), String>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: TRIALS, failure_persistence: None, ..Config::default() });
    run(&mut runner)
}

fn criterion_8() -> Outcome {
    let euler = trials(|r| {
        r.run(&(common::poly(4, true, true), common::poly(4, true, true)), |(a, b)| {
            let div = &dtm(&a) + &dxm(&b);
            if is_divergence(&div).map_err(|e| TestCaseError::fail(e.to_string()))? {
                Ok(())
            } else {
                Err(TestCaseError::fail(format!("E annihilates nothing for {div}")))
            }
        })
        .map_err(|e| e.to_string())
    });
    let round_trip = trials(|r| {
        r.run(&(common::grid_poly(3), common::grid_poly(3)), |(a, b)| {
            let p = &dtm(&a) + &dxm(&b);
            let mut bounds = DegreeBounds::default();
            for _ in 0..3 {
                if let Ok((theta, phi)) = find_density_flux(&p, bounds) {
                    return if &dtm(&theta) + &dxm(&phi) == p {
                        Ok(())
                    } else {
                        Err(TestCaseError::fail("reconstruction does not reproduce the divergence"))
                    };
                }
                bounds = bounds.widen();
            }
            Err(TestCaseError::fail(format!("no density/flux for {p}")))
        })
        .map_err(|e| e.to_string())
    });
    let kernel = trials(|r| {
        r.run(&(common::poly(6, true, true), common::point()), |(p, pt)| {
            let (k, naive, abs) = common::kernel_and_naive(&p, &pt);
            if (k - naive).abs() <= KERNEL_REL_TOL * abs.max(f64::MIN_POSITIVE) {
                Ok(())
            } else {
                Err(TestCaseError::fail(format!("{k} vs {naive}, scale {abs}")))
            }
        })
        .map_err(|e| e.to_string())
    });
    let results = [("euler", euler), ("density/flux", round_trip), ("kernel", kernel)];
    let failed: Vec<String> =
        results.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| format!("{n}: {e}"))).collect();
    if failed.is_empty() {
        outcome(true, format!("{TRIALS} trials each of euler, density/flux, kernel"))
    } else {
        outcome(false, failed.join("; "))
    }
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("symbolic conservation identities", Duration::from_secs(5), criterion_1),
        ("multiplier reproduction", Duration::from_secs(2), criterion_2),
        ("nonexistence checks", Duration::from_secs(30), criterion_3),
        ("consistency orders", Duration::from_secs(10), criterion_4),
        ("numerical conservation", Duration::from_secs(60), criterion_5),
        ("convergence", Duration::from_secs(120), criterion_6),
        ("symmetry residuals", Duration::from_secs(30), criterion_7),
        ("algebra oracle equivalence", Duration::from_secs(60), criterion_8),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let passed = o.passed && in_time;
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name}: {} [{:.2}s of {}s]",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {}/8 criteria passed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
