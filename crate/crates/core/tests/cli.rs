use std::path::Path;
use std::process::{Command, Output};

fn fdcons(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fdcons")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn verify_linear_cross() {
    let o = fdcons(&["verify", "--scheme", "LinearCross"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    assert!(s.contains("6/6"), "{s}");
    assert!(s.contains("mesh orthogonality"), "{s}");
}

#[test]
fn verify_all_schemes_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let o = fdcons(&["verify", "--json", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert!(rows.len() >= 8);
    assert!(rows.iter().all(|r| r["passed"] == true));
}

#[test]
fn multipliers_of_linear_cross() {
    let o = fdcons(&["multipliers", "--scheme", "LinearCross", "--ansatz", "cross5_linear"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    assert!(s.contains("U[0,-1]") && s.contains("U[1,0]"), "{s}");
}

#[test]
fn zero_initial_data_stays_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.csv");
    let o = fdcons(&[
        "simulate", "--scheme", "NonlinearCross1", "--m", "16", "--ic", "zero", "--steps", "5", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    lines.next().unwrap();
    let mut rows = 0;
    for line in lines {
        rows += 1;
        let u = line.rsplit(',').next().unwrap();
        assert_eq!(u.parse::<f64>().unwrap(), 0.0, "{line}");
    }
    assert!(rows > 0);
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "scheme = \"LinearCross\"\nspeed = 3\n");
    let o = fdcons(&["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_for_another_command_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "command = \"audit\"\n");
    let o = fdcons(&["simulate", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identical_configs_give_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(format!("{name}.csv"));
        let cfg = write(
            dir.path(),
            &format!("{name}.toml"),
            &format!(
                "command = \"simulate\"\nscheme = \"NonlinearNine3\"\nsteps = 40\n[grid]\nm = 32\n[ic]\npreset = \"random_smooth\"\nseed = 11\n[output]\ncsv = {:?}\n",
                out.to_str().unwrap()
            ),
        );
        let o = fdcons(&["simulate", "--config", &cfg]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn audit_passes_and_flags_foreign_law() {
    let o = fdcons(&["audit", "--scheme", "LinearCross", "--m", "64", "--steps", "200", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = fdcons(&[
        "audit", "--scheme", "NonlinearDiv2", "--m", "64", "--steps", "200", "--seed", "3", "--foreign", "NonlinearNine3:Lambda3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn order_table() {
    let o = fdcons(&["order"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("LinearCross"));
}

#[test]
fn convergence_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let o = fdcons(&[
        "convergence", "--scheme", "LinearCross", "--levels", "16,32,64", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("m,h,tau,steps,error,order"));
    assert_eq!(text.lines().count(), 4);
}
