use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use shadowdrift::schemes::catalog;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shadowdrift"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

const DRIFT: &str = r#"{
  "experiment": "drift",
  "model": {"grid": {"dimension": 2, "points": 8, "half_width": 4.0, "potential": {"name": "quartic"}}},
  "scheme": {"name": "strang"},
  "dt": 0.02,
  "steps": 200,
  "sample_every": 5,
  "initial_state": {"kind": "gaussian", "center": [0.5, 0.5], "width": 0.6}
}"#;

const RANDOM_DRIFT: &str = r#"{
  "experiment": "drift",
  "model": {"toy": {"name": "random_hermitian", "seed": 2, "dim": 6}},
  "scheme": {"name": "triple-jump", "order": 4},
  "dt": 0.05,
  "steps": 100,
  "initial_state": {"kind": "random"},
  "seed": 9
}"#;

#[test]
fn list_schemes_catalog() {
    let out = bin().arg("list-schemes").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("trotter (order 1)"));
    assert!(text.contains("strang (order 2)"));
    assert!(text.contains("euler-path-integral (order 1, NON-UNITARY)"));
    assert_eq!(text.lines().count(), catalog().len());
}

#[test]
fn version_prints() {
    let out = bin().arg("version").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), format!("shadowdrift {}", shadowdrift::VERSION));
}

#[test]
fn drift_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "drift.json", DRIFT);
    let out = run(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("drift.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "time,energy,norm,fidelity");
    assert_eq!(csv.lines().count(), 1 + 41);
    let sidecar: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("drift.json")).unwrap()).unwrap();
    assert_eq!(sidecar["library_version"], shadowdrift::VERSION);
    assert_eq!(sidecar["rng"], shadowdrift::RNG_NAME);
    assert!(sidecar["summary"]["max_energy_deviation"].as_f64().unwrap() > 0.0);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("a.json", DRIFT), ("b.json", RANDOM_DRIFT)] {
        let cfg = write_config(dir.path(), name, body);
        let first = dir.path().join(format!("{name}-1"));
        let second = dir.path().join(format!("{name}-2"));
        assert!(run(&cfg, &first, &[]).status.success());
        assert!(run(&cfg, &second, &[]).status.success());
        let a = fs::read(first.join("drift.csv")).unwrap();
        let b = fs::read(second.join("drift.csv")).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn seed_override_changes_random_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.json", RANDOM_DRIFT);
    assert!(run(&cfg, &dir.path().join("s9"), &[]).status.success());
    assert!(run(&cfg, &dir.path().join("s10"), &["--seed", "10"]).status.success());
    let a = fs::read(dir.path().join("s9/drift.csv")).unwrap();
    let b = fs::read(dir.path().join("s10/drift.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn sidecar_round_trip_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "r.json", RANDOM_DRIFT);
    let first = dir.path().join("first");
    assert!(run(&cfg, &first, &["--seed", "4"]).status.success());
    let second = dir.path().join("second");
    let out = run(&first.join("drift.json"), &second, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(first.join("drift.csv")).unwrap(),
        fs::read(second.join("drift.csv")).unwrap()
    );
}

#[test]
fn negative_dt_exits_2_naming_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", &DRIFT.replace("\"dt\": 0.02", "\"dt\": -0.02"));
    let out = run(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("`dt`"));
}

#[test]
fn unknown_key_and_missing_field_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "u.json", &DRIFT.replace("\"steps\"", "\"stepz\""));
    let out = run(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("stepz"));
    let cfg = write_config(dir.path(), "m.json", r#"{"experiment": "drift"}"#);
    let out = run(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("`model`"));
}

#[test]
fn numerical_failure_exits_3() {
    // dt * rho(H) beyond the principal branch of the logarithm
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "s.json",
        r#"{"experiment": "shadow", "model": {"toy": {"name": "pauli_xz"}}, "scheme": {"name": "strang"}, "dt": 5.0}"#,
    );
    let out = run(&cfg, dir.path(), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn every_experiment_kind_runs() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        r#"{"experiment": "order", "model": {"toy": {"name": "pauli_xz"}}, "scheme": {"name": "strang"},
            "dts": [0.1, 0.05, 0.025, 0.0125], "initial_state": {"kind": "basis", "index": 0}}"#,
        r#"{"experiment": "shadow", "model": {"toy": {"name": "pauli_xz"}}, "scheme": {"name": "trotter"}, "dt": 0.1}"#,
        r#"{"experiment": "commutant", "model": {"toy": {"name": "pauli_xz"}}, "phi": {"kind": "power", "exponent": 2}}"#,
        r#"{"experiment": "classical", "classical_ic": {"q": [1, 1], "p": [0, 0]}, "dt": 0.001, "steps": 100}"#,
        r#"{"experiment": "bch-check", "seed": 1}"#,
        r#"{"experiment": "bound", "hs_norm": 16, "order": 3}"#,
    ];
    for (i, body) in configs.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("{i}.json"), body);
        let out = run(&cfg, &dir.path().join(i.to_string()), &[]);
        assert!(out.status.success(), "{body}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let bound = fs::read_to_string(dir.path().join("5/bound.csv")).unwrap();
    assert_eq!(bound.lines().nth(1).unwrap(), "1.6000000000000000e1,3,5.0000000000000000e-1");
    let commutant = fs::read_to_string(dir.path().join("2/commutant.csv")).unwrap();
    assert!(commutant.lines().nth(1).unwrap().starts_with("true,true,"));
}
