use std::path::Path;
use std::process::{Command, Output};

fn flz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flz"))
        .args(args)
        .env_remove("FLZ_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn coulomb_table_matches_golden_exactly() {
    let o = flz(&["coulomb", "--N", "1..4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), golden("coulomb.csv"));
}

#[test]
fn compare_table_matches_golden() {
    let o = flz(&["compare", "--lambda", "0.05,0.1,0.2"]);
    assert!(o.status.success());
    let got = stdout(&o);
    let want = golden("compare.csv");
    let (got, want): (Vec<_>, Vec<_>) = (got.lines().collect(), want.lines().collect());
    assert_eq!(got.len(), want.len());
    assert_eq!(got[0], want[0]);
    for (g, w) in got.iter().zip(&want).skip(1) {
        for (a, b) in g.split(',').zip(w.split(',')) {
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => assert!((x - y).abs() <= 1e-9 * y.abs().max(1e-12), "{g}\n{w}"),
                _ => assert_eq!(a, b),
            }
        }
    }
}

#[test]
fn yukawa_compare_is_an_alias() {
    let a = flz(&["compare", "--lambda", "0.1", "--states", "1s"]);
    let b = flz(&["yukawa", "compare", "--lambda", "0.1", "--states", "1s"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["spectrum", "--potential", "linear", "--N", "1..2"];
    assert_eq!(flz(&args).stdout, flz(&args).stdout);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| flz(args).status.code();
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["no-such-command"]), Some(64));
    assert_eq!(code(&[]), Some(64));
    assert_eq!(code(&["spectrum", "--potential", "coulomb", "--N", "0"]), Some(64));
    assert_eq!(code(&["coulomb", "--g", "-1"]), Some(64));
    assert_eq!(code(&["compare", "--lambda", "-0.1"]), Some(64));
    assert_eq!(code(&["hierarchy", "--profile", "quartic", "--order", "3"]), Some(2));
    assert_eq!(
        code(&["scaling-check", "--potential", "linear", "--couplings", "1,2,4"]),
        Some(0)
    );
    assert_eq!(
        code(&["scaling-check", "--potential", "coulomb", "--couplings", "1,2", "--exponent-override", "3"]),
        Some(1)
    );
}

#[test]
fn empty_range_prints_header_only() {
    let o = flz(&["spectrum", "--potential", "coulomb", "--N", "3..1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "N,L,eps_hat,E,source,note\n");
}

#[test]
fn harmonic_levels_scale_with_coupling() {
    let o = flz(&["spectrum", "--potential", "harmonic", "--N", "1", "--g", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["eps_hat"], 1.5);
    assert_eq!(v[0]["E"], 3.0);
    assert_eq!(v[0]["note"], serde_json::Value::Null);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"g": 2.0, "m": 3.0, "solver": {"n_points": 3000}}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = flz(&["--config", p, "--m", "5", "--show-config"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["g"], 2.0);
    assert_eq!(v["m"], 5.0);
    assert_eq!(v["solver"]["n_points"], 3000);

    std::fs::write(&path, r#"{"gg": 2.0}"#).unwrap();
    assert_eq!(flz(&["--config", p, "coulomb"]).status.code(), Some(64));
}

#[test]
fn output_dir_gets_artifact_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = Command::new(env!("CARGO_BIN_EXE_flz"))
        .args(["--output-dir", out.to_str().unwrap(), "coulomb", "--N", "2"])
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(out.join("coulomb.csv")).unwrap();
    assert!(body.starts_with("N,L,eps_hat"));
    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("coulomb.manifest.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "coulomb");
    assert_eq!(m["timestamp"], 1_700_000_000u64);
    assert_eq!(m["format"], "csv");
    assert_eq!(m["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["parameters"]["config"]["g"], 1.0);
}

#[test]
fn oracle_solve_cross_checks_shooting() {
    let o = flz(&[
        "oracle", "solve", "--potential", "yukawa", "--lambda", "0.2", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v[0]["relative_difference"].as_f64().unwrap() < 1e-6);
}

#[test]
fn wavefunction_oracle_tracks_analytic() {
    let o = flz(&["wavefunction", "--potential", "coulomb", "--N", "2", "--points", "9", "--oracle"]);
    assert!(o.status.success());
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((f[1] - f[2]).abs() < 1e-5, "{line}");
    }
}
