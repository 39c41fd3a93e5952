use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn syzkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syzkit"))
        .args(args)
        .env_remove("SYZKIT_MAX_K")
        .env_remove("SYZKIT_MAX_D")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn nil_k3_passes_and_writes_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = syzkit(&["nil", "--K", "3", "--out", s(dir.path()), "--report", s(&report)]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("flux.correspondence"));
    let r = read(&report);
    assert_eq!(r["data"]["flux_constant"], "256");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    for side in ["iib_K3.json", "iia_K3.json"] {
        assert_eq!(read(&dir.path().join(side))["schema"], "syzkit-fixture-v1");
    }
}

#[test]
fn nil_k2_has_zero_fluxes() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = syzkit(&["nil", "--K", "2", "--out", s(dir.path()), "--report", s(&report)]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let r = read(&report);
    assert_eq!(r["data"]["rho_a"], "0");
    assert_eq!(r["data"]["rho_b"], "0");
}

#[test]
fn nil_k1_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = syzkit(&["nil", "--K", "1", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("at least 2"));
}

#[test]
fn k_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_syzkit"))
        .args(["nil", "--K", "3", "--out", s(dir.path())])
        .env("SYZKIT_MAX_K", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("SYZKIT_MAX_K"));
}

const ONE: &str = r#"{"frame":["dz_1","dz_2","dz_3","dz̄_1","dz̄_2","dz̄_3"],
  "terms":[{"gens":[],"coeff":{"vars":[],"terms":[{"exp":[],"re":[1,1],"im":[0,1]}]}}]}"#;

#[test]
fn fm_constant_then_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("one.json");
    fs::write(&input, ONE).unwrap();
    let fwd = dir.path().join("fwd.json");
    let o = syzkit(&["fm", "--input", s(&input), "--direction", "fwd", "--n", "3", "--output", s(&fwd)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("[PASS] fm.leg_count"));
    let v = read(&fwd);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["gens"], serde_json::json!(["dθ_1", "dθ_2", "dθ_3"]));
    assert_eq!(terms[0]["coeff"]["terms"][0]["re"], serde_json::json!([-1, 1]));

    // Output on stdout when no --output is given; the summary moves to stderr.
    let o = syzkit(&["fm", "--input", s(&fwd), "--direction", "back", "--n", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(back["terms"][0]["gens"], serde_json::json!([]));
    assert_eq!(back["terms"][0]["coeff"]["terms"][0]["re"], serde_json::json!([-1, 1]));
    assert!(stderr(&o).contains("[PASS] fm.round_trip"));
}

#[test]
fn fm_rejects_fiber_dependence() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bad.json");
    let bad = r#"{"frame":["dθ_1","dr_1"],
      "terms":[{"gens":["dr_1"],"coeff":{"vars":["θ_1"],"terms":[{"exp":[1],"re":[1,1],"im":[0,1]}]}}]}"#;
    fs::write(&input, bad).unwrap();
    let o = syzkit(&["fm", "--input", s(&input), "--direction", "back", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fiber coordinate"), "{}", stderr(&o));
}

#[test]
fn verify_accepts_generated_fixtures_and_rejects_a_broken_one() {
    let dir = tempfile::tempdir().unwrap();
    assert!(syzkit(&["nil", "--K", "3", "--out", s(dir.path())]).status.success());
    let iib = dir.path().join("iib_K3.json");
    let iia = dir.path().join("iia_K3.json");
    assert!(syzkit(&["verify", "--system", "iib", "--input", s(&iib)]).status.success());
    assert!(syzkit(&["verify", "--system", "iia", "--input", s(&iia)]).status.success());

    // Multiply one Ω factor's coefficient by r_{1,2}: dΩ no longer vanishes.
    let mut v = read(&iib);
    let coeff = &mut v["Omega_factors"][0]["terms"][0]["coeff"];
    let vars = coeff["vars"].as_array().unwrap().clone();
    let mut new_vars = vars.clone();
    new_vars.push(Value::from("r_{1,2}"));
    coeff["vars"] = Value::Array(new_vars);
    for t in coeff["terms"].as_array_mut().unwrap() {
        t["exp"].as_array_mut().unwrap().push(Value::from(1));
    }
    let broken = dir.path().join("broken.json");
    fs::write(&broken, serde_json::to_string(&v).unwrap()).unwrap();
    let o = syzkit(&["verify", "--system", "iib", "--input", s(&broken)]);
    assert_eq!(o.status.code(), Some(1), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("witness"));
    assert!(stderr(&o).contains("first failing check: iib.holomorphic"), "{}", stderr(&o));
}

#[test]
fn flat_cohomology_is_binomial() {
    for which in ["bc", "ty"] {
        let o = syzkit(&["cohomology", "--flat", "3", "--which", which]);
        assert!(o.status.success(), "{}", stdout(&o));
        assert_eq!(stdout(&o).matches(".binomial").count(), 16);
        assert!(stdout(&o).contains("dim H^(1,2) = 9"));
    }
}

#[test]
fn iwasawa_mirror_dimensions_agree() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = syzkit(&["cohomology", "--K", "3", "--which", "mirror", "--p", "1", "--q", "1", "--degree", "2", "--report", s(&report)]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(read(&report)["checks"][0]["id"], "(1,1).mirror.dimensions");
}

#[test]
fn escaping_the_truncation_asks_for_a_larger_degree() {
    let o = syzkit(&["cohomology", "--K", "3", "--which", "bc", "--p", "1", "--q", "1", "--model", "frame", "--degree", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("try --degree 2"), "{}", stderr(&o));
}

#[test]
fn side_must_match_which() {
    let o = syzkit(&["cohomology", "--flat", "2", "--which", "bc", "--side", "x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn proptest_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.path().join(name);
        let o = syzkit(&["proptest", "--suite", "intertwining", "--trials", "30", "--seed", "11", "--report", s(&path)]);
        assert!(o.status.success(), "{}", stdout(&o));
        reports.push(fs::read(&path).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
