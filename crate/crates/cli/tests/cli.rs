use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_mrdlab"))
        .args(args)
        .current_dir(dir)
        .env("MRDLAB_CACHE_DIR", dir.join("cache"))
        .output()
        .expect("binary runs");
    let envelope = serde_json::from_slice(&out.stdout).expect("stdout is one JSON envelope");
    (out.status.code().expect("exit code"), envelope)
}

#[test]
fn field_reports_fiber_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(&["field", "--p", "3", "--t", "3"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(env["status"], "ok");
    assert_eq!(env["payload"]["norm_fiber_sizes"]["3"], 28);
    let (_, env) = run(&["field", "--p", "3", "--t", "4"], dir.path());
    assert_eq!(env["payload"]["norm_fiber_sizes"]["4"], 82);
    assert_eq!(env["payload"]["automorphisms"], 8);
}

#[test]
fn cached_modulus_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let (_, first) = run(&["field", "--p", "3", "--t", "3"], dir.path());
    assert!(dir.path().join("cache/modulus-p3-r1-d6.json").exists());
    let (_, second) = run(&["field", "--p", "3", "--t", "3"], dir.path());
    assert_eq!(first["field"], second["field"]);
}

#[test]
fn bad_parameters_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(&["field", "--p", "4", "--t", "3"], dir.path());
    assert_eq!(code, 2);
    assert_eq!(env["status"], "error");
    let (code, _) = run(&["check", "--p", "3", "--t", "3", "--family", "NSZ", "--s", "1", "--h-index", "999"], dir.path());
    assert_eq!(code, 2);
}

#[test]
fn check_reports_code_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(&["check", "--p", "3", "--t", "3", "--family", "NSZ", "--s", "1", "--h-index", "4"], dir.path());
    assert_eq!(code, 0);
    let payload = &env["payload"];
    assert_eq!(payload["mrd"], true);
    assert_eq!(payload["scattered"], true);
    assert_eq!(payload["min_distance"], 5);

    let (_, env) = run(&["check", "--p", "3", "--t", "3", "--family", "G", "--s", "1"], dir.path());
    assert_eq!(env["payload"]["right_idealizer"]["dimension"], 6);
    assert_eq!(env["payload"]["left_idealizer"]["dimension"], 6);
}

#[test]
fn equivalent_pair_yields_verifiable_witness() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(
        &[
            "equiv", "--p", "3", "--t", "3",
            "--a", "family=NSZ,s=1,h-index=2",
            "--b", "family=NSZ,s=-1,h-index=2",
            "--witness-out", "w.json",
        ],
        dir.path(),
    );
    assert_eq!(code, 0);
    assert_eq!(env["payload"]["verdict"], "equivalent");

    let (code, env) = run(&["verify", "--file", "w.json"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(env["payload"]["valid"], true);

    let path = dir.path().join("w.json");
    let mut file: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rho = file["witness"]["rho"].as_u64().unwrap();
    file["witness"]["rho"] = (rho + 1).into();
    std::fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let (code, env) = run(&["verify", "--file", "w.json"], dir.path());
    assert_eq!(code, 3);
    assert_eq!(env["payload"]["valid"], false);
}

#[test]
fn idealizers_separate_gabidulin_from_nsz() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(
        &["equiv", "--p", "3", "--t", "3", "--a", "family=G,s=1", "--b", "family=NSZ,s=1,h-index=0"],
        dir.path(),
    );
    assert_eq!(code, 0);
    assert_eq!(env["payload"]["verdict"], "inequivalent_by_idealizer");
}

#[test]
fn census_meets_lower_bound() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(&["census", "--p", "3", "--t", "3"], dir.path());
    assert_eq!(code, 0);
    let payload = &env["payload"];
    assert_eq!(payload["lower_bound"], 2);
    assert_eq!(payload["agreement"], true);
    assert!(payload["class_count"].as_u64().unwrap() >= 2);
}

#[test]
fn census_budget_maps_to_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(&["census", "--p", "3", "--t", "3", "--budget", "10"], dir.path());
    assert_eq!(code, 4);
    assert_eq!(env["status"], "error");
}

#[test]
fn geometry_sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(&["geometry", "--p", "3", "--t", "4", "--s", "1", "--csv", "sweep.csv"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(env["payload"]["pairwise_dims"], serde_json::json!([3]));
    assert_eq!(env["payload"]["triple_dims"], serde_json::json!([1]));
    let mut reader = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(reader.records().count(), 82 * 4);
}

#[test]
fn det_flags_mismatching_cases() {
    let dir = tempfile::tempdir().unwrap();
    let (code, env) = run(&["det", "--p", "3", "--t", "4", "--samples", "20"], dir.path());
    assert_eq!(code, 3);
    let cases = &env["payload"]["cases"];
    assert_eq!(cases["s"]["equal"], 20);
    assert_eq!(cases["-s"]["negated"], 20);
    assert_eq!(cases["-s"]["zero_determinant"], 0);
}
