use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solvfrag"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("spawn solvfrag")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = run(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn h2_fc_partition_has_two_fragments() {
    let h2 = fixture("h2_qubit.json");
    let v = json(&["partition", "--method", "fc", "--input", h2.to_str().unwrap()]);
    assert_eq!(v["fragments"], 2);
    assert_eq!(v["terms"], 15);
    assert_eq!(v["run"]["method"], "fc");
    assert_eq!(v["run"]["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn heisenberg_two_sites_two_fragments() {
    let v = json(&["heisenberg", "--n", "2", "--seed", "7", "--method", "nc"]);
    assert_eq!(v["fragments"], 2);
    assert_eq!(v["run"]["seed"], 7);
}

#[test]
fn verify_partition_dense_passes() {
    let h2 = fixture("h2_qubit.json");
    let out = run(&["verify", "partition", "--input", h2.to_str().unwrap(), "--method", "nc", "--dense"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_end().ends_with("PASS"), "{text}");
}

#[test]
fn reports_are_deterministic() {
    let args = ["heisenberg", "--n", "3", "--seed", "4"];
    assert_eq!(json(&args), json(&args));
}

#[test]
fn partition_output_round_trips_through_verify_fragment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("frags.json");
    let lih = fixture("lih_qubit.json");
    let v = json(&[
        "partition", "--method", "nc", "--input", lih.to_str().unwrap(), "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(v["fragments"], 35);
    let check = json(&["verify", "fragment", "--input", out.to_str().unwrap()]);
    assert_eq!(check["passed"], true);
    assert_eq!(check["fragments"].as_array().unwrap().len(), 35);
    let inspect = json(&["inspect", "--input", out.to_str().unwrap()]);
    assert_eq!(inspect["format"], "fragment-set");
}

#[test]
fn fpartition_writes_verifiable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lr.json");
    let h2 = fixture("h2_tensor.json");
    let v = json(&[
        "fpartition", "--method", "lr", "--input", h2.to_str().unwrap(), "--output", out.to_str().unwrap(),
    ]);
    assert_eq!(v["table_count"], 4);
    let check = json(&[
        "verify", "fpartition", "--input", out.to_str().unwrap(), "--tensor", h2.to_str().unwrap(),
    ]);
    assert_eq!(check["passed"], true);
}

#[test]
fn block_exponential_check_passes() {
    let v = json(&["verify", "appendix-a", "--trials", "10", "--seed", "2"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn solve_fragment_ground_matches_dense() {
    let h2 = fixture("h2_qubit.json");
    let v = json(&["solve-fragment", "--input", h2.to_str().unwrap()]);
    let e = v["fragments"][0]["ground_energy"].as_f64().unwrap();
    let m = json(&["verify", "measure", "--input", h2.to_str().unwrap(), "--state", "ground", "--shots", "1000"]);
    assert!((e - m["dense"].as_f64().unwrap()).abs() < 1e-10);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["partition", "--method", "nc", "--input", "missing.json"]).status.code(), Some(2));
    assert_eq!(run(&["partition", "--method", "nc", "--bogus"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"format\": \"qubit-hamiltonian\"").unwrap();
    let out = run(&["inspect", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn failed_verification_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lr.json");
    let h2 = fixture("h2_tensor.json");
    let lih = fixture("lih_tensor.json");
    json(&["fpartition", "--method", "lr", "--input", h2.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    let r = run(&["verify", "fpartition", "--input", out.to_str().unwrap(), "--tensor", lih.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(&cfg, "seed = 7\nformat = \"json\"\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "heisenberg", "--n", "2"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["run"]["seed"], 7);
    std::fs::write(&cfg, "colour = true\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "heisenberg", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn bench_table_one_rows() {
    let v = json(&["bench-table", "--table", "1", "--fixtures", fixture("").to_str().unwrap()]);
    let rows = v["rows"].as_array().unwrap();
    let got: Vec<(String, u64, u64, u64, u64)> = rows
        .iter()
        .map(|r| {
            let n = |k: &str| r[k].as_u64().unwrap();
            (r["system"].as_str().unwrap().to_string(), n("ac"), n("fc"), n("nc"), n("fnc"))
        })
        .collect();
    assert_eq!(got[0], ("H2".into(), 10, 2, 1, 1));
    assert_eq!(got.len(), 4);
}
