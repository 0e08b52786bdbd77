use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn dfalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn table(n: &str) -> Vec<(String, u64, u64)> {
    let out = dfalg(&["decompose", n]);
    assert_eq!(code(&out), 0);
    json(&out)["result"]["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| {
            (
                b["j"].as_str().unwrap().to_string(),
                b["multiplicity"].as_u64().unwrap(),
                b["dimension"].as_u64().unwrap(),
            )
        })
        .collect()
}

#[test]
fn decompose_tables() {
    let s = |x: &str| x.to_string();
    assert_eq!(table("1"), vec![(s("1/2"), 1, 2)]);
    assert_eq!(table("3"), vec![(s("3/2"), 1, 4), (s("1/2"), 2, 4)]);
    assert_eq!(
        table("4"),
        vec![(s("2"), 1, 5), (s("1"), 3, 9), (s("0"), 2, 2)]
    );
}

#[test]
fn decompose_rejects_out_of_range() {
    assert_eq!(code(&dfalg(&["decompose", "0"])), 2);
    assert_eq!(code(&dfalg(&["decompose", "9"])), 2);
}

#[test]
fn verify_three_qubit() {
    let out = dfalg(&["verify", "three-qubit"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    let report = &doc["result"]["reports"][0];
    assert!((report["casimir_value"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(doc["passed"], Value::Bool(true));
}

#[test]
fn verify_tolerance_override_below_precision_fails() {
    let out = dfalg(&["verify", "three-qubit", "--tol", "1e-15", "--quiet"]);
    assert_eq!(code(&out), 1);
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_all_exit_code_matches_targets() {
    let per_target: Vec<bool> = ["two-qubit", "three-qubit", "four-qubit-j0", "four-qubit-j1"]
        .iter()
        .map(|t| code(&dfalg(&["verify", t, "--quiet"])) == 0)
        .collect();
    let out = dfalg(&["verify", "all"]);
    let doc = json(&out);
    assert!(doc["result"]["reports"].as_array().unwrap().len() >= 4);
    let expected = if per_target.iter().all(|&p| p) { 0 } else { 1 };
    assert_eq!(code(&out), expected);
    assert!(per_target[0] && per_target[1]);
}

#[test]
fn verify_amended_targets_pass() {
    for t in ["four-qubit-j0-amended", "four-qubit-j1-amended"] {
        assert_eq!(code(&dfalg(&["verify", t, "--quiet"])), 0, "{t}");
    }
    assert_eq!(code(&dfalg(&["verify", "five-qubit", "--quiet"])), 2);
}

#[test]
fn commutant_fixtures() {
    let c = fixture("commutant-three-qubit.toml");
    let out = dfalg(&["commutant", "--config", c.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["dimension"], 5);

    let c = fixture("commutant-four-qubit-j1.toml");
    let out = dfalg(&["commutant", "--config", c.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["result"]["dimension"], 9);
    assert_eq!(doc["result"]["basis"].as_array().unwrap().len(), 9);
    assert_eq!(doc["result"]["basis"][0]["dim"], 9);
}

#[test]
fn commutant_default_config() {
    let out = dfalg(&["commutant"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["result"]["dimension"], 5);
}

#[test]
fn gns_fixtures() {
    for (file, dim) in [
        ("gns-pi.toml", 2),
        ("gns-df-three-qubit.toml", 2),
        ("gns-full-density.toml", 4),
    ] {
        let c = fixture(file);
        let out = dfalg(&["gns", "--config", c.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{file}");
        let r = &json(&out)["result"];
        assert_eq!(r["gns_dimension"], dim, "{file}");
        assert!(r["homomorphism_residual"].as_f64().unwrap() <= 1e-9);
        assert!(r["algebra_name"].is_string());
    }
}

#[test]
fn every_scenario_fixture_passes() {
    for file in [
        "two-qubit-pi.toml",
        "three-qubit-j12.toml",
        "three-qubit-exchange.toml",
        "four-qubit-j0.toml",
        "four-qubit-j1.toml",
        "negative-control-single-qubit.toml",
        "negative-control-superposition.toml",
    ] {
        let c = fixture(file);
        let out = dfalg(&["simulate", "--config", c.to_str().unwrap(), "--quiet"]);
        assert_eq!(
            code(&out),
            0,
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn simulate_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("run.json");
    let csv_path = dir.path().join("run.csv");
    let c = fixture("three-qubit-j12.toml");
    let out = dfalg(&[
        "simulate",
        "--config",
        c.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    let m = &doc["manifest"];
    assert_eq!(m["command"], "simulate");
    assert_eq!(m["seeds"], serde_json::json!([42]));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
    let digest = m["config_digest"].as_str().unwrap();
    assert!(digest.starts_with("sha256:") && digest.len() == 7 + 64);
    let r = &doc["result"];
    assert_eq!(r["fidelity_convention"], "uhlmann-squared");
    assert!(r["summary"]["min_df_fidelity"].as_f64().unwrap() >= 1.0 - 1e-8);
    assert!(r["summary"]["min_system_purity"].as_f64().unwrap() < 0.999);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,df_fidelity,df_purity,system_purity,leakage,bath_entropy"
    );
    assert_eq!(lines.count(), 50);
}

fn strip_timestamp(text: &str) -> String {
    text.lines()
        .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn identical_config_gives_identical_json() {
    let c = fixture("negative-control-superposition.toml");
    let a = dfalg(&["simulate", "--config", c.to_str().unwrap()]);
    let b = dfalg(&["simulate", "--config", c.to_str().unwrap()]);
    assert_eq!(code(&a), 0);
    let (a, b) = (
        String::from_utf8(a.stdout).unwrap(),
        String::from_utf8(b.stdout).unwrap(),
    );
    assert!(a.contains("\"timestamp\""));
    assert_eq!(strip_timestamp(&a), strip_timestamp(&b));
}

#[test]
fn seed_override_is_recorded() {
    let c = fixture("three-qubit-j12.toml");
    let base = json(&dfalg(&["simulate", "--config", c.to_str().unwrap()]));
    let out = dfalg(&["simulate", "--config", c.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["manifest"]["seeds"], serde_json::json!([7]));
    assert_eq!(doc["result"]["config"]["universe"]["seed"], 7);
    assert_eq!(
        doc["manifest"]["config_digest"],
        base["manifest"]["config_digest"]
    );
    assert_ne!(
        doc["result"]["system_purity"],
        base["result"]["system_purity"]
    );
}

#[test]
fn simulate_preset_by_name() {
    let out = dfalg(&["simulate", "negative-control-single-qubit", "--quiet"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        code(&dfalg(&["simulate", "no-such-scenario", "--quiet"])),
        2
    );
    assert_eq!(code(&dfalg(&["simulate", "--quiet"])), 2);
}

#[test]
fn failed_assertion_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.toml");
    std::fs::write(
        &cfg,
        "scenario = \"negative-control-single-qubit\"\n[schedule]\nsteps = 10\n[assertions]\nsystem_purity_below = 0.1\n",
    )
    .unwrap();
    let out = dfalg(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["passed"], Value::Bool(false));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(
        &cfg,
        "scenario = \"three-qubit-j12\"\n[universe]\nd_b = 1\n",
    )
    .unwrap();
    let out = dfalg(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("d_b"));
    let missing = dir.path().join("missing.toml");
    assert_eq!(
        code(&dfalg(&["gns", "--config", missing.to_str().unwrap()])),
        2
    );
}

#[test]
fn budget_violation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("big.toml");
    std::fs::write(
        &cfg,
        "scenario = \"collective\"\n[universe]\nn_qubits = 6\nj = \"0\"\nd_b = 5\n",
    )
    .unwrap();
    let out = dfalg(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("256"));
}

#[test]
fn version_subcommand() {
    let out = dfalg(&["version"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("dfalg "));
    let out = dfalg(&["version", "--json", "/dev/null"]);
    assert_eq!(json(&out)["result"]["version"], env!("CARGO_PKG_VERSION"));
}
