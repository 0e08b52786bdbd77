//! Browser bindings. Each operation has a plain Rust function returning JSON
//! (testable natively) and a thin `wasm_bindgen` wrapper.

use dfalg::commutant::{named_generator_set, verify_relations};
use dfalg::sim::{run_scenario, Scenario, ScenarioConfig};
use dfalg::spin::{decompose, total_spin};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Clebsch–Gordan table for `n_qubits` as `{n_qubits, blocks: [{j, multiplicity, dimension}]}`.
pub fn decompose_json(n_qubits: usize) -> Result<String, String> {
    let d =
        decompose(&total_spin(n_qubits).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    Ok(json!({ "n_qubits": n_qubits, "blocks": d.summary() }).to_string())
}

/// Runs a preset scenario with the given overrides and returns the trajectory
/// report.
pub fn simulate_json(
    scenario: &str,
    seed: u64,
    coupling_strength: f64,
    epsilon: f64,
    t_max: f64,
    steps: usize,
) -> Result<String, String> {
    let scenario: Scenario = scenario.parse().map_err(|e: dfalg::Error| e.to_string())?;
    let mut cfg = ScenarioConfig::preset(scenario);
    cfg.universe.seed = seed;
    cfg.universe.coupling_strength = coupling_strength;
    if scenario != Scenario::TwoQubitPi {
        cfg.hamiltonian.epsilon = epsilon;
    }
    cfg.schedule.t_max = t_max;
    cfg.schedule.steps = steps;
    let report = run_scenario(&cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Runs a scenario from TOML config text.
pub fn simulate_toml_json(config: &str) -> Result<String, String> {
    let cfg = ScenarioConfig::from_toml_str(config).map_err(|e| e.to_string())?;
    let report = run_scenario(&cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// Relation reports for a named generator set.
pub fn verify_json(target: &str, tol: f64) -> Result<String, String> {
    let sets = named_generator_set(target).map_err(|e| e.to_string())?;
    let reports = sets
        .iter()
        .map(verify_relations)
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let passed = reports.iter().all(|r| r.passes(tol));
    Ok(
        json!({ "target": target, "tolerance": tol, "passed": passed, "reports": reports })
            .to_string(),
    )
}

#[wasm_bindgen]
pub fn decompose_table(n_qubits: usize) -> Result<String, JsError> {
    decompose_json(n_qubits).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate(
    scenario: &str,
    seed: u64,
    coupling_strength: f64,
    epsilon: f64,
    t_max: f64,
    steps: usize,
) -> Result<String, JsError> {
    simulate_json(scenario, seed, coupling_strength, epsilon, t_max, steps)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn simulate_toml(config: &str) -> Result<String, JsError> {
    simulate_toml_json(config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn verify(target: &str, tol: f64) -> Result<String, JsError> {
    verify_json(target, tol).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn decompose_three_qubits() {
        let v: Value = serde_json::from_str(&decompose_json(3).unwrap()).unwrap();
        assert_eq!(v["blocks"][0]["j"], "3/2");
        assert_eq!(v["blocks"][1]["multiplicity"], 2);
        assert!(decompose_json(0).is_err());
    }

    #[test]
    fn simulate_preset() {
        let v: Value =
            serde_json::from_str(&simulate_json("three-qubit-j12", 42, 1.0, 1.0, 5.0, 20).unwrap())
                .unwrap();
        assert_eq!(v["times"].as_array().unwrap().len(), 20);
        assert!(v["summary"]["min_df_fidelity"].as_f64().unwrap() >= 1.0 - 1e-8);
        assert!(simulate_json("nope", 1, 1.0, 1.0, 1.0, 2).is_err());
    }

    #[test]
    fn simulate_from_toml() {
        let v: Value = serde_json::from_str(
            &simulate_toml_json("scenario = \"two-qubit-pi\"\n[schedule]\nsteps = 4\n").unwrap(),
        )
        .unwrap();
        assert_eq!(v["scenario"], "two-qubit-pi");
        assert!(simulate_toml_json("scenario = 3").is_err());
    }

    #[test]
    fn verify_sets() {
        let v: Value = serde_json::from_str(&verify_json("three-qubit", 1e-12).unwrap()).unwrap();
        assert_eq!(v["passed"], true);
        assert!(verify_json("none", 1e-12).is_err());
    }
}
