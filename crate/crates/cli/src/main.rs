use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dfalg::sim::{run_scenario, Scenario, ScenarioConfig};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

mod jobs;

/// Exit status when a check or scenario assertion fails.
const EXIT_CHECK_FAILED: u8 = 1;
/// Exit status for bad input or internal errors.
const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "dfalg",
    version,
    about = "Decoherence-free algebra workbench for small qubit arrays"
)]
struct Cli {
    /// TOML config file for the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override the bath seed (simulate).
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,
    /// Pass/fail tolerance (verify, commutant, gns).
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Also write the JSON document to this file.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Write the time series as CSV (simulate).
    #[arg(long, global = true, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Do not print the JSON document to stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the algebraic relations of the shipped generator sets.
    Verify {
        /// two-qubit, three-qubit, four-qubit-j0, four-qubit-j1, their
        /// `-amended` variants, or all.
        #[arg(default_value = "all")]
        target: String,
    },
    /// Clebsch–Gordan table (j, multiplicity, dimension) for N qubits.
    Decompose { n_qubits: usize },
    /// Dimension (and optionally a basis) of the commutant of an error set.
    Commutant,
    /// GNS construction for an algebra and a state.
    Gns,
    /// Run a system + bath scenario from a config file or a preset name.
    Simulate {
        /// Preset scenario used when no --config is given.
        scenario: Option<String>,
    },
    /// Print the tool version.
    Version,
}

#[derive(Debug, Serialize)]
struct RunManifest {
    command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    config_path: Option<String>,
    /// `sha256:<hex>` of the config file bytes.
    #[serde(skip_serializing_if = "Option::is_none")]
    config_digest: Option<String>,
    seeds: Vec<u64>,
    tool_version: String,
    /// Seconds since the Unix epoch.
    timestamp: u64,
    outputs: Vec<String>,
}

struct Outcome {
    result: Value,
    passed: bool,
    seeds: Vec<u64>,
    csv: Option<String>,
}

fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn read_config(path: Option<&Path>) -> Result<Option<String>> {
    path.map(|p| {
        std::fs::read_to_string(p).with_context(|| format!("cannot read config {}", p.display()))
    })
    .transpose()
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Verify { .. } => "verify",
        Command::Decompose { .. } => "decompose",
        Command::Commutant => "commutant",
        Command::Gns => "gns",
        Command::Simulate { .. } => "simulate",
        Command::Version => "version",
    }
}

fn execute(cli: &Cli, config_text: Option<&str>) -> Result<Outcome> {
    let plain = |result: Value, passed: bool| Outcome {
        result,
        passed,
        seeds: Vec::new(),
        csv: None,
    };
    match &cli.command {
        Command::Verify { target } => {
            let known = jobs::VERIFY_TARGETS.iter().any(|t| t == target)
                || target == "all"
                || target
                    .strip_suffix("-amended")
                    .is_some_and(|t| t.starts_with("four-qubit-j"));
            if !known {
                bail!("unknown verify target '{target}'");
            }
            let r = jobs::verify(target, cli.tol.unwrap_or(jobs::DEFAULT_VERIFY_TOL))?;
            let passed = r.passed;
            Ok(plain(serde_json::to_value(r)?, passed))
        }
        Command::Decompose { n_qubits } => {
            let r = jobs::decompose_table(*n_qubits)?;
            let passed = r.formula_agrees && r.total_dim == 1usize << n_qubits;
            Ok(plain(serde_json::to_value(r)?, passed))
        }
        Command::Commutant => {
            let cfg = jobs::parse_commutant(config_text)?;
            let r = jobs::run_commutant(cfg, cli.tol.unwrap_or(jobs::DEFAULT_RESIDUAL_TOL))?;
            let passed = r.passed;
            Ok(plain(serde_json::to_value(r)?, passed))
        }
        Command::Gns => {
            let cfg = jobs::parse_gns(config_text)?;
            let r = jobs::run_gns(cfg, cli.tol.unwrap_or(jobs::DEFAULT_RESIDUAL_TOL))?;
            let passed = r.passed;
            Ok(plain(serde_json::to_value(r)?, passed))
        }
        Command::Simulate { scenario } => {
            let mut cfg = match (config_text, scenario) {
                (Some(text), None) => ScenarioConfig::from_toml_str(text)?,
                (None, Some(name)) => ScenarioConfig::preset(name.parse::<Scenario>()?),
                (Some(_), Some(_)) => bail!("give either --config or a scenario name, not both"),
                (None, None) => bail!("simulate needs --config PATH or a scenario name"),
            };
            if let Some(seed) = cli.seed {
                cfg.universe.seed = seed;
            }
            let report = run_scenario(&cfg)?;
            Ok(Outcome {
                passed: report.passed,
                seeds: vec![cfg.universe.seed],
                csv: Some(report.to_csv()),
                result: serde_json::to_value(&report)?,
            })
        }
        Command::Version => Ok(plain(
            serde_json::json!({ "name": "dfalg", "version": env!("CARGO_PKG_VERSION") }),
            true,
        )),
    }
}

fn run(cli: &Cli) -> Result<bool> {
    if matches!(cli.command, Command::Version) && !cli.quiet && cli.json.is_none() {
        println!("dfalg {}", env!("CARGO_PKG_VERSION"));
        return Ok(true);
    }
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            bail!("--tol must be a finite non-negative number");
        }
    }
    let config_text = read_config(cli.config.as_deref())?;
    let outcome = execute(cli, config_text.as_deref())?;

    let mut outputs = Vec::new();
    if let Some(path) = &cli.csv {
        let csv = outcome
            .csv
            .as_ref()
            .context("--csv is only produced by simulate")?;
        std::fs::write(path, csv).with_context(|| format!("cannot write {}", path.display()))?;
        outputs.push(path.display().to_string());
    }
    if let Some(path) = &cli.json {
        outputs.push(path.display().to_string());
    }
    let manifest = RunManifest {
        command: command_name(&cli.command).to_string(),
        config_path: cli.config.as_ref().map(|p| p.display().to_string()),
        config_digest: config_text.as_ref().map(|t| digest(t.as_bytes())),
        seeds: outcome.seeds,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        outputs,
    };
    let doc = serde_json::json!({
        "manifest": manifest,
        "passed": outcome.passed,
        "result": outcome.result,
    });
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    if let Some(path) = &cli.json {
        std::fs::write(path, &text).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if !cli.quiet {
        print!("{text}");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
