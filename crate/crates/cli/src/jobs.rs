//! Config files and result documents for the non-simulation subcommands.

use anyhow::{bail, Context, Result};
use dfalg::commutant::{
    commutant, named_generator_set, two_qubit_pi_tau, verify_relations, GeneratorSet,
    RelationReport,
};
use dfalg::gns::{gns_construct, GnsSummary, MatrixAlgebra, StateFunctional};
use dfalg::linalg::{CVector, C64};
use dfalg::pauli::Operator;
use dfalg::spin::{
    decompose, factorize, multiplicity_formula, total_spin, BlockSummary, FactoredSpace, HalfInt,
};
use serde::{Deserialize, Serialize};

pub const VERIFY_TARGETS: [&str; 4] =
    ["two-qubit", "three-qubit", "four-qubit-j0", "four-qubit-j1"];
pub const DEFAULT_VERIFY_TOL: f64 = 1e-12;
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Serialize)]
pub struct VerifyResult {
    pub target: String,
    pub tolerance: f64,
    pub reports: Vec<RelationReport>,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Runs every set of every target; `all` fans out one thread per target.
pub fn verify(target: &str, tol: f64) -> Result<VerifyResult> {
    let names: Vec<&str> = if target == "all" {
        VERIFY_TARGETS.to_vec()
    } else {
        vec![target]
    };
    let per_target: Vec<Result<Vec<RelationReport>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = names
            .iter()
            .map(|&name| {
                scope.spawn(move || -> Result<Vec<RelationReport>> {
                    named_generator_set(name)?
                        .iter()
                        .map(|g| verify_relations(g).map_err(Into::into))
                        .collect()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });
    let mut reports = Vec::new();
    for r in per_target {
        reports.extend(r?);
    }
    let failures: Vec<String> = reports
        .iter()
        .filter(|r| !r.passes(tol))
        .map(|r| r.set_name.clone())
        .collect();
    Ok(VerifyResult {
        target: target.to_string(),
        tolerance: tol,
        passed: failures.is_empty(),
        reports,
        failures,
    })
}

#[derive(Debug, Serialize)]
pub struct DecomposeResult {
    pub n_qubits: usize,
    pub blocks: Vec<BlockSummary>,
    pub total_dim: usize,
    /// Whether every multiplicity agrees with the closed-form count.
    pub formula_agrees: bool,
}

pub fn decompose_table(n_qubits: usize) -> Result<DecomposeResult> {
    let d = decompose(&total_spin(n_qubits)?)?;
    let blocks = d.summary();
    let mut formula_agrees = true;
    for b in &blocks {
        formula_agrees &= multiplicity_formula(n_qubits, b.j)? == b.multiplicity;
    }
    Ok(DecomposeResult {
        n_qubits,
        total_dim: blocks.iter().map(|b| b.dimension).sum(),
        blocks,
        formula_agrees,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorSet {
    /// Collective spin `S_1, S_2, S_3` of `n_qubits` qubits.
    Collective,
    TwoQubitTau,
    TwoQubitPi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommutantConfig {
    #[serde(default = "default_errors")]
    pub errors: ErrorSet,
    #[serde(default = "default_n")]
    pub n_qubits: usize,
    #[serde(default)]
    pub j: Option<HalfInt>,
    #[serde(default)]
    pub dump_basis: bool,
}

fn default_errors() -> ErrorSet {
    ErrorSet::Collective
}

fn default_n() -> usize {
    3
}

impl Default for CommutantConfig {
    fn default() -> Self {
        Self {
            errors: default_errors(),
            n_qubits: default_n(),
            j: None,
            dump_basis: false,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CommutantFile {
    commutant: CommutantConfig,
}

#[derive(Debug, Serialize)]
pub struct CommutantResult {
    pub config: CommutantConfig,
    pub dimension: usize,
    pub working_dim: usize,
    /// `Σ n_j²` on the full space, `n_j²` on one eigenspace.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_dimension: Option<usize>,
    pub max_commutator_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Operator>>,
}

pub fn parse_commutant(text: Option<&str>) -> Result<CommutantConfig> {
    match text {
        None => Ok(CommutantConfig::default()),
        Some(t) => Ok(toml::from_str::<CommutantFile>(t)
            .context("invalid commutant config")?
            .commutant),
    }
}

pub fn run_commutant(cfg: CommutantConfig, tol: f64) -> Result<CommutantResult> {
    let (errors, space, expected) = match cfg.errors {
        ErrorSet::Collective => {
            let d = decompose(&total_spin(cfg.n_qubits)?)?;
            match cfg.j {
                Some(j) => {
                    let n = d.block(j)?.multiplicity;
                    (
                        GeneratorSet::collective_spin(cfg.n_qubits)?,
                        Some(factorize(&d, j)?),
                        Some(n * n),
                    )
                }
                None => {
                    let total = d
                        .blocks
                        .iter()
                        .map(|b| b.multiplicity * b.multiplicity)
                        .sum();
                    (
                        GeneratorSet::collective_spin(cfg.n_qubits)?,
                        None,
                        Some(total),
                    )
                }
            }
        }
        ErrorSet::TwoQubitTau | ErrorSet::TwoQubitPi => {
            if cfg.n_qubits != 2 || cfg.j.is_some() {
                bail!("the two-qubit error sets need n_qubits = 2 and no j");
            }
            let (pi, tau) = two_qubit_pi_tau();
            let set = if cfg.errors == ErrorSet::TwoQubitTau {
                tau
            } else {
                pi
            };
            (set, None, Some(4))
        }
    };
    let c = commutant(&errors, space.as_ref())?;
    let passed = c.max_commutator_residual <= tol && expected.is_none_or(|e| e == c.dimension);
    Ok(CommutantResult {
        dimension: c.dimension,
        working_dim: c.working_dim,
        expected_dimension: expected,
        max_commutator_residual: c.max_commutator_residual,
        tolerance: tol,
        passed,
        basis: cfg.dump_basis.then_some(c.basis),
        config: cfg,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgebraChoice {
    /// `span{1, π₁, π₂, π₃}` on two qubits.
    Pi,
    /// `span{1, τ₁, τ₂, τ₃}` on two qubits.
    Tau,
    /// All operators on `n_qubits` qubits.
    Full,
    /// Operators on the multiplicity factor of the `j` eigenspace.
    Df,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateChoice {
    /// `(1 − π₃)/4`, so that `f(π₃) = −1`.
    Pi3Lowest,
    MaximallyMixed,
    /// A product of fixed pure states on the two factors.
    DfProduct,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GnsConfig {
    pub algebra: AlgebraChoice,
    #[serde(default)]
    pub n_qubits: Option<usize>,
    #[serde(default)]
    pub j: Option<HalfInt>,
    #[serde(default)]
    pub state: Option<StateChoice>,
    /// Explicit density matrix; overrides `state`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<Operator>,
}

impl Default for GnsConfig {
    fn default() -> Self {
        Self {
            algebra: AlgebraChoice::Pi,
            n_qubits: None,
            j: None,
            state: Some(StateChoice::Pi3Lowest),
            density: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GnsFile {
    gns: GnsConfig,
}

#[derive(Debug, Serialize)]
pub struct GnsResult {
    pub config: GnsConfig,
    pub algebra_dimension: usize,
    #[serde(flatten)]
    pub summary: GnsSummary,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn parse_gns(text: Option<&str>) -> Result<GnsConfig> {
    match text {
        None => Ok(GnsConfig::default()),
        Some(t) => Ok(toml::from_str::<GnsFile>(t)
            .context("invalid gns config")?
            .gns),
    }
}

fn unit_product(space: &FactoredSpace) -> Result<CVector> {
    let first = |d: usize| {
        CVector::from_fn(d, |i, _| {
            if i == 0 {
                C64::from(1.0)
            } else {
                C64::from(0.0)
            }
        })
    };
    Ok(space.product_vector(&first(space.left_dim), &first(space.right_dim))?)
}

pub fn run_gns(cfg: GnsConfig, tol: f64) -> Result<GnsResult> {
    let eigenspace = |n: Option<usize>, j: Option<HalfInt>| -> Result<FactoredSpace> {
        let n = n.context("gns.n_qubits is required for this algebra")?;
        let j = j.context("gns.j is required for this algebra or state")?;
        Ok(factorize(&decompose(&total_spin(n)?)?, j)?)
    };
    let (algebra, factored) = match cfg.algebra {
        AlgebraChoice::Pi | AlgebraChoice::Tau => {
            let (pi, tau) = two_qubit_pi_tau();
            let set = if cfg.algebra == AlgebraChoice::Pi {
                pi
            } else {
                tau
            };
            let mut basis = vec![Operator::identity(4)];
            basis.extend(set.generators.into_iter().map(|(_, g)| g));
            let name = if cfg.algebra == AlgebraChoice::Pi {
                "pi"
            } else {
                "tau"
            };
            (
                MatrixAlgebra::from_basis(name, basis)?,
                Some(dfalg::commutant::bell_factorization()),
            )
        }
        AlgebraChoice::Full => {
            let n = cfg
                .n_qubits
                .context("gns.n_qubits is required for the full algebra")?;
            let f = cfg.j.map(|j| eigenspace(Some(n), Some(j))).transpose()?;
            (MatrixAlgebra::full(n)?, f)
        }
        AlgebraChoice::Df => {
            let f = eigenspace(cfg.n_qubits, cfg.j)?;
            let name = format!(
                "df-{}-qubit-j{}",
                cfg.n_qubits.unwrap_or(0),
                cfg.j.map(|j| j.to_string()).unwrap_or_default()
            );
            (MatrixAlgebra::df_algebra(name, &f)?, Some(f))
        }
    };
    let d = algebra.ambient_dim;
    let density = match (&cfg.density, cfg.state) {
        (Some(rho), _) => rho.clone(),
        (None, Some(StateChoice::Pi3Lowest)) => {
            if !matches!(cfg.algebra, AlgebraChoice::Pi | AlgebraChoice::Tau) {
                bail!("state 'pi3-lowest' is defined for the two-qubit algebras only");
            }
            let pi3 = two_qubit_pi_tau().0.generators[2].1.clone();
            &(&Operator::identity(4) - &pi3) * 0.25
        }
        (None, Some(StateChoice::MaximallyMixed)) => &Operator::identity(d) * (1.0 / d as f64),
        (None, Some(StateChoice::DfProduct)) => {
            let f = factored
                .as_ref()
                .context("state 'df-product' needs a factored space (set gns.j)")?;
            let psi = unit_product(f)?;
            Operator::new(&psi * psi.adjoint())?
        }
        (None, None) => bail!("gns config needs either 'state' or 'density'"),
    };
    let algebra_dimension = algebra.dimension();
    let f = StateFunctional::new(algebra, density)?;
    let rep = gns_construct(&f)?;
    let summary = rep.summary();
    Ok(GnsResult {
        passed: summary.homomorphism_residual <= tol,
        config: cfg,
        algebra_dimension,
        summary,
        tolerance: tol,
    })
}
