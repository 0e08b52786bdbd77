//! Exact system + bath evolution.
//!
//! The universe is `C^{2^N} ⊗ C^{d_B}` with the system as the left (most
//! significant) factor and
//! `H = H_S ⊗ 1 + 1 ⊗ H_B + Σ_i E_i ⊗ B_i`,
//! where `E_i` are the error generators (collective spin or the two-qubit
//! `τ` set). The Hamiltonian is diagonalized once; every time point is then a
//! phase multiplication in the eigenbasis.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::commutant::{
    bell_factorization, bond_operator, four_qubit_tau_j0_amended, four_qubit_tau_j1_amended,
    three_qubit_tau, two_qubit_pi_tau,
};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen, C64};
use crate::pauli::Operator;
use crate::spin::{
    decompose, factorize, total_spin, CGDecomposition, Factor, FactoredSpace, HalfInt,
};

/// Largest universe dimension `2^N · d_B` accepted.
pub const MAX_UNIVERSE_DIM: usize = 256;
const HERMITIAN_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;
/// Largest deviation from the `A ⊗ 1 + 1 ⊗ B` form accepted by the predictor.
pub const SPLIT_TOL: f64 = 1e-9;
pub const FIDELITY_CONVENTION: &str = "uhlmann-squared";

fn complex_normal(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn ginibre(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    // filled row by row so the draw order does not depend on storage layout
    let mut m = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// Hermitian part of a Ginibre matrix, rescaled to Frobenius norm `scale`.
fn random_hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Operator {
    let a = ginibre(rng, d);
    let h = (&a + a.adjoint()) * C64::from(0.5);
    let n = h.norm();
    Operator::from_mat(h * C64::from(scale / n))
}

fn random_pure(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_iterator(d, (0..d).map(|_| complex_normal(rng)));
    linalg::normalized(&v).expect("Gaussian vector is nonzero")
}

#[derive(Debug, Clone)]
pub struct BathSpec {
    /// Dimension of the register the system couples to, including the
    /// purifying copy when the bath starts mixed.
    pub dim: usize,
    pub h_bath: Operator,
    /// One coupling per error generator.
    pub couplings: Vec<Operator>,
    pub rng_seed: Option<u64>,
    pub coupling_strength: f64,
    pub initial_state: CVector,
    /// Whether `dim` is a doubled register purifying a mixed start.
    pub purified: bool,
}

impl BathSpec {
    /// Explicit bath with a pure initial state.
    pub fn new(h_bath: Operator, couplings: Vec<Operator>, initial_state: CVector) -> Result<Self> {
        let dim = h_bath.dim();
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("bath dimension {dim} < 2")));
        }
        for op in std::iter::once(&h_bath).chain(&couplings) {
            if op.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: op.dim(),
                    right: dim,
                });
            }
            if !op.is_hermitian(HERMITIAN_TOL) {
                return Err(Error::InvalidArgument(
                    "bath operator is not Hermitian".into(),
                ));
            }
        }
        if initial_state.len() != dim {
            return Err(Error::DimensionMismatch {
                left: initial_state.len(),
                right: dim,
            });
        }
        if (initial_state.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidArgument(
                "bath state is not normalized".into(),
            ));
        }
        let coupling_strength = couplings
            .iter()
            .map(|b| b.matrix().norm())
            .fold(0.0, f64::max);
        Ok(Self {
            dim,
            h_bath,
            couplings,
            rng_seed: None,
            coupling_strength,
            initial_state,
            purified: false,
        })
    }

    /// Seeded random bath. `H_B` has Frobenius norm 1, every coupling has
    /// Frobenius norm `coupling_strength`. Draw order: `H_B`, couplings, then
    /// the initial state.
    pub fn random(
        d_b: usize,
        n_couplings: usize,
        coupling_strength: f64,
        seed: u64,
        mixed: bool,
    ) -> Result<Self> {
        if d_b < 2 {
            return Err(Error::InvalidArgument(format!("bath dimension {d_b} < 2")));
        }
        if !coupling_strength.is_finite() || coupling_strength < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coupling strength {coupling_strength} must be finite and non-negative"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h_bath = random_hermitian(&mut rng, d_b, 1.0);
        let couplings: Vec<Operator> = (0..n_couplings)
            .map(|_| random_hermitian(&mut rng, d_b, coupling_strength))
            .collect();
        let mut spec = if mixed {
            let g = ginibre(&mut rng, d_b);
            let rho = &g * g.adjoint();
            let rho = &rho / linalg::trace(&rho);
            Self::purify(h_bath, couplings, &rho)?
        } else {
            let psi = random_pure(&mut rng, d_b);
            Self::new(h_bath, couplings, psi)?
        };
        spec.rng_seed = Some(seed);
        spec.coupling_strength = coupling_strength;
        Ok(spec)
    }

    /// Bath starting in the mixed state `rho`, realized as a pure state on
    /// `bath ⊗ copy` with every bath operator acting as `X ⊗ 1`.
    pub fn purify(h_bath: Operator, couplings: Vec<Operator>, rho: &CMatrix) -> Result<Self> {
        let d = h_bath.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::DimensionMismatch {
                left: rho.nrows(),
                right: d,
            });
        }
        let eig = HermitianEigen::new(rho);
        if eig.values[0] < -1e-10 {
            return Err(Error::PositivityViolation {
                min_eigenvalue: eig.values[0],
            });
        }
        let mut psi = CVector::zeros(d * d);
        for (k, &p) in eig.values.iter().enumerate() {
            let copy = CVector::from_fn(d, |i, _| if i == k { linalg::ONE } else { linalg::ZERO });
            psi += eig.vectors.column(k).kronecker(&copy) * C64::from(p.max(0.0).sqrt());
        }
        let psi = linalg::normalized(&psi)?;
        let id = Operator::identity(d);
        let mut spec = Self::new(
            h_bath.kron(&id),
            couplings.iter().map(|b| b.kron(&id)).collect(),
            psi,
        )?;
        spec.purified = true;
        Ok(spec)
    }

    /// Dimension of the physical bath, without the purifying copy.
    pub fn physical_dim(&self) -> usize {
        if self.purified {
            (self.dim as f64).sqrt().round() as usize
        } else {
            self.dim
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeTerm {
    /// 1-based qubit sites.
    pub sites: [usize; 2],
    pub strength: f64,
}

/// `H_S = ε S₃ + Σ c_jk b_jk + Σ α_i D_i + Σ β_i E_i`, with `D_i` the DF
/// generators and `E_i` the error generators of the chosen model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemHamiltonianSpec {
    pub epsilon: f64,
    pub exchange: Vec<ExchangeTerm>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// Which operators couple to the bath and which eigenspace is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorModel {
    /// `E_i = S_i`, working eigenspace `S² = j(j+1)`.
    Collective { j: HalfInt },
    /// Two qubits with `E_i = τ_i`; the working space is all of `C⁴`
    /// factored as `π ⊗ τ`.
    TwoQubitTau,
}

impl ErrorModel {
    pub fn working_sector(&self) -> Option<HalfInt> {
        match self {
            Self::Collective { j } => Some(*j),
            Self::TwoQubitTau => None,
        }
    }

    fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        if matches!(self, Self::TwoQubitTau) && n_qubits != 2 {
            return Err(Error::InvalidArgument(format!(
                "the τ error model needs 2 qubits, got {n_qubits}"
            )));
        }
        Ok(())
    }

    pub fn error_generators(&self, n_qubits: usize) -> Result<Vec<Operator>> {
        self.check_qubits(n_qubits)?;
        Ok(match self {
            Self::Collective { .. } => {
                let s = total_spin(n_qubits)?;
                s.components().into_iter().cloned().collect()
            }
            Self::TwoQubitTau => two_qubit_pi_tau()
                .1
                .generators
                .into_iter()
                .map(|(_, g)| g)
                .collect(),
        })
    }

    /// Ambient operators acting as `su(2)` on the multiplicity factor, where
    /// a set is known for this shape.
    pub fn df_generators(&self, n_qubits: usize) -> Result<Option<Vec<Operator>>> {
        self.check_qubits(n_qubits)?;
        let set = match (self, n_qubits) {
            (Self::TwoQubitTau, _) => Some(two_qubit_pi_tau().0),
            (Self::Collective { j }, 3) if j.twice() == 1 => Some(three_qubit_tau()?),
            (Self::Collective { j }, 4) if j.twice() == 0 => Some(four_qubit_tau_j0_amended()?),
            (Self::Collective { j }, 4) if j.twice() == 2 => Some(four_qubit_tau_j1_amended()?),
            _ => None,
        };
        Ok(set.map(|s| s.generators.into_iter().map(|(_, g)| g).collect()))
    }

    pub fn factored_space(
        &self,
        n_qubits: usize,
    ) -> Result<(FactoredSpace, Option<CGDecomposition>)> {
        self.check_qubits(n_qubits)?;
        match self {
            Self::Collective { j } => {
                let d = decompose(&total_spin(n_qubits)?)?;
                let f = factorize(&d, *j)?;
                Ok((f, Some(d)))
            }
            Self::TwoQubitTau => Ok((bell_factorization(), None)),
        }
    }
}

impl SystemHamiltonianSpec {
    pub fn build(&self, n_qubits: usize, model: ErrorModel) -> Result<Operator> {
        let dim = 1usize << n_qubits;
        let mut h = Operator::zeros(dim);
        if self.epsilon != 0.0 {
            h = &h + &(&total_spin(n_qubits)?.s3 * self.epsilon);
        }
        for term in &self.exchange {
            h = &h + &(&bond_operator(term.sites[0], term.sites[1], n_qubits)? * term.strength);
        }
        let weighted = |coeffs: &[f64],
                        ops: Option<Vec<Operator>>,
                        what: &str|
         -> Result<Operator> {
            if coeffs.iter().all(|&c| c == 0.0) {
                return Ok(Operator::zeros(dim));
            }
            let ops = ops.ok_or_else(|| {
                Error::InvalidArgument(format!("no {what} generators are available for this model"))
            })?;
            if coeffs.len() > ops.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} {what} coefficients for {} generators",
                    coeffs.len(),
                    ops.len()
                )));
            }
            Ok(coeffs
                .iter()
                .zip(&ops)
                .fold(Operator::zeros(dim), |acc, (&c, g)| &acc + &(g * c)))
        };
        h = &h + &weighted(&self.alpha, model.df_generators(n_qubits)?, "DF")?;
        h = &h + &weighted(&self.beta, Some(model.error_generators(n_qubits)?), "error")?;
        if !h.is_hermitian(HERMITIAN_TOL) {
            return Err(Error::Numerical(
                "system Hamiltonian is not Hermitian".into(),
            ));
        }
        Ok(h)
    }
}

#[derive(Debug, Clone)]
pub struct UniverseModel {
    pub n_qubits: usize,
    pub model: ErrorModel,
    pub bath: BathSpec,
    pub h_system: Operator,
    pub h_total: Operator,
    pub error_generators: Vec<Operator>,
    pub factored: FactoredSpace,
    pub decomposition: Option<CGDecomposition>,
    eigen: HermitianEigen,
}

impl UniverseModel {
    pub fn system_dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.system_dim() * self.bath.dim
    }

    /// `ψ_S ⊗ ψ_B` with the bath in its configured initial state.
    pub fn product_state(&self, system: &CVector) -> Result<CVector> {
        if system.len() != self.system_dim() {
            return Err(Error::DimensionMismatch {
                left: system.len(),
                right: self.system_dim(),
            });
        }
        Ok(system.kronecker(&self.bath.initial_state))
    }
}

pub fn build_universe(
    n_qubits: usize,
    bath: BathSpec,
    h_sys: &SystemHamiltonianSpec,
    model: ErrorModel,
) -> Result<UniverseModel> {
    if n_qubits == 0 {
        return Err(Error::InvalidArgument("need at least one qubit".into()));
    }
    let dim = (1usize << n_qubits.min(usize::BITS as usize - 1)) * bath.dim;
    if n_qubits > 8 || dim > MAX_UNIVERSE_DIM {
        return Err(Error::DimensionBudget {
            dim,
            max: MAX_UNIVERSE_DIM,
        });
    }
    let error_generators = model.error_generators(n_qubits)?;
    if bath.couplings.len() != error_generators.len() {
        return Err(Error::InvalidArgument(format!(
            "{} bath couplings for {} error generators",
            bath.couplings.len(),
            error_generators.len()
        )));
    }
    let (factored, decomposition) = model.factored_space(n_qubits)?;
    let h_system = h_sys.build(n_qubits, model)?;
    let id_s = Operator::identity(1 << n_qubits);
    let id_b = Operator::identity(bath.dim);
    let mut h_total = &h_system.kron(&id_b) + &id_s.kron(&bath.h_bath);
    for (e, b) in error_generators.iter().zip(&bath.couplings) {
        h_total = &h_total + &e.kron(b);
    }
    if !h_total.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::Numerical(
            "universe Hamiltonian is not Hermitian".into(),
        ));
    }
    let eigen = HermitianEigen::new(h_total.matrix());
    Ok(UniverseModel {
        n_qubits,
        model,
        bath,
        h_system,
        h_total,
        error_generators,
        factored,
        decomposition,
        eigen,
    })
}

/// `e^{−iHt} ψ₀` at each time, reusing the cached eigendecomposition.
pub fn evolve(u: &UniverseModel, psi0: &CVector, times: &[f64]) -> Result<Vec<CVector>> {
    if psi0.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.len(),
            right: u.dim(),
        });
    }
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidArgument(format!(
            "initial state has norm {norm}"
        )));
    }
    let w = &u.eigen.vectors;
    let coeffs = w.adjoint() * psi0;
    times
        .iter()
        .map(|&t| {
            let phased = CVector::from_iterator(
                coeffs.len(),
                coeffs
                    .iter()
                    .zip(&u.eigen.values)
                    .map(|(c, &l)| c * C64::from_polar(1.0, -l * t)),
            );
            let psi = w * phased;
            let err = (psi.norm() - 1.0).abs();
            if err > NORM_TOL {
                return Err(Error::Numerical(format!(
                    "norm drifted by {err:e} at t = {t}"
                )));
            }
            Ok(psi)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct DfReduction {
    /// State of the multiplicity factor, renormalized to trace 1.
    pub rho_df: CMatrix,
    /// `1 −` weight of `ρ_S` in the working eigenspace.
    pub leakage: f64,
    pub rho_system: CMatrix,
}

/// Trace out the bath, compress to the working eigenspace and trace out the
/// irrep factor.
pub fn df_reduce(state: &CVector, u: &UniverseModel) -> Result<DfReduction> {
    if state.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: state.len(),
            right: u.dim(),
        });
    }
    let rho_system = linalg::reduce_pure_left(state, u.system_dim(), u.bath.dim);
    let v = &u.factored.isometry;
    let compressed = v.adjoint() * &rho_system * v;
    let weight = linalg::trace(&compressed).re;
    if weight < 1e-12 {
        return Err(Error::Leakage {
            weight: 1.0 - weight,
        });
    }
    let rho = compressed / C64::from(weight);
    let rho_df = u.factored.reduce(&rho, Factor::Multiplicity);
    Ok(DfReduction {
        rho_df,
        leakage: (1.0 - weight).max(0.0),
        rho_system,
    })
}

/// `V†HV = A ⊗ 1 + 1 ⊗ B` for a Hamiltonian that preserves the working
/// eigenspace.
#[derive(Debug, Clone)]
pub struct DfSplit {
    /// Traceless part acting on the multiplicity factor.
    pub df_part: CMatrix,
    /// Part acting on the irrep factor, including the trace.
    pub gauge_part: CMatrix,
    pub residual: f64,
}

pub fn split_df_hamiltonian(h: &Operator, factored: &FactoredSpace) -> Result<DfSplit> {
    let v = &factored.isometry;
    let p = v * v.adjoint();
    let id = CMatrix::identity(h.dim(), h.dim());
    let cross = linalg::max_abs(&((&id - &p) * h.matrix() * &p));
    if cross > SPLIT_TOL {
        return Err(Error::NotDfCompatible {
            residual: cross,
            detail: "Hamiltonian couples the working eigenspace to its complement".into(),
        });
    }
    let (l, r) = (factored.left_dim, factored.right_dim);
    let hc = v.adjoint() * h.matrix() * v;
    let mean = linalg::trace(&hc) / C64::from((l * r) as f64);
    let a = linalg::partial_trace_right(&hc, l, r) / C64::from(r as f64)
        - CMatrix::identity(l, l) * mean;
    let b = linalg::partial_trace_left(&hc, l, r) / C64::from(l as f64);
    let rebuilt = a.kronecker(&CMatrix::identity(r, r)) + CMatrix::identity(l, l).kronecker(&b);
    let residual = linalg::max_abs(&(&hc - rebuilt));
    if residual > SPLIT_TOL {
        return Err(Error::NotDfCompatible {
            residual,
            detail: "Hamiltonian has terms in neither the DF algebra nor its commutant".into(),
        });
    }
    Ok(DfSplit {
        df_part: a,
        gauge_part: b,
        residual,
    })
}

/// `ρ_DF(t) = e^{−iAt} ρ_DF(0) e^{iAt}` with `A` the DF part of `H_S`.
pub fn unitary_prediction(
    rho_df_0: &CMatrix,
    u: &UniverseModel,
    times: &[f64],
) -> Result<Vec<CMatrix>> {
    let split = split_df_hamiltonian(&u.h_system, &u.factored)?;
    if rho_df_0.nrows() != split.df_part.nrows() {
        return Err(Error::DimensionMismatch {
            left: rho_df_0.nrows(),
            right: split.df_part.nrows(),
        });
    }
    let eig = HermitianEigen::new(&split.df_part);
    Ok(times
        .iter()
        .map(|&t| {
            let prop = eig.map(|l| C64::from_polar(1.0, -l * t));
            &prop * rho_df_0 * prop.adjoint()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    TwoQubitPi,
    ThreeQubitJ12,
    FourQubitJ0,
    FourQubitJ1,
    NegativeControlSingleQubit,
    NegativeControlSuperposition,
    /// Collective coupling with `n_qubits` and `j` taken from the config.
    Collective,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Self::TwoQubitPi,
        Self::ThreeQubitJ12,
        Self::FourQubitJ0,
        Self::FourQubitJ1,
        Self::NegativeControlSingleQubit,
        Self::NegativeControlSuperposition,
        Self::Collective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::TwoQubitPi => "two-qubit-pi",
            Self::ThreeQubitJ12 => "three-qubit-j12",
            Self::FourQubitJ0 => "four-qubit-j0",
            Self::FourQubitJ1 => "four-qubit-j1",
            Self::NegativeControlSingleQubit => "negative-control-single-qubit",
            Self::NegativeControlSuperposition => "negative-control-superposition",
            Self::Collective => "collective",
        }
    }

    /// Fixed `(n_qubits, j)` for the named scenarios.
    fn shape(self) -> Option<(usize, Option<HalfInt>)> {
        match self {
            Self::TwoQubitPi => Some((2, None)),
            Self::ThreeQubitJ12 | Self::NegativeControlSuperposition => {
                Some((3, Some(HalfInt::from_twice(1))))
            }
            Self::FourQubitJ0 => Some((4, Some(HalfInt::from_twice(0)))),
            Self::FourQubitJ1 => Some((4, Some(HalfInt::from_twice(2)))),
            Self::NegativeControlSingleQubit => Some((1, Some(HalfInt::from_twice(1)))),
            Self::Collective => None,
        }
    }

    fn is_df_claim(self) -> bool {
        matches!(
            self,
            Self::TwoQubitPi
                | Self::ThreeQubitJ12
                | Self::FourQubitJ0
                | Self::FourQubitJ1
                | Self::Collective
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::NotFound(format!("unknown scenario '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniverseConfig {
    pub n_qubits: usize,
    pub j: Option<HalfInt>,
    pub d_b: usize,
    pub seed: u64,
    pub coupling_strength: f64,
    pub mixed_bath: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub t_max: f64,
    /// Number of time points, both ends included.
    pub steps: usize,
}

impl Schedule {
    pub fn times(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![0.0],
            n => (0..n)
                .map(|k| self.t_max * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Initial system state. Amplitudes are `[re, im]` pairs and are normalized
/// on use.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialConfig {
    /// State of the multiplicity (DF) factor.
    pub df: Option<Vec<[f64; 2]>>,
    /// State of the irrep factor.
    pub gauge: Option<Vec<[f64; 2]>>,
    /// Second eigenspace superposed with equal weight.
    pub superpose: Option<HalfInt>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AssertionSpec {
    pub min_df_fidelity: Option<f64>,
    pub max_leakage: Option<f64>,
    /// Passes when the smallest system purity falls below this value.
    pub system_purity_below: Option<f64>,
    /// Passes when the leakage stays within `leakage_target_tol` of this value.
    pub leakage_target: Option<f64>,
    pub leakage_target_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub universe: UniverseConfig,
    pub hamiltonian: SystemHamiltonianSpec,
    pub schedule: Schedule,
    pub initial: InitialConfig,
    pub assertions: AssertionSpec,
}

pub const DF_FIDELITY_FLOOR: f64 = 1.0 - 1e-8;
pub const COLLECTIVE_LEAKAGE_CEILING: f64 = 1e-10;

impl ScenarioConfig {
    /// Defaults: seed 42, `d_B = 3`, `g = 1`, `ε = 1`, 50 points on `[0, 5]`.
    pub fn preset(scenario: Scenario) -> Self {
        let (n_qubits, j) = scenario
            .shape()
            .unwrap_or((3, Some(HalfInt::from_twice(1))));
        let hamiltonian = match scenario {
            Scenario::TwoQubitPi => SystemHamiltonianSpec {
                epsilon: 0.0,
                exchange: Vec::new(),
                alpha: vec![0.7, -0.4, 1.0],
                beta: vec![0.5, 0.3, -0.8],
            },
            _ => SystemHamiltonianSpec {
                epsilon: 1.0,
                ..Default::default()
            },
        };
        let assertions = match scenario {
            s if s.is_df_claim() => AssertionSpec {
                min_df_fidelity: Some(DF_FIDELITY_FLOOR),
                max_leakage: Some(COLLECTIVE_LEAKAGE_CEILING),
                system_purity_below: (s == Scenario::ThreeQubitJ12).then_some(0.999),
                ..Default::default()
            },
            Scenario::NegativeControlSingleQubit => AssertionSpec {
                system_purity_below: Some(0.9),
                ..Default::default()
            },
            _ => AssertionSpec {
                leakage_target: Some(0.5),
                leakage_target_tol: Some(1e-8),
                ..Default::default()
            },
        };
        Self {
            scenario,
            universe: UniverseConfig {
                n_qubits,
                j,
                d_b: 3,
                seed: 42,
                coupling_strength: 1.0,
                mixed_bath: false,
            },
            hamiltonian,
            schedule: Schedule {
                t_max: 5.0,
                steps: 50,
            },
            initial: InitialConfig {
                superpose: (scenario == Scenario::NegativeControlSuperposition)
                    .then_some(HalfInt::from_twice(3)),
                ..Default::default()
            },
            assertions,
        }
    }

    /// Parse a TOML config; absent keys take the scenario preset values.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let scenario: Scenario = raw
            .scenario
            .parse()
            .map_err(|e: Error| Error::Config(e.to_string()))?;
        let mut cfg = Self::preset(scenario);
        let u = raw.universe;
        if let Some(n) = u.n_qubits {
            cfg.universe.n_qubits = n;
        }
        if let Some(j) = u.j {
            cfg.universe.j = Some(j);
        }
        if let Some(d) = u.d_b {
            cfg.universe.d_b = d;
        }
        if let Some(s) = u.seed {
            cfg.universe.seed = s;
        }
        if let Some(g) = u.coupling_strength {
            cfg.universe.coupling_strength = g;
        }
        if let Some(m) = u.mixed_bath {
            cfg.universe.mixed_bath = m;
        }
        let h = raw.hamiltonian;
        if let Some(e) = h.epsilon {
            cfg.hamiltonian.epsilon = e;
        }
        if let Some(x) = h.exchange {
            cfg.hamiltonian.exchange = x;
        }
        if let Some(a) = h.alpha {
            cfg.hamiltonian.alpha = a;
        }
        if let Some(b) = h.beta {
            cfg.hamiltonian.beta = b;
        }
        if let Some(t) = raw.schedule.t_max {
            cfg.schedule.t_max = t;
        }
        if let Some(s) = raw.schedule.steps {
            cfg.schedule.steps = s;
        }
        if let Some(init) = raw.initial {
            cfg.initial.df = init.df.or(cfg.initial.df);
            cfg.initial.gauge = init.gauge.or(cfg.initial.gauge);
            cfg.initial.superpose = init.superpose.or(cfg.initial.superpose);
        }
        if let Some(a) = raw.assertions {
            cfg.assertions = a;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if let Some((n, j)) = self.scenario.shape() {
            if self.universe.n_qubits != n || self.universe.j != j {
                return bad(format!(
                    "scenario '{}' fixes n_qubits = {n} and j = {}",
                    self.scenario,
                    j.map_or("none".to_string(), |j| j.to_string())
                ));
            }
        } else if self.universe.j.is_none() {
            return bad("scenario 'collective' needs universe.j".into());
        }
        if self.universe.d_b < 2 {
            return bad(format!(
                "universe.d_b = {} must be at least 2",
                self.universe.d_b
            ));
        }
        if !self.universe.coupling_strength.is_finite() || self.universe.coupling_strength < 0.0 {
            return bad("universe.coupling_strength must be finite and non-negative".into());
        }
        if !self.schedule.t_max.is_finite() || self.schedule.t_max < 0.0 {
            return bad("schedule.t_max must be finite and non-negative".into());
        }
        if self.schedule.steps == 0 {
            return bad("schedule.steps must be positive".into());
        }
        let h = &self.hamiltonian;
        if ![h.epsilon]
            .iter()
            .chain(&h.alpha)
            .chain(&h.beta)
            .all(|x| x.is_finite())
            || !h.exchange.iter().all(|x| x.strength.is_finite())
        {
            return bad("hamiltonian coefficients must be finite".into());
        }
        Ok(())
    }

    pub fn model(&self) -> ErrorModel {
        match (self.scenario, self.universe.j) {
            (Scenario::TwoQubitPi, _) => ErrorModel::TwoQubitTau,
            (_, Some(j)) => ErrorModel::Collective { j },
            (_, None) => unreachable!("validated configs carry j"),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    scenario: String,
    #[serde(default)]
    universe: RawUniverse,
    #[serde(default)]
    hamiltonian: RawHamiltonian,
    #[serde(default)]
    schedule: RawSchedule,
    initial: Option<InitialConfig>,
    assertions: Option<AssertionSpec>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUniverse {
    n_qubits: Option<usize>,
    j: Option<HalfInt>,
    d_b: Option<usize>,
    seed: Option<u64>,
    coupling_strength: Option<f64>,
    mixed_bath: Option<bool>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    epsilon: Option<f64>,
    exchange: Option<Vec<ExchangeTerm>>,
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
}

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    t_max: Option<f64>,
    steps: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSeries {
    pub j: HalfInt,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySummary {
    pub min_df_fidelity: f64,
    pub min_df_purity: f64,
    pub min_system_purity: f64,
    pub max_leakage: f64,
    pub max_bath_entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub threshold: f64,
    pub observed: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub scenario: Scenario,
    pub fidelity_convention: String,
    pub config: ScenarioConfig,
    pub universe_dim: usize,
    pub df_dim: usize,
    pub times: Vec<f64>,
    pub df_fidelity: Vec<f64>,
    pub df_purity: Vec<f64>,
    pub system_purity: Vec<f64>,
    pub leakage: Vec<f64>,
    /// Entanglement entropy between system and environment, in nats.
    pub bath_entropy: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sector_weights: Option<Vec<SectorSeries>>,
    /// Frobenius norm of the block of `ρ_S` between the working and the
    /// superposed eigenspace.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sector_coherence: Option<Vec<f64>>,
    pub summary: TrajectorySummary,
    pub assertions: Vec<AssertionOutcome>,
    pub passed: bool,
}

pub const CSV_HEADER: &str = "t,df_fidelity,df_purity,system_purity,leakage,bath_entropy";

impl TrajectoryReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for k in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.times[k],
                self.df_fidelity[k],
                self.df_purity[k],
                self.system_purity[k],
                self.leakage[k],
                self.bath_entropy[k]
            ));
        }
        out
    }
}

fn amplitudes(v: &[[f64; 2]], dim: usize, what: &str) -> Result<CVector> {
    if v.len() != dim {
        return Err(Error::Config(format!(
            "initial.{what} needs {dim} amplitudes, got {}",
            v.len()
        )));
    }
    linalg::normalized(&CVector::from_iterator(
        dim,
        v.iter().map(|&[re, im]| C64::new(re, im)),
    ))
    .map_err(|e| Error::Config(format!("initial.{what}: {e}")))
}

/// Default DF state: amplitudes `(k+1) e^{0.7ik}`, normalized.
fn default_df_state(dim: usize) -> CVector {
    let v = CVector::from_fn(dim, |k, _| C64::from_polar(k as f64 + 1.0, 0.7 * k as f64));
    linalg::normalized(&v).expect("nonzero")
}

/// Default irrep-factor state: uniform superposition of the `m` states.
fn default_gauge_state(dim: usize) -> CVector {
    CVector::from_element(dim, C64::from(1.0 / (dim as f64).sqrt()))
}

pub fn initial_system_state(cfg: &ScenarioConfig, u: &UniverseModel) -> Result<CVector> {
    let f = &u.factored;
    let a = match &cfg.initial.df {
        Some(v) => amplitudes(v, f.left_dim, "df")?,
        None => default_df_state(f.left_dim),
    };
    let b = match &cfg.initial.gauge {
        Some(v) => amplitudes(v, f.right_dim, "gauge")?,
        None => default_gauge_state(f.right_dim),
    };
    let inside = f.product_vector(&a, &b)?;
    let Some(other) = cfg.initial.superpose else {
        return Ok(inside);
    };
    let d = u
        .decomposition
        .as_ref()
        .ok_or_else(|| Error::Config("initial.superpose needs a collective error model".into()))?;
    if Some(other) == u.model.working_sector() {
        return Err(Error::Config(
            "initial.superpose must differ from the working j".into(),
        ));
    }
    let block = d.block(other).map_err(|e| Error::Config(e.to_string()))?;
    let outside = block.vector(0, 0);
    Ok((inside + outside) / C64::from(2f64.sqrt()))
}

/// Build, evolve and measure one configured run.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<TrajectoryReport> {
    cfg.validate()?;
    let model = cfg.model();
    let n = cfg.universe.n_qubits;
    let n_err = model.error_generators(n)?.len();
    let bath = BathSpec::random(
        cfg.universe.d_b,
        n_err,
        cfg.universe.coupling_strength,
        cfg.universe.seed,
        cfg.universe.mixed_bath,
    )?;
    let u = build_universe(n, bath, &cfg.hamiltonian, model)?;
    let psi_s = initial_system_state(cfg, &u)?;
    let psi0 = u.product_state(&psi_s)?;
    let times = cfg.schedule.times();
    let states = evolve(&u, &psi0, &times)?;

    let first = df_reduce(&psi0, &u)?;
    let predicted = unitary_prediction(&first.rho_df, &u, &times)?;

    let projectors: Vec<(HalfInt, CMatrix)> = u
        .decomposition
        .as_ref()
        .map(|d| {
            d.blocks
                .iter()
                .map(|b| (b.j, b.projector.matrix().clone()))
                .collect()
        })
        .unwrap_or_default();
    let coherence_pair = cfg.initial.superpose.and_then(|other| {
        let p = |j: HalfInt| {
            projectors
                .iter()
                .find(|(k, _)| *k == j)
                .map(|(_, p)| p.clone())
        };
        Some((p(model.working_sector()?)?, p(other)?))
    });

    let mut df_fidelity = Vec::with_capacity(times.len());
    let mut df_purity = Vec::with_capacity(times.len());
    let mut system_purity = Vec::with_capacity(times.len());
    let mut leakage = Vec::with_capacity(times.len());
    let mut bath_entropy = Vec::with_capacity(times.len());
    let mut weights = vec![Vec::with_capacity(times.len()); projectors.len()];
    let mut coherence = Vec::new();
    for (psi, pred) in states.iter().zip(&predicted) {
        let r = df_reduce(psi, &u)?;
        df_fidelity.push(linalg::fidelity(&r.rho_df, pred));
        df_purity.push(linalg::purity(&r.rho_df));
        system_purity.push(linalg::purity(&r.rho_system));
        leakage.push(r.leakage);
        // the universe is pure, so S(ρ_B) = S(ρ_S)
        bath_entropy.push(linalg::von_neumann_entropy(&r.rho_system).max(0.0));
        for (w, (_, p)) in weights.iter_mut().zip(&projectors) {
            w.push(linalg::trace(&(p * &r.rho_system)).re);
        }
        if let Some((pa, pb)) = &coherence_pair {
            coherence.push((pa * &r.rho_system * pb).norm());
        }
    }

    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let summary = TrajectorySummary {
        min_df_fidelity: min(&df_fidelity),
        min_df_purity: min(&df_purity),
        min_system_purity: min(&system_purity),
        max_leakage: max(&leakage),
        max_bath_entropy: max(&bath_entropy),
    };

    let a = &cfg.assertions;
    let mut assertions = Vec::new();
    if let Some(floor) = a.min_df_fidelity {
        assertions.push(AssertionOutcome {
            name: "min_df_fidelity".into(),
            threshold: floor,
            observed: summary.min_df_fidelity,
            passed: summary.min_df_fidelity >= floor,
        });
    }
    if let Some(ceiling) = a.max_leakage {
        assertions.push(AssertionOutcome {
            name: "max_leakage".into(),
            threshold: ceiling,
            observed: summary.max_leakage,
            passed: summary.max_leakage <= ceiling,
        });
    }
    if let Some(below) = a.system_purity_below {
        assertions.push(AssertionOutcome {
            name: "system_purity_below".into(),
            threshold: below,
            observed: summary.min_system_purity,
            passed: summary.min_system_purity < below,
        });
    }
    if let Some(target) = a.leakage_target {
        let tol = a.leakage_target_tol.unwrap_or(1e-8);
        let worst = leakage
            .iter()
            .map(|l| (l - target).abs())
            .fold(0.0, f64::max);
        assertions.push(AssertionOutcome {
            name: "leakage_target".into(),
            threshold: tol,
            observed: worst,
            passed: worst <= tol,
        });
    }
    let passed = assertions.iter().all(|a| a.passed);

    Ok(TrajectoryReport {
        scenario: cfg.scenario,
        fidelity_convention: FIDELITY_CONVENTION.into(),
        config: cfg.clone(),
        universe_dim: u.dim(),
        df_dim: u.factored.left_dim,
        times,
        df_fidelity,
        df_purity,
        system_purity,
        leakage,
        bath_entropy,
        sector_weights: (!projectors.is_empty()).then(|| {
            projectors
                .iter()
                .zip(weights)
                .map(|((j, _), weights)| SectorSeries { j: *j, weights })
                .collect()
        }),
        sector_coherence: coherence_pair.map(|_| coherence),
        summary,
        assertions,
        passed,
    })
}

pub fn run_preset(scenario: Scenario) -> Result<TrajectoryReport> {
    run_scenario(&ScenarioConfig::preset(scenario))
}
