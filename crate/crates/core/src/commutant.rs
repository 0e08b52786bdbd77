//! Decoherence-free algebras: commutants of error generators and the
//! explicit invariant-operator generators for two, three and four qubits.
//!
//! Generator formulas are realized exactly as written, signs and
//! normalizations included. [`verify_relations`] measures how well a set
//! satisfies `[τ_i, τ_j] = 2i ε_ijk τ_k`, a constant Casimir and the DF
//! condition. It reports the numbers and never adjusts a generator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen, C64};
use crate::pauli::{
    anticommutator, commutator, embed_site, sigma, Operator, PauliString, Tolerances,
};
use crate::spin::{decompose, factorize, total_spin, FactoredSpace, HalfInt};

/// Singular values below this are treated as zero in commutant solves.
pub const COMMUTANT_TOL: f64 = 1e-9;

/// `ε_ijk` for 0-based indices.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Relations a generator set is claimed to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClaimedRelations {
    pub casimir: f64,
    /// `{τ_i, τ_j} = 2δ_ij`.
    pub pauli_anticommutation: bool,
}

#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub name: String,
    /// Ambient-space operators.
    pub generators: Vec<(String, Operator)>,
    pub ambient_dim: usize,
    /// When set, relations are checked on `V† G V`.
    pub restriction: Option<FactoredSpace>,
    /// Operators every generator must commute with (the DF condition).
    pub invariant_under: Vec<(String, Operator)>,
    pub claimed: ClaimedRelations,
}

impl GeneratorSet {
    pub fn new(
        name: impl Into<String>,
        generators: Vec<(String, Operator)>,
        claimed: ClaimedRelations,
    ) -> Result<Self> {
        let ambient_dim = generators
            .first()
            .map(|g| g.1.dim())
            .ok_or_else(|| Error::InvalidArgument("generator set is empty".into()))?;
        for (label, g) in &generators {
            if g.dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    left: g.dim(),
                    right: ambient_dim,
                });
            }
            if !g.is_hermitian(Tolerances::default().structural) {
                return Err(Error::ContractViolation(format!(
                    "generator {label} is not Hermitian"
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            generators,
            ambient_dim,
            restriction: None,
            invariant_under: Vec::new(),
            claimed,
        })
    }

    pub fn restricted_to(mut self, space: FactoredSpace) -> Result<Self> {
        if space.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                left: space.ambient_dim(),
                right: self.ambient_dim,
            });
        }
        self.restriction = Some(space);
        Ok(self)
    }

    pub fn invariant_under(mut self, ops: Vec<(String, Operator)>) -> Self {
        self.invariant_under = ops;
        self
    }

    fn compress(&self, op: &Operator) -> Operator {
        match &self.restriction {
            Some(f) => f.compress(op),
            None => op.clone(),
        }
    }

    /// Generators in working coordinates.
    pub fn working_generators(&self) -> Vec<Operator> {
        self.generators
            .iter()
            .map(|(_, g)| self.compress(g))
            .collect()
    }

    pub fn working_invariants(&self) -> Vec<Operator> {
        self.invariant_under
            .iter()
            .map(|(_, g)| self.compress(g))
            .collect()
    }

    pub fn working_dim(&self) -> usize {
        self.restriction
            .as_ref()
            .map_or(self.ambient_dim, FactoredSpace::factored_dim)
    }

    /// Collective spin components `S₁, S₂, S₃` on `n_qubits`.
    pub fn collective_spin(n_qubits: usize) -> Result<Self> {
        let s = total_spin(n_qubits)?;
        Self::new(
            format!("collective-spin-{n_qubits}"),
            vec![
                ("S1".into(), s.s1.clone()),
                ("S2".into(), s.s2.clone()),
                ("S3".into(), s.s3.clone()),
            ],
            ClaimedRelations {
                casimir: 0.0,
                pauli_anticommutation: false,
            },
        )
    }

    /// Operators built from Pauli strings.
    pub fn from_pauli_strings(name: impl Into<String>, strings: &[PauliString]) -> Result<Self> {
        let gens = strings
            .iter()
            .map(|p| (p.to_string(), crate::pauli::realize(p)))
            .collect();
        Self::new(
            name,
            gens,
            ClaimedRelations {
                casimir: 0.0,
                pauli_anticommutation: false,
            },
        )
    }
}

fn pauli_pair(a: usize, b: usize) -> Operator {
    sigma(a).kron(&sigma(b))
}

fn labelled(prefix: &str, ops: [Operator; 3]) -> Vec<(String, Operator)> {
    ops.into_iter()
        .enumerate()
        .map(|(i, op)| {
            let l = format!("{prefix}{}", i + 1);
            (l.clone(), op.with_label(l))
        })
        .collect()
}

const SPIN_HALF: ClaimedRelations = ClaimedRelations {
    casimir: 3.0,
    pauli_anticommutation: true,
};

/// `π₁ = 1⊗σ₁, π₂ = σ₃⊗σ₂, π₃ = σ₃⊗σ₃` and
/// `τ₁ = σ₂⊗σ₁, τ₂ = σ₃⊗1, τ₃ = σ₁⊗σ₁`; each set is invariant under the
/// other.
pub fn two_qubit_pi_tau() -> (GeneratorSet, GeneratorSet) {
    let pi = labelled("pi", [pauli_pair(0, 1), pauli_pair(3, 2), pauli_pair(3, 3)]);
    let tau = labelled(
        "tau",
        [pauli_pair(2, 1), pauli_pair(3, 0), pauli_pair(1, 1)],
    );
    let pi_set = GeneratorSet::new("two-qubit-pi", pi.clone(), SPIN_HALF)
        .expect("valid generators")
        .invariant_under(tau.clone());
    let tau_set = GeneratorSet::new("two-qubit-tau", tau, SPIN_HALF)
        .expect("valid generators")
        .invariant_under(pi);
    (pi_set, tau_set)
}

/// A joint `(π₃, τ₃)` eigenvector in the product basis
/// `|1,1⟩, |1,−1⟩, |−1,1⟩, |−1,−1⟩`.
#[derive(Debug, Clone)]
pub struct BellVector {
    pub pi3: i8,
    pub tau3: i8,
    pub amplitudes: CVector,
}

/// The joint `(π₃, τ₃)` eigenbasis, ordered `(1,1), (1,−1), (−1,1), (−1,−1)`.
///
/// Found by diagonalizing `π₃ + 2τ₃`, whose four eigenvalues `j + 2k` are
/// distinct. The phase of each vector is fixed by making its first
/// non-negligible amplitude real and positive.
pub fn bell_identification() -> Vec<BellVector> {
    let (pi, tau) = two_qubit_pi_tau();
    let pi3 = &pi.generators[2].1;
    let tau3 = &tau.generators[2].1;
    let probe = pi3 + &(tau3 * 2.0);
    let eig = HermitianEigen::new(probe.matrix());
    let mut out = Vec::with_capacity(4);
    for (j, k) in [(1i8, 1i8), (1, -1), (-1, 1), (-1, -1)] {
        let target = (j + 2 * k) as f64;
        let col = eig
            .values
            .iter()
            .position(|&v| (v - target).abs() < 1e-6)
            .expect("π₃ + 2τ₃ has eigenvalues ±1, ±3");
        let mut v = eig.vectors.column(col).into_owned();
        let lead = v
            .iter()
            .find(|z| z.norm() > 1e-8)
            .copied()
            .expect("nonzero eigenvector");
        let phase = lead.conj() / C64::from(lead.norm());
        v *= phase;
        out.push(BellVector {
            pi3: j,
            tau3: k,
            amplitudes: v,
        });
    }
    out
}

/// The two-qubit space as `(π factor) ⊗ (τ factor)`, built from
/// [`bell_identification`].
pub fn bell_factorization() -> FactoredSpace {
    let cols: Vec<CVector> = bell_identification()
        .into_iter()
        .map(|b| b.amplitudes)
        .collect();
    FactoredSpace::from_isometry(None, 2, 2, CMatrix::from_columns(&cols))
        .expect("orthonormal Bell basis")
}

fn check_sites(sites: &[usize], n_qubits: usize) -> Result<()> {
    for (a, &s) in sites.iter().enumerate() {
        if s == 0 || s > n_qubits {
            return Err(Error::InvalidArgument(format!(
                "site {s} out of range 1..={n_qubits}"
            )));
        }
        if sites[..a].contains(&s) {
            return Err(Error::InvalidArgument(format!("site {s} repeated")));
        }
    }
    Ok(())
}

/// `b_jk = Σ_i σ_i^(j) σ_i^(k)` (sites 1-based), i.e. `4 S⃗^j·S⃗^k`.
pub fn bond_operator(j: usize, k: usize, n_qubits: usize) -> Result<Operator> {
    check_sites(&[j, k], n_qubits)?;
    let mut acc = Operator::zeros(1 << n_qubits);
    for i in 1..=3 {
        let a = embed_site(&sigma(i), j - 1, n_qubits)?;
        let b = embed_site(&sigma(i), k - 1, n_qubits)?;
        acc = &acc + &(&a * &b);
    }
    Ok(acc.with_label(format!("b{j}{k}")))
}

/// `E_jkl = Σ ε_abc σ_a^(j) σ_b^(k) σ_c^(l)` (sites 1-based), identity on the
/// remaining qubits.
pub fn epsilon_operator(sites: (usize, usize, usize), n_qubits: usize) -> Result<Operator> {
    let (j, k, l) = sites;
    check_sites(&[j, k, l], n_qubits)?;
    let mut acc = Operator::zeros(1 << n_qubits);
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let e = levi_civita(a, b, c);
                if e == 0.0 {
                    continue;
                }
                let term = &(&embed_site(&sigma(a + 1), j - 1, n_qubits)?
                    * &embed_site(&sigma(b + 1), k - 1, n_qubits)?)
                    * &embed_site(&sigma(c + 1), l - 1, n_qubits)?;
                acc = &acc + &(&term * e);
            }
        }
    }
    Ok(acc.with_label(format!("E{j}{k}{l}")))
}

fn collective_invariants(n_qubits: usize) -> Result<Vec<(String, Operator)>> {
    Ok(GeneratorSet::collective_spin(n_qubits)?.generators)
}

fn restricted_set(
    name: &str,
    n_qubits: usize,
    j: HalfInt,
    ops: [Operator; 3],
    claimed: ClaimedRelations,
) -> Result<GeneratorSet> {
    let d = decompose(&total_spin(n_qubits)?)?;
    let space = factorize(&d, j)?;
    GeneratorSet::new(name, labelled("tau", ops), claimed)?
        .restricted_to(space)
        .map(|g| g.invariant_under(collective_invariants(n_qubits).expect("valid N")))
}

/// Three qubits on `H_{1/2}`:
/// `τ₁ = (b₁₂ − b₂₃)/√12`, `τ₂ = E₁₂₃/√12`, `τ₃ = (b₂₃ − 2b₃₁ + b₁₂)/6`.
pub fn three_qubit_tau() -> Result<GeneratorSet> {
    let b = |j, k| bond_operator(j, k, 3);
    let r12 = 12f64.sqrt();
    let t1 = &(&b(1, 2)? - &b(2, 3)?) * (1.0 / r12);
    let t2 = &epsilon_operator((1, 2, 3), 3)? * (1.0 / r12);
    let t3 = &(&(&b(2, 3)? - &(&b(3, 1)? * 2.0)) + &b(1, 2)?) * (1.0 / 6.0);
    restricted_set(
        "three-qubit-j1/2",
        3,
        HalfInt::from_twice(1),
        [t1, t2, t3],
        SPIN_HALF,
    )
}

fn four_qubit_j0_first_two() -> Result<(Operator, Operator)> {
    let b = |j, k| bond_operator(j, k, 4);
    let e = |j, k, l| epsilon_operator((j, k, l), 4);
    let r3 = 3f64.sqrt();
    let t1 = &(&(&(&b(1, 4)? + &b(2, 3)?) - &b(1, 2)?) - &b(3, 4)?) * (1.0 / (4.0 * r3));
    let t2 =
        &(&(&(&e(2, 3, 4)? + &e(1, 2, 4)?) - &e(1, 3, 4)?) - &e(1, 2, 3)?) * (1.0 / (8.0 * r3));
    Ok((t1, t2))
}

/// Four qubits on `H₀`, as printed:
/// `τ₁ = (b₁₄ + b₂₃ − b₁₂ − b₃₄)/(4√3)`,
/// `τ₂ = (E₂₃₄ + E₁₂₄ − E₁₃₄ − E₁₂₃)/(8√3)`, `τ₃ = −(b₁₄ + b₁₂ + b₁₃)/3`.
///
/// On `H₀` the printed `τ₃` equals the identity, so this set does not close
/// under the su(2) relations; [`four_qubit_tau_j0_amended`] gives a set that
/// does.
pub fn four_qubit_tau_j0() -> Result<GeneratorSet> {
    let b = |j, k| bond_operator(j, k, 4);
    let (t1, t2) = four_qubit_j0_first_two()?;
    let t3 = &(&(&b(1, 4)? + &b(1, 2)?) + &b(1, 3)?) * (-1.0 / 3.0);
    restricted_set(
        "four-qubit-j0",
        4,
        HalfInt::from_twice(0),
        [t1, t2, t3],
        SPIN_HALF,
    )
}

/// `H₀` set with `τ₃ = (b₁₂ + b₁₄ − 2b₁₃)/6`, the combination fixed by
/// `[τ₁, τ₂] = 2iτ₃`; `τ₁, τ₂` as printed.
pub fn four_qubit_tau_j0_amended() -> Result<GeneratorSet> {
    let b = |j, k| bond_operator(j, k, 4);
    let (t1, t2) = four_qubit_j0_first_two()?;
    let t3 = &(&(&b(1, 2)? + &b(1, 4)?) - &(&b(1, 3)? * 2.0)) * (1.0 / 6.0);
    restricted_set(
        "four-qubit-j0-amended",
        4,
        HalfInt::from_twice(0),
        [t1, t2, t3],
        SPIN_HALF,
    )
}

fn four_qubit_j1_printed() -> Result<[Operator; 3]> {
    let e = |j, k, l| epsilon_operator((j, k, l), 4);
    let t1 = &e(1, 3, 4)? * (-1.0 / (2.0 * 3f64.sqrt()));
    let t2 = &(&e(1, 3, 4)? - &(&e(1, 2, 4)? * 3.0)) * (1.0 / (4.0 * 6f64.sqrt()));
    let t3 = &(&e(2, 3, 4)? + &e(1, 2, 3)?) * (1.0 / (4.0 * 2f64.sqrt()));
    Ok([t1, t2, t3])
}

const SPIN_ONE: ClaimedRelations = ClaimedRelations {
    casimir: 8.0,
    pauli_anticommutation: false,
};

/// Four qubits on the 9-dimensional `H₁`, as printed:
/// `τ₁ = E₁₃₄/(−2√3)`, `τ₂ = (E₁₃₄ − 3E₁₂₄)/(4√6)`,
/// `τ₃ = (E₂₃₄ + E₁₂₃)/(4√2)`.
///
/// Restricted to `H₁` each of these has spectrum `{−1, 0, 1}`, so the set is
/// a spin-1 representation at half the scale the relations require (Casimir
/// 2, not 8), and of opposite orientation.
pub fn four_qubit_tau_j1() -> Result<GeneratorSet> {
    restricted_set(
        "four-qubit-j1",
        4,
        HalfInt::from_twice(2),
        four_qubit_j1_printed()?,
        SPIN_ONE,
    )
}

/// `H₁` set scaled by `−2`, which satisfies `[τ_i, τ_j] = 2iε_ijk τ_k` with
/// Casimir 8.
pub fn four_qubit_tau_j1_amended() -> Result<GeneratorSet> {
    let ops = four_qubit_j1_printed()?.map(|t| &t * -2.0);
    restricted_set(
        "four-qubit-j1-amended",
        4,
        HalfInt::from_twice(2),
        ops,
        SPIN_ONE,
    )
}

/// A basis of `{X : [X, G] = 0 for every generator G}`.
#[derive(Debug, Clone)]
pub struct CommutantBasis {
    /// Elements in working coordinates (compressed when a subspace was given).
    pub basis: Vec<Operator>,
    pub dimension: usize,
    /// Working dimension the basis lives in.
    pub working_dim: usize,
    pub max_commutator_residual: f64,
}

/// Null space of the stacked maps `X ↦ [X, G_i]`, vectorized column-major.
///
/// With a subspace, the generators are compressed first and the commutant is
/// computed inside the subspace.
pub fn commutant(
    errors: &GeneratorSet,
    subspace: Option<&FactoredSpace>,
) -> Result<CommutantBasis> {
    let gens: Vec<Operator> = match subspace {
        Some(f) => {
            if f.ambient_dim() != errors.ambient_dim {
                return Err(Error::DimensionMismatch {
                    left: f.ambient_dim(),
                    right: errors.ambient_dim,
                });
            }
            errors
                .generators
                .iter()
                .map(|(_, g)| f.compress(g))
                .collect()
        }
        None => errors.generators.iter().map(|(_, g)| g.clone()).collect(),
    };
    let d = gens[0].dim();
    let id = CMatrix::identity(d, d);
    let d2 = d * d;
    let mut stacked = CMatrix::zeros(gens.len() * d2, d2);
    for (i, g) in gens.iter().enumerate() {
        // vec(GX − XG) = (1 ⊗ G − Gᵀ ⊗ 1) vec(X)
        let block = id.kronecker(g.matrix()) - g.matrix().transpose().kronecker(&id);
        stacked.view_mut((i * d2, 0), (d2, d2)).copy_from(&block);
    }
    let kernel = linalg::null_space(&stacked, COMMUTANT_TOL);
    let basis: Vec<Operator> = kernel
        .column_iter()
        .map(|c| Operator::from_mat(linalg::unvectorize(&c.into_owned(), d)))
        .collect();
    let mut residual = 0.0_f64;
    for x in &basis {
        for g in &gens {
            residual = residual.max(commutator(x, g)?.max_norm());
        }
    }
    Ok(CommutantBasis {
        dimension: basis.len(),
        basis,
        working_dim: d,
        max_commutator_residual: residual,
    })
}

/// Measured relation deviations for a generator set (max-entry norms).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub set_name: String,
    pub working_dim: usize,
    /// `max_{i,j} |[τ_i, τ_j] − 2i Σ_k ε_ijk τ_k|`.
    pub max_su2_violation: f64,
    /// `tr(Σ τ_i²) / dim`.
    pub casimir_value: f64,
    pub claimed_casimir: f64,
    /// `|Σ τ_i² − c·1|` with `c` the fitted value.
    pub casimir_deviation: f64,
    /// `max |[τ_i, X]|` over the invariance operators; `None` if there are none.
    pub df_condition_violation: Option<f64>,
    /// `max |{τ_i, τ_j} − 2δ_ij|`, reported when the set claims Pauli-type
    /// anticommutation.
    pub anticommutator_deviation: Option<f64>,
}

impl RelationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_su2_violation <= tol
            && self.casimir_deviation <= tol
            && (self.casimir_value - self.claimed_casimir).abs() <= tol
            && self.df_condition_violation.is_none_or(|v| v <= tol)
            && self.anticommutator_deviation.is_none_or(|v| v <= tol)
    }
}

pub fn verify_relations(g: &GeneratorSet) -> Result<RelationReport> {
    let t = g.working_generators();
    if t.len() != 3 {
        return Err(Error::InvalidArgument(format!(
            "su(2) check needs three generators, {} has {}",
            g.name,
            t.len()
        )));
    }
    let dim = t[0].dim();
    let two_i = C64::new(0.0, 2.0);
    let mut su2 = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let mut rhs = Operator::zeros(dim);
            for (k, tk) in t.iter().enumerate() {
                let e = levi_civita(i, j, k);
                if e != 0.0 {
                    rhs = &rhs + &tk.scale(two_i * e);
                }
            }
            su2 = su2.max((&commutator(&t[i], &t[j])? - &rhs).max_norm());
        }
    }
    let casimir = t
        .iter()
        .fold(Operator::zeros(dim), |acc, x| &acc + &(x * x));
    let c = casimir.trace().re / dim as f64;
    let casimir_deviation = (&casimir - &(&Operator::identity(dim) * c)).max_norm();

    let invariants = g.working_invariants();
    let df = if invariants.is_empty() {
        None
    } else {
        let mut v = 0.0_f64;
        for x in &t {
            for s in &invariants {
                v = v.max(commutator(x, s)?.max_norm());
            }
        }
        Some(v)
    };

    let anti = if g.claimed.pauli_anticommutation {
        let mut v = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 2.0 } else { 0.0 };
                let dev = &anticommutator(&t[i], &t[j])? - &(&Operator::identity(dim) * expected);
                v = v.max(dev.max_norm());
            }
        }
        Some(v)
    } else {
        None
    };

    Ok(RelationReport {
        set_name: g.name.clone(),
        working_dim: dim,
        max_su2_violation: su2,
        casimir_value: c,
        claimed_casimir: g.claimed.casimir,
        casimir_deviation,
        df_condition_violation: df,
        anticommutator_deviation: anti,
    })
}

/// Every named generator set, paper formulas first.
pub fn named_generator_set(name: &str) -> Result<Vec<GeneratorSet>> {
    Ok(match name {
        "two-qubit" => {
            let (p, t) = two_qubit_pi_tau();
            vec![p, t]
        }
        "three-qubit" => vec![three_qubit_tau()?],
        "four-qubit-j0" => vec![four_qubit_tau_j0()?],
        "four-qubit-j1" => vec![four_qubit_tau_j1()?],
        "four-qubit-j0-amended" => vec![four_qubit_tau_j0_amended()?],
        "four-qubit-j1-amended" => vec![four_qubit_tau_j1_amended()?],
        other => {
            return Err(Error::NotFound(format!("no generator set named '{other}'")));
        }
    })
}
