//! Total pseudospin of an `N`-qubit array and the Clebsch–Gordan split of
//! its state space into `S²` eigenspaces `C^{n_j} ⊗ D_j`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen, C64};
use crate::pauli::{embed_site, sigma, Operator};

pub const MAX_QUBITS: usize = 6;

/// Grouping tolerance for `S²` eigenvalues.
const CLUSTER_TOL: f64 = 1e-8;
/// Singular values below this count as kernel when finding highest weights.
const KERNEL_TOL: f64 = 1e-9;

/// Non-negative half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(u32);

impl HalfInt {
    pub const fn from_twice(twice: u32) -> Self {
        Self(twice)
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `2j + 1`.
    pub fn irrep_dim(self) -> usize {
        self.0 as usize + 1
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("'{s}' is not a non-negative half-integer"));
        let s = s.trim();
        match s.split_once('/') {
            Some((num, "2")) => num.trim().parse::<u32>().map(HalfInt).map_err(|_| bad()),
            Some(_) => Err(bad()),
            None => s.parse::<u32>().map(|v| HalfInt(2 * v)).map_err(|_| bad()),
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `S_i = ½ Σ_sites σ_i`, `S² = Σ S_i²` and `S₋ = S₁ − iS₂`.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub n_qubits: usize,
    pub s1: Operator,
    pub s2: Operator,
    pub s3: Operator,
    pub s_squared: Operator,
    pub s_minus: Operator,
}

impl SpinOperators {
    pub fn components(&self) -> [&Operator; 3] {
        [&self.s1, &self.s2, &self.s3]
    }

    pub fn s_plus(&self) -> Operator {
        self.s_minus.adjoint()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }
}

pub fn total_spin(n_qubits: usize) -> Result<SpinOperators> {
    if !(1..=MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::InvalidArgument(format!(
            "total_spin supports 1..={MAX_QUBITS} qubits, got {n_qubits}"
        )));
    }
    let component = |i: usize| -> Result<Operator> {
        let mut acc = Operator::zeros(1 << n_qubits);
        for site in 0..n_qubits {
            acc = &acc + &embed_site(&sigma(i), site, n_qubits)?;
        }
        Ok(&acc * 0.5)
    };
    let s1 = component(1)?.with_label("S1");
    let s2 = component(2)?.with_label("S2");
    let s3 = component(3)?.with_label("S3");
    let s_squared = (&(&(&s1 * &s1) + &(&s2 * &s2)) + &(&s3 * &s3)).with_label("S^2");
    let s_minus = (&s1 - &s2.scale(linalg::I)).with_label("S-");
    Ok(SpinOperators {
        n_qubits,
        s1,
        s2,
        s3,
        s_squared,
        s_minus,
    })
}

/// Standard spin-`j` matrices `(s₁, s₂, s₃)` in the basis `m = j, j−1, …, −j`.
pub fn spin_matrices(j: HalfInt) -> [Operator; 3] {
    let d = j.irrep_dim();
    let jv = j.value();
    let m_of = |k: usize| jv - k as f64;
    // s₊|m⟩ = √(j(j+1) − m(m+1)) |m+1⟩; index k ↔ m = j − k
    let mut s_plus = CMatrix::zeros(d, d);
    for k in 1..d {
        let m = m_of(k);
        s_plus[(k - 1, k)] = C64::from((jv * (jv + 1.0) - m * (m + 1.0)).sqrt());
    }
    let s_minus = s_plus.adjoint();
    let sx = (&s_plus + &s_minus).scale(0.5);
    let sy = (&s_plus - &s_minus).map(|z| z * C64::new(0.0, -0.5));
    let sz = CMatrix::from_diagonal(&CVector::from_iterator(
        d,
        (0..d).map(|k| C64::from(m_of(k))),
    ));
    [
        Operator::from_mat(sx),
        Operator::from_mat(sy),
        Operator::from_mat(sz),
    ]
}

/// One `S²` eigenspace `⊕_{k=1}^{n_j} D_j`.
#[derive(Debug, Clone)]
pub struct CGBlock {
    pub j: HalfInt,
    pub multiplicity: usize,
    /// Orthonormal `|k,m⟩`, ordered by copy `k` then `m` descending; the
    /// vector for `(k, m_index)` sits at `k * (2j+1) + m_index`.
    pub basis_vectors: Vec<CVector>,
    pub projector: Operator,
}

impl CGBlock {
    pub fn dimension(&self) -> usize {
        self.multiplicity * self.j.irrep_dim()
    }

    /// `|k, m⟩` with `m = j − m_index`.
    pub fn vector(&self, copy: usize, m_index: usize) -> &CVector {
        &self.basis_vectors[copy * self.j.irrep_dim() + m_index]
    }

    pub fn basis_matrix(&self) -> CMatrix {
        CMatrix::from_columns(&self.basis_vectors)
    }
}

#[derive(Debug, Clone)]
pub struct CGDecomposition {
    pub n_qubits: usize,
    /// One block per distinct `j`, largest `j` first.
    pub blocks: Vec<CGBlock>,
}

/// Row of the exported decomposition table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub j: HalfInt,
    pub multiplicity: usize,
    pub dimension: usize,
}

impl CGDecomposition {
    pub fn block(&self, j: HalfInt) -> Result<&CGBlock> {
        self.blocks.iter().find(|b| b.j == j).ok_or_else(|| {
            Error::NotFound(format!("j = {j} does not occur for N = {}", self.n_qubits))
        })
    }

    pub fn summary(&self) -> Vec<BlockSummary> {
        self.blocks
            .iter()
            .map(|b| BlockSummary {
                j: b.j,
                multiplicity: b.multiplicity,
                dimension: b.dimension(),
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }
}

/// Indices of computational basis states with `down` qubits in `σ₃ = −1`.
fn weight_space_indices(n_qubits: usize, down: u32) -> Vec<usize> {
    (0..1usize << n_qubits)
        .filter(|i| i.count_ones() == down)
        .collect()
}

/// Distinct `S²` eigenvalues with their degeneracies, clustered at 1e-8.
pub fn s_squared_spectrum(spins: &SpinOperators) -> Vec<(f64, usize)> {
    let eig = HermitianEigen::new(spins.s_squared.matrix());
    let mut clusters: Vec<(f64, usize)> = Vec::new();
    for &v in &eig.values {
        match clusters.last_mut() {
            Some((c, n)) if (v - *c).abs() < CLUSTER_TOL => {
                *c = (*c * *n as f64 + v) / (*n as f64 + 1.0);
                *n += 1;
            }
            _ => clusters.push((v, 1)),
        }
    }
    clusters
}

/// Clebsch–Gordan decomposition by highest weights.
///
/// For each `j` the highest-weight vectors are the kernel of `S₊` on the
/// `m = j` weight space; the rest of each copy is produced by repeated
/// lowering with `S₋`, normalizing every vector.
pub fn decompose(spins: &SpinOperators) -> Result<CGDecomposition> {
    let n = spins.n_qubits;
    let s_plus = spins.s_plus();
    let s_minus = spins.s_minus.matrix();
    let mut blocks = Vec::new();

    let mut twice_j = n as u32;
    loop {
        let j = HalfInt::from_twice(twice_j);
        let down = (n as u32 - twice_j) / 2;
        let idx = weight_space_indices(n, down);
        let restricted = CMatrix::from_columns(
            &idx.iter()
                .map(|&i| s_plus.matrix().column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        let kernel =
            linalg::orthonormalize_columns(&linalg::null_space(&restricted, KERNEL_TOL), 1e-12);
        let multiplicity = kernel.ncols();
        if multiplicity > 0 {
            let mut basis_vectors = Vec::with_capacity(multiplicity * j.irrep_dim());
            for k in 0..multiplicity {
                let mut v = CVector::zeros(spins.dim());
                for (row, &i) in idx.iter().enumerate() {
                    v[i] = kernel[(row, k)];
                }
                basis_vectors.push(v.clone());
                for _ in 1..j.irrep_dim() {
                    v = linalg::normalized(&(s_minus * &v)).map_err(|e| {
                        Error::Numerical(format!("lowering failed in j = {j} copy {k}: {e}"))
                    })?;
                    basis_vectors.push(v.clone());
                }
            }
            let b = CMatrix::from_columns(&basis_vectors);
            let projector = Operator::from_mat(&b * b.adjoint());
            blocks.push(CGBlock {
                j,
                multiplicity,
                basis_vectors,
                projector,
            });
        }
        if twice_j < 2 {
            break;
        }
        twice_j -= 2;
    }

    // Cross-check the highest-weight count against the S² spectrum.
    let spectrum = s_squared_spectrum(spins);
    for block in &blocks {
        let found = spectrum
            .iter()
            .find(|(v, _)| (v - block.j.casimir()).abs() < CLUSTER_TOL)
            .map(|&(_, deg)| deg);
        if found != Some(block.dimension()) {
            return Err(Error::Numerical(format!(
                "S^2 eigenspace for j = {} has degeneracy {:?}, highest weights imply {}",
                block.j,
                found,
                block.dimension()
            )));
        }
    }
    let total: usize = blocks.iter().map(CGBlock::dimension).sum();
    if total != spins.dim() {
        return Err(Error::Numerical(format!(
            "decomposition covers {total} of {} dimensions",
            spins.dim()
        )));
    }
    Ok(CGDecomposition {
        n_qubits: n,
        blocks,
    })
}

fn binomial(n: u64, k: i64) -> u64 {
    if k < 0 || k as u64 > n {
        return 0;
    }
    let k = (k as u64).min(n - k as u64);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Closed form `n_j = C(N, N/2 − j) − C(N, N/2 − j − 1)`.
pub fn multiplicity_formula(n_qubits: usize, j: HalfInt) -> Result<usize> {
    let n = n_qubits as u32;
    if j.twice() > n || !(n - j.twice()).is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "j = {j} is not admissible for N = {n_qubits}"
        )));
    }
    let k = ((n - j.twice()) / 2) as i64;
    Ok((binomial(n as u64, k) - binomial(n as u64, k - 1)) as usize)
}

/// Which tensor factor of a [`FactoredSpace`] is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Factor {
    /// The left factor `C^{n_j}` (carries the DF algebra).
    Multiplicity,
    /// The right factor `D_j` (carries the error algebra).
    Irrep,
}

/// An isometry `V : C^{left} ⊗ C^{right} → ambient` with `V|k⟩⊗|m⟩ = |k,m⟩`.
#[derive(Debug, Clone)]
pub struct FactoredSpace {
    pub j: Option<HalfInt>,
    pub left_dim: usize,
    pub right_dim: usize,
    pub isometry: CMatrix,
}

impl FactoredSpace {
    pub fn from_isometry(
        j: Option<HalfInt>,
        left_dim: usize,
        right_dim: usize,
        isometry: CMatrix,
    ) -> Result<Self> {
        if isometry.ncols() != left_dim * right_dim {
            return Err(Error::DimensionMismatch {
                left: isometry.ncols(),
                right: left_dim * right_dim,
            });
        }
        let gram = isometry.adjoint() * &isometry;
        let dev = linalg::max_abs(&(gram - CMatrix::identity(isometry.ncols(), isometry.ncols())));
        if dev > 1e-10 {
            return Err(Error::ContractViolation(format!(
                "columns are not orthonormal ({dev:e})"
            )));
        }
        Ok(Self {
            j,
            left_dim,
            right_dim,
            isometry,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.isometry.nrows()
    }

    pub fn factored_dim(&self) -> usize {
        self.left_dim * self.right_dim
    }

    pub fn factor_dim(&self, which: Factor) -> usize {
        match which {
            Factor::Multiplicity => self.left_dim,
            Factor::Irrep => self.right_dim,
        }
    }

    /// `V† O V`.
    pub fn compress(&self, op: &Operator) -> Operator {
        op.compress(&self.isometry)
    }

    /// `V O V†`.
    pub fn lift(&self, op: &Operator) -> Operator {
        Operator::from_mat(&self.isometry * op.matrix() * self.isometry.adjoint())
    }

    pub fn projector(&self) -> Operator {
        Operator::from_mat(&self.isometry * self.isometry.adjoint())
    }

    /// `V (left ⊗ right)` as an ambient vector.
    pub fn product_vector(&self, left: &CVector, right: &CVector) -> Result<CVector> {
        if left.len() != self.left_dim || right.len() != self.right_dim {
            return Err(Error::DimensionMismatch {
                left: left.len() * right.len(),
                right: self.factored_dim(),
            });
        }
        Ok(&self.isometry * left.kronecker(right))
    }

    /// Reduce a factored-coordinate density matrix to one factor.
    pub fn reduce(&self, rho_factored: &CMatrix, keep: Factor) -> CMatrix {
        match keep {
            Factor::Multiplicity => {
                linalg::partial_trace_right(rho_factored, self.left_dim, self.right_dim)
            }
            Factor::Irrep => {
                linalg::partial_trace_left(rho_factored, self.left_dim, self.right_dim)
            }
        }
    }
}

/// Isometry for the `j` block, columns in `(k, m descending)` order.
pub fn factorize(d: &CGDecomposition, j: HalfInt) -> Result<FactoredSpace> {
    let block = d.block(j)?;
    FactoredSpace::from_isometry(
        Some(j),
        block.multiplicity,
        j.irrep_dim(),
        block.basis_matrix(),
    )
}

/// Split of a factored-coordinate operator as `1 ⊗ Q` plus residual.
#[derive(Debug, Clone)]
pub struct BlockAction {
    pub j: HalfInt,
    /// The `Q` factor acting on `D_j`.
    pub irrep_factor: Operator,
    /// `max |V†UV − 1 ⊗ Q|`.
    pub deviation: f64,
    /// `max |V†UV V†U†V − 1|`; nonzero when `U` does not preserve the block.
    pub unitarity_defect: f64,
}

/// For a collective unitary `U`, checks that each block sees `U` as
/// `1_{n_j} ⊗ Q`.
pub fn conjugation_action_check(d: &CGDecomposition, u: &Operator) -> Result<Vec<BlockAction>> {
    if u.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: d.dim(),
        });
    }
    d.blocks
        .iter()
        .map(|b| {
            let f = factorize(d, b.j)?;
            let w = f.compress(u);
            let q = linalg::partial_trace_left(w.matrix(), f.left_dim, f.right_dim)
                .map(|z| z / C64::from(f.left_dim as f64));
            let expected = CMatrix::identity(f.left_dim, f.left_dim).kronecker(&q);
            let deviation = linalg::max_abs(&(w.matrix() - expected));
            let n = w.dim();
            let unitarity_defect =
                linalg::max_abs(&(w.matrix() * w.matrix().adjoint() - CMatrix::identity(n, n)));
            Ok(BlockAction {
                j: b.j,
                irrep_factor: Operator::from_mat(q),
                deviation,
                unitarity_defect,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{commutator, matrix_exponential};

    fn h(twice: u32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    #[test]
    fn half_int_text_form() {
        assert_eq!(h(3).to_string(), "3/2");
        assert_eq!(h(2).to_string(), "1");
        assert_eq!(h(0).to_string(), "0");
        assert_eq!("1/2".parse::<HalfInt>().unwrap(), h(1));
        assert_eq!("2".parse::<HalfInt>().unwrap(), h(4));
        assert_eq!("4/2".parse::<HalfInt>().unwrap(), h(4));
        assert!("1/3".parse::<HalfInt>().is_err());
        assert!("-1".parse::<HalfInt>().is_err());
    }

    #[test]
    fn single_spin_casimir() {
        let s = total_spin(1).unwrap();
        assert!(s.s_squared.max_distance(&(&Operator::identity(2) * 0.75)) < 1e-15);
    }

    #[test]
    fn total_spin_range() {
        assert!(total_spin(0).is_err());
        assert!(total_spin(7).is_err());
    }

    #[test]
    fn two_qubit_spectrum() {
        let spec = s_squared_spectrum(&total_spin(2).unwrap());
        assert_eq!(spec.len(), 2);
        assert!(spec[0].0.abs() < 1e-12 && spec[0].1 == 1);
        assert!((spec[1].0 - 2.0).abs() < 1e-12 && spec[1].1 == 3);
    }

    #[test]
    fn three_qubit_spectrum() {
        let spec = s_squared_spectrum(&total_spin(3).unwrap());
        let values: Vec<f64> = spec.iter().map(|s| s.0).collect();
        assert!((values[0] - 0.75).abs() < 1e-12);
        assert!((values[1] - 3.75).abs() < 1e-12);
    }

    #[test]
    fn spin_operator_relations() {
        for n in 1..=4 {
            let s = total_spin(n).unwrap();
            let c = s.components();
            for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                let lhs = commutator(c[a], c[b]).unwrap();
                assert!(lhs.max_distance(&c[k].scale(linalg::I)) < 1e-12);
                assert!(commutator(&s.s_squared, c[a]).unwrap().max_norm() < 1e-12);
            }
        }
    }

    fn block_list(n: usize) -> Vec<(u32, usize)> {
        decompose(&total_spin(n).unwrap())
            .unwrap()
            .blocks
            .iter()
            .map(|b| (b.j.twice(), b.multiplicity))
            .collect()
    }

    #[test]
    fn small_decompositions() {
        assert_eq!(block_list(1), vec![(1, 1)]);
        assert_eq!(block_list(2), vec![(2, 1), (0, 1)]);
        assert_eq!(block_list(3), vec![(3, 1), (1, 2)]);
        assert_eq!(block_list(4), vec![(4, 1), (2, 3), (0, 2)]);
    }

    #[test]
    fn multiplicities_from_formula() {
        assert_eq!(multiplicity_formula(3, h(1)).unwrap(), 2);
        assert_eq!(multiplicity_formula(4, h(2)).unwrap(), 3);
        assert_eq!(multiplicity_formula(5, h(3)).unwrap(), 4);
        assert!(multiplicity_formula(4, h(1)).is_err());
        assert!(multiplicity_formula(2, h(6)).is_err());
    }

    #[test]
    fn block_vectors_are_joint_eigenvectors() {
        for n in 1..=5 {
            let s = total_spin(n).unwrap();
            let d = decompose(&s).unwrap();
            let mut proj_sum = CMatrix::zeros(d.dim(), d.dim());
            for b in &d.blocks {
                for k in 0..b.multiplicity {
                    for mi in 0..b.j.irrep_dim() {
                        let v = b.vector(k, mi);
                        let m = b.j.value() - mi as f64;
                        let s2v = s.s_squared.matrix() * v - v * C64::from(b.j.casimir());
                        let s3v = s.s3.matrix() * v - v * C64::from(m);
                        assert!(linalg::max_abs_vec(&s2v) < 1e-10);
                        assert!(linalg::max_abs_vec(&s3v) < 1e-10);
                    }
                }
                let bm = b.basis_matrix();
                let gram = bm.adjoint() * &bm;
                assert!(
                    linalg::max_abs(&(gram - CMatrix::identity(b.dimension(), b.dimension())))
                        < 1e-10
                );
                // projector·S²·projector = j(j+1)·projector
                let p = b.projector.matrix();
                let lhs = p * s.s_squared.matrix() * p;
                assert!(linalg::max_abs(&(lhs - p.map(|z| z * b.j.casimir()))) < 1e-10);
                proj_sum += p;
            }
            assert!(linalg::max_abs(&(proj_sum - CMatrix::identity(d.dim(), d.dim()))) < 1e-10);
        }
    }

    #[test]
    fn factorization_shapes() {
        let d3 = decompose(&total_spin(3).unwrap()).unwrap();
        let f = factorize(&d3, h(1)).unwrap();
        assert_eq!((f.isometry.nrows(), f.isometry.ncols()), (8, 4));
        let d4 = decompose(&total_spin(4).unwrap()).unwrap();
        let f = factorize(&d4, h(2)).unwrap();
        assert_eq!((f.isometry.nrows(), f.isometry.ncols()), (16, 9));
        let f = factorize(&d4, h(0)).unwrap();
        assert_eq!((f.isometry.nrows(), f.isometry.ncols()), (16, 2));
        assert_eq!(f.right_dim, 1);
        assert!(matches!(factorize(&d4, h(1)), Err(Error::NotFound(_))));
    }

    #[test]
    fn factorization_intertwines_spin() {
        for n in 2..=5 {
            let s = total_spin(n).unwrap();
            let d = decompose(&s).unwrap();
            for b in &d.blocks {
                let f = factorize(&d, b.j).unwrap();
                let local = spin_matrices(b.j);
                for (i, si) in s.components().iter().enumerate() {
                    let expected = Operator::identity(f.left_dim).kron(&local[i]);
                    assert!(
                        f.compress(si).max_distance(&expected) < 1e-9,
                        "N={n} j={} i={i}",
                        b.j
                    );
                }
            }
        }
    }

    #[test]
    fn collective_rotation_acts_on_irrep_factor() {
        let s = total_spin(3).unwrap();
        let d = decompose(&s).unwrap();
        let u = matrix_exponential(&s.s3, 0.9).unwrap();
        let actions = conjugation_action_check(&d, &u).unwrap();
        let half = actions.iter().find(|a| a.j == h(1)).unwrap();
        assert!(half.deviation < 1e-9);
        let q = half.irrep_factor.matrix();
        assert!((q[(0, 0)] - C64::from_polar(1.0, -0.45)).norm() < 1e-12);
        assert!((q[(1, 1)] - C64::from_polar(1.0, 0.45)).norm() < 1e-12);
        assert!(q[(0, 1)].norm() < 1e-12);

        let id = matrix_exponential(&s.s1, 0.0).unwrap();
        for a in conjugation_action_check(&d, &id).unwrap() {
            assert!(a.deviation < 1e-12);
            assert!(
                a.irrep_factor
                    .max_distance(&Operator::identity(a.j.irrep_dim()))
                    < 1e-12
            );
        }

        let s4 = total_spin(4).unwrap();
        let d4 = decompose(&s4).unwrap();
        for (i, si) in s4.components().iter().enumerate() {
            let u = matrix_exponential(si, 0.3 + i as f64).unwrap();
            for a in conjugation_action_check(&d4, &u).unwrap() {
                assert!(a.deviation < 1e-9);
                assert!(a.unitarity_defect < 1e-9);
                if a.j == h(0) {
                    assert!((a.irrep_factor.matrix()[(0, 0)] - linalg::ONE).norm() < 1e-12);
                }
            }
        }
    }
}
