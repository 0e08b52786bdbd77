//! Dense operators built from Pauli strings.
//!
//! Qubit ordering: in an `N`-qubit operator, qubit 1 is the leftmost tensor
//! factor and owns the most significant bit of the basis index. Basis state
//! `0` of a single qubit is the `σ₃ = +1` eigenvector. Every module in the
//! crate relies on this convention.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianEigen, C64, I, ONE, ZERO};

/// Tolerances used by structural and algebraic checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Hermiticity and unitarity checks.
    pub structural: f64,
    /// Algebraic identities, max-entry norm.
    pub algebraic: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: 1e-10,
            algebraic: 1e-12,
        }
    }
}

/// A dense square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    mat: CMatrix,
    label: Option<String>,
}

impl Operator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidArgument(format!(
                "operator must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(Error::InvalidArgument(
                "operator dimension must be positive".into(),
            ));
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(
                "operator has non-finite entries".into(),
            ));
        }
        Ok(Self { mat, label: None })
    }

    /// Internal constructor for matrices produced by arithmetic on valid
    /// operators.
    pub(crate) fn from_mat(mat: CMatrix) -> Self {
        debug_assert!(mat.is_square());
        Self { mat, label: None }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_mat(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_mat(CMatrix::zeros(dim, dim))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.mat)
    }

    pub fn adjoint(&self) -> Operator {
        Self::from_mat(self.mat.adjoint())
    }

    pub fn scale(&self, c: C64) -> Operator {
        Self::from_mat(self.mat.map(|z| z * c))
    }

    pub fn kron(&self, other: &Operator) -> Operator {
        Self::from_mat(self.mat.kronecker(&other.mat))
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        linalg::max_abs(&self.mat)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::is_hermitian(&self.mat, tol)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let d = self.dim();
        linalg::max_abs(&(&self.mat * self.mat.adjoint() - CMatrix::identity(d, d))) <= tol
    }

    /// `V† O V` for an isometry `V` whose columns span an invariant subspace.
    pub fn compress(&self, isometry: &CMatrix) -> Operator {
        Self::from_mat(isometry.adjoint() * &self.mat * isometry)
    }

    pub fn max_distance(&self, other: &Operator) -> f64 {
        linalg::max_abs(&(&self.mat - &other.mat))
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = &self.label {
            writeln!(f, "{l}:")?;
        }
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.mat[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        Operator::from_mat(&self.mat + &rhs.mat)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        Operator::from_mat(&self.mat - &rhs.mat)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        Operator::from_mat(&self.mat * &rhs.mat)
    }
}

impl Mul<f64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: f64) -> Operator {
        Operator::from_mat(self.mat.map(|z| z * rhs))
    }
}

impl Mul<C64> for &Operator {
    type Output = Operator;
    fn mul(self, rhs: C64) -> Operator {
        self.scale(rhs)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator::from_mat(-&self.mat)
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorJson {
    dim: usize,
    /// Row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let entries = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| [self.mat[(i, j)].re, self.mat[(i, j)].im])
            .collect();
        OperatorJson {
            dim: d,
            entries,
            label: self.label.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = OperatorJson::deserialize(d)?;
        if raw.entries.len() != raw.dim * raw.dim {
            return Err(serde::de::Error::custom(format!(
                "expected {} entries for dim {}, got {}",
                raw.dim * raw.dim,
                raw.dim,
                raw.entries.len()
            )));
        }
        let mat = CMatrix::from_row_iterator(
            raw.dim,
            raw.dim,
            raw.entries.iter().map(|[re, im]| C64::new(*re, *im)),
        );
        let mut op = Operator::new(mat).map_err(serde::de::Error::custom)?;
        op.label = raw.label;
        Ok(op)
    }
}

/// `σ₀ = 1`, `σ₁`, `σ₂`, `σ₃`.
pub fn pauli_matrix(i: usize) -> Result<Operator> {
    let m = match i {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -I, I, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => {
            return Err(Error::InvalidArgument(format!(
                "Pauli index must be in 0..=3, got {i}"
            )))
        }
    };
    Ok(Operator::from_mat(CMatrix::from_row_slice(2, 2, &m)).with_label(format!("sigma{i}")))
}

pub(crate) fn sigma(i: usize) -> Operator {
    pauli_matrix(i).expect("index in range")
}

/// A word over `{0,1,2,3}` naming `σ_{i₁} ⊗ … ⊗ σ_{i_N}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u8>", into = "Vec<u8>")]
pub struct PauliString {
    labels: Vec<u8>,
}

impl PauliString {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidArgument(
                "Pauli string needs at least one qubit".into(),
            ));
        }
        if let Some(bad) = labels.iter().find(|&&l| l > 3) {
            return Err(Error::InvalidArgument(format!(
                "Pauli label {bad} out of range 0..=3"
            )));
        }
        Ok(Self { labels })
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            labels: vec![0; n_qubits],
        }
    }

    /// Identity everywhere except `label` on `site` (0-based).
    pub fn single(n_qubits: usize, site: usize, label: u8) -> Result<Self> {
        if site >= n_qubits {
            return Err(Error::InvalidArgument(format!(
                "site {site} out of range for {n_qubits} qubits"
            )));
        }
        let mut labels = vec![0; n_qubits];
        labels[site] = label;
        Self::new(labels)
    }

    /// Parse `"IXYZ"` style or `"0123"` style strings.
    pub fn parse(s: &str) -> Result<Self> {
        let labels = s
            .chars()
            .map(|c| match c {
                'I' | 'i' | '0' => Ok(0),
                'X' | 'x' | '1' => Ok(1),
                'Y' | 'y' | '2' => Ok(2),
                'Z' | 'z' | '3' => Ok(3),
                other => Err(Error::InvalidArgument(format!(
                    "bad Pauli symbol '{other}'"
                ))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(labels)
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn is_identity(&self) -> bool {
        self.labels.iter().all(|&l| l == 0)
    }

    /// Index of the string in the lexicographic enumeration of all `4^N`
    /// strings.
    pub fn index(&self) -> usize {
        self.labels.iter().fold(0, |acc, &l| acc * 4 + l as usize)
    }

    pub fn from_index(n_qubits: usize, mut index: usize) -> Self {
        let mut labels = vec![0; n_qubits];
        for slot in labels.iter_mut().rev() {
            *slot = (index % 4) as u8;
            index /= 4;
        }
        Self { labels }
    }

    /// All `4^N` strings in index order.
    pub fn all(n_qubits: usize) -> impl Iterator<Item = PauliString> {
        (0..4usize.pow(n_qubits as u32)).map(move |k| Self::from_index(n_qubits, k))
    }

    /// Symbol-wise product: `P·Q = phase · R` with `phase ∈ {±1, ±i}`.
    pub fn product(&self, other: &PauliString) -> Result<(C64, PauliString)> {
        if self.n_qubits() != other.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits(),
                right: other.n_qubits(),
            });
        }
        let mut phase = ONE;
        let labels = self
            .labels
            .iter()
            .zip(&other.labels)
            .map(|(&a, &b)| {
                let (p, r) = single_product(a, b);
                phase *= p;
                r
            })
            .collect();
        Ok((phase, PauliString { labels }))
    }
}

/// `σ_a σ_b = phase · σ_r`.
fn single_product(a: u8, b: u8) -> (C64, u8) {
    match (a, b) {
        (0, x) | (x, 0) => (ONE, x),
        (x, y) if x == y => (ONE, 0),
        (x, y) => {
            let r = 6 - x - y;
            // cyclic (1,2,3) order gives +i
            let cyclic = matches!((x, y), (1, 2) | (2, 3) | (3, 1));
            (if cyclic { I } else { -I }, r)
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.labels {
            f.write_str(["I", "X", "Y", "Z"][l as usize])?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<u8>> for PauliString {
    type Error = Error;
    fn try_from(v: Vec<u8>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PauliString> for Vec<u8> {
    fn from(p: PauliString) -> Self {
        p.labels
    }
}

/// `M(i₁,…,i_N) = σ_{i₁} ⊗ … ⊗ σ_{i_N}`.
pub fn realize(p: &PauliString) -> Operator {
    let mut mat = CMatrix::identity(1, 1);
    for &l in p.labels() {
        mat = mat.kronecker(sigma(l as usize).matrix());
    }
    Operator::from_mat(mat).with_label(p.to_string())
}

/// Single-site operator `op` placed at `site` (0-based), identity elsewhere.
pub fn embed_site(op: &Operator, site: usize, n_qubits: usize) -> Result<Operator> {
    if op.dim() != 2 {
        return Err(Error::InvalidArgument("site operator must be 2x2".into()));
    }
    if site >= n_qubits {
        return Err(Error::InvalidArgument(format!(
            "site {site} out of range for {n_qubits} qubits"
        )));
    }
    let mut mat = CMatrix::identity(1, 1);
    for q in 0..n_qubits {
        mat = if q == site {
            mat.kronecker(op.matrix())
        } else {
            mat.kronecker(&CMatrix::identity(2, 2))
        };
    }
    Ok(Operator::from_mat(mat))
}

fn check_dims(a: &Operator, b: &Operator) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

pub fn multiply(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dims(a, b)?;
    Ok(a * b)
}

pub fn adjoint(a: &Operator) -> Operator {
    a.adjoint()
}

/// `ab − ba`.
pub fn commutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dims(a, b)?;
    Ok(Operator::from_mat(
        a.matrix() * b.matrix() - b.matrix() * a.matrix(),
    ))
}

/// `ab + ba`.
pub fn anticommutator(a: &Operator, b: &Operator) -> Result<Operator> {
    check_dims(a, b)?;
    Ok(Operator::from_mat(
        a.matrix() * b.matrix() + b.matrix() * a.matrix(),
    ))
}

pub fn frobenius_norm(a: &Operator) -> f64 {
    a.matrix().norm()
}

/// `exp(−i t h)` via Hermitian eigendecomposition.
pub fn matrix_exponential(h: &Operator, t: f64) -> Result<Operator> {
    matrix_exponential_with(h, t, Tolerances::default().structural)
}

pub fn matrix_exponential_with(h: &Operator, t: f64, hermitian_tol: f64) -> Result<Operator> {
    if !h.is_hermitian(hermitian_tol) {
        return Err(Error::ContractViolation(format!(
            "matrix_exponential needs a Hermitian generator (anti-Hermitian part {:e})",
            linalg::max_abs(&(h.matrix() - h.matrix().adjoint()))
        )));
    }
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "time must be finite, got {t}"
        )));
    }
    let eig = HermitianEigen::new(h.matrix());
    Ok(Operator::from_mat(
        eig.map(|l| C64::from_polar(1.0, -l * t)),
    ))
}
