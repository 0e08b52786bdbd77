//! Finite-dimensional GNS construction.
//!
//! A state on a concrete matrix algebra is always given by an ambient density
//! matrix, `f(A) = tr(ρA)`. The GNS space is the algebra modulo the null
//! vectors of `⟨Ã|B̃⟩ = f(A†B)`, materialized with an orthonormal basis so
//! represented operators are ordinary matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector, HermitianEigen, C64};
use crate::pauli::{realize, Operator, PauliString};
use crate::spin::{Factor, FactoredSpace};

/// Relative cutoff for the Gram null space.
const GRAM_REL_TOL: f64 = 1e-9;
/// Gram eigenvalues below this (absolute) mean the functional is not positive.
const GRAM_NEGATIVE_TOL: f64 = 1e-9;
const SPAN_TOL: f64 = 1e-9;

/// A concrete matrix algebra given by a linearly independent basis.
#[derive(Debug, Clone)]
pub struct MatrixAlgebra {
    pub name: String,
    pub ambient_dim: usize,
    pub basis: Vec<Operator>,
    /// Orthonormal (Hilbert–Schmidt) frame of the span, vectorized columns.
    frame: CMatrix,
}

impl MatrixAlgebra {
    /// Checks independence, identity membership and adjoint closure.
    pub fn from_basis(name: impl Into<String>, basis: Vec<Operator>) -> Result<Self> {
        let name = name.into();
        let ambient_dim = basis
            .first()
            .map(Operator::dim)
            .ok_or_else(|| Error::InvalidArgument("algebra basis is empty".into()))?;
        if let Some(bad) = basis.iter().find(|b| b.dim() != ambient_dim) {
            return Err(Error::DimensionMismatch {
                left: bad.dim(),
                right: ambient_dim,
            });
        }
        let cols: Vec<CVector> = basis
            .iter()
            .map(|b| linalg::vectorize(b.matrix()))
            .collect();
        let stacked = CMatrix::from_columns(&cols);
        let frame = linalg::orthonormalize_columns(&stacked, SPAN_TOL);
        if frame.ncols() != basis.len() {
            return Err(Error::InvalidArgument(format!(
                "basis of '{name}' is linearly dependent (rank {} of {})",
                frame.ncols(),
                basis.len()
            )));
        }
        let alg = Self {
            name,
            ambient_dim,
            basis,
            frame,
        };
        let id_res = alg.span_residual(&Operator::identity(ambient_dim));
        if id_res > SPAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "'{}' does not contain the identity (residual {id_res:e})",
                alg.name
            )));
        }
        let adj_res = alg
            .basis
            .iter()
            .map(|b| alg.span_residual(&b.adjoint()))
            .fold(0.0, f64::max);
        if adj_res > SPAN_TOL {
            return Err(Error::InvalidArgument(format!(
                "'{}' is not closed under adjoint (residual {adj_res:e})",
                alg.name
            )));
        }
        Ok(alg)
    }

    /// Smallest algebra containing the identity and `generators`.
    pub fn generated_by(name: impl Into<String>, generators: &[Operator]) -> Result<Self> {
        let d = generators
            .first()
            .map(Operator::dim)
            .ok_or_else(|| Error::InvalidArgument("no generators".into()))?;
        let mut words: Vec<Operator> = vec![Operator::identity(d)];
        let mut frame: Vec<CVector> =
            vec![linalg::vectorize(&CMatrix::identity(d, d)) / C64::from((d as f64).sqrt())];
        let push = |op: Operator, words: &mut Vec<Operator>, frame: &mut Vec<CVector>| -> bool {
            let mut v = linalg::vectorize(op.matrix());
            for _ in 0..2 {
                for q in frame.iter() {
                    let p = q.dotc(&v);
                    v -= q * p;
                }
            }
            let n = v.norm();
            if n > SPAN_TOL * op.matrix().norm().max(1.0) {
                frame.push(v / C64::from(n));
                words.push(op);
                true
            } else {
                false
            }
        };
        for g in generators {
            if g.dim() != d {
                return Err(Error::DimensionMismatch {
                    left: g.dim(),
                    right: d,
                });
            }
            push(g.clone(), &mut words, &mut frame);
            push(g.adjoint(), &mut words, &mut frame);
        }
        // close under products until the span stops growing
        let mut start = 0;
        while start < words.len() {
            let end = words.len();
            for a in start..end {
                for b in 0..end {
                    for prod in [&words[a] * &words[b], &words[b] * &words[a]] {
                        push(prod, &mut words, &mut frame);
                    }
                }
            }
            start = end;
            if words.len() > d * d {
                return Err(Error::Numerical(
                    "closure exceeded the full matrix algebra".into(),
                ));
            }
        }
        Self::from_basis(name, words)
    }

    /// `gl(2^N)` spanned by all Pauli strings.
    pub fn full(n_qubits: usize) -> Result<Self> {
        let basis = PauliString::all(n_qubits).map(|p| realize(&p)).collect();
        Self::from_basis(format!("full-{n_qubits}-qubit"), basis)
    }

    /// Operators acting on the multiplicity factor of `space` only, lifted
    /// to the ambient space, together with the ambient identity.
    pub fn df_algebra(name: impl Into<String>, space: &FactoredSpace) -> Result<Self> {
        let (l, r) = (space.left_dim, space.right_dim);
        let units: Vec<Operator> = (0..l * l)
            .map(|ab| {
                let mut e = CMatrix::zeros(l, l);
                e[(ab / l, ab % l)] = linalg::ONE;
                space.lift(&Operator::from_mat(e.kronecker(&CMatrix::identity(r, r))))
            })
            .collect();
        Self::generated_by(name, &units)
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Distance of `op` from the span (Frobenius norm of the residual).
    pub fn span_residual(&self, op: &Operator) -> f64 {
        let v = linalg::vectorize(op.matrix());
        let proj = &self.frame * (self.frame.adjoint() * &v);
        (v - proj).norm()
    }

    /// Largest span residual over all basis products.
    pub fn closure_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for a in &self.basis {
            for b in &self.basis {
                worst = worst.max(self.span_residual(&(a * b)));
            }
        }
        worst
    }
}

/// `f(A) = tr(ρA)` on a matrix algebra.
#[derive(Debug, Clone)]
pub struct StateFunctional {
    pub algebra: MatrixAlgebra,
    pub density: Operator,
}

impl StateFunctional {
    pub fn new(algebra: MatrixAlgebra, density: Operator) -> Result<Self> {
        if density.dim() != algebra.ambient_dim {
            return Err(Error::DimensionMismatch {
                left: density.dim(),
                right: algebra.ambient_dim,
            });
        }
        if !density.is_hermitian(1e-10) {
            return Err(Error::InvalidArgument(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = density.trace();
        if (tr - linalg::ONE).norm() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "density matrix has trace {tr}"
            )));
        }
        let min_eig = HermitianEigen::new(density.matrix()).values[0];
        if min_eig < -1e-10 {
            return Err(Error::PositivityViolation {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self { algebra, density })
    }
}

/// `tr(ρ a)`.
pub fn evaluate(f: &StateFunctional, a: &Operator) -> C64 {
    linalg::trace(&(f.density.matrix() * a.matrix()))
}

/// `⟨Ã|C|B̃⟩ = f(A† C B)`.
pub fn transition_amplitude(f: &StateFunctional, a: &Operator, c: &Operator, b: &Operator) -> C64 {
    evaluate(f, &(&(&a.adjoint() * c) * b))
}

/// `Ã = B̃ ⇔ f((A−B)†(A−B)) = 0`, tested at 1e-12.
pub fn equivalence_class_check(f: &StateFunctional, a: &Operator, b: &Operator) -> bool {
    let diff = a - b;
    evaluate(f, &(&diff.adjoint() * &diff)).re <= 1e-12
}

#[derive(Debug, Clone)]
pub struct GNSRepresentation {
    pub dimension: usize,
    pub gram: CMatrix,
    pub gram_rank: usize,
    /// Column `k` holds the algebra-basis coefficients of the `k`-th
    /// orthonormal GNS vector.
    pub class_basis: CMatrix,
    /// Represented basis elements, in algebra-basis order.
    pub rep_map: Vec<Operator>,
    /// Coordinates of the class of the identity.
    pub cyclic_vector: CVector,
    state: StateFunctional,
}

/// Summary record for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnsSummary {
    pub algebra_name: String,
    pub gns_dimension: usize,
    pub gram_rank: usize,
    pub homomorphism_residual: f64,
}

impl GNSRepresentation {
    /// `⟨e_k | Ã⟩ = Σ_b conj(c_kb) f(A_b† A)`.
    pub fn class_vector(&self, a: &Operator) -> CVector {
        let basis = &self.state.algebra.basis;
        let overlaps = CVector::from_iterator(
            basis.len(),
            basis
                .iter()
                .map(|ab| evaluate(&self.state, &(&ab.adjoint() * a))),
        );
        self.class_basis.adjoint() * overlaps
    }

    /// Matrix of `c` on the GNS space via `⟨e_k|C|e_l⟩`.
    pub fn represent(&self, c: &Operator) -> Operator {
        let basis = &self.state.algebra.basis;
        let n = basis.len();
        let m = CMatrix::from_fn(n, n, |a, b| {
            transition_amplitude(&self.state, &basis[a], c, &basis[b])
        });
        Operator::from_mat(self.class_basis.adjoint() * m * &self.class_basis)
    }

    /// Max deviation of `rep(AB) = rep(A)rep(B)` and `rep(A†) = rep(A)†` over
    /// all basis pairs.
    pub fn homomorphism_residual(&self) -> f64 {
        let basis = &self.state.algebra.basis;
        let mut worst = 0.0_f64;
        for (a, ra) in basis.iter().zip(&self.rep_map) {
            worst = worst.max(self.represent(&a.adjoint()).max_distance(&ra.adjoint()));
            for (b, rb) in basis.iter().zip(&self.rep_map) {
                worst = worst.max(self.represent(&(a * b)).max_distance(&(ra * rb)));
            }
        }
        worst
    }

    pub fn summary(&self) -> GnsSummary {
        GnsSummary {
            algebra_name: self.state.algebra.name.clone(),
            gns_dimension: self.dimension,
            gram_rank: self.gram_rank,
            homomorphism_residual: self.homomorphism_residual(),
        }
    }

    pub fn state(&self) -> &StateFunctional {
        &self.state
    }
}

pub fn gns_construct(f: &StateFunctional) -> Result<GNSRepresentation> {
    let basis = &f.algebra.basis;
    let n = basis.len();
    let gram = CMatrix::from_fn(n, n, |a, b| evaluate(f, &(&basis[a].adjoint() * &basis[b])));
    let eig = HermitianEigen::new(&gram);
    let min = eig.values[0];
    if min < -GRAM_NEGATIVE_TOL {
        return Err(Error::PositivityViolation {
            min_eigenvalue: min,
        });
    }
    let max = eig.values[n - 1];
    let cutoff = GRAM_REL_TOL * max.max(0.0);
    // largest eigenvalues first
    let kept: Vec<usize> = (0..n).rev().filter(|&k| eig.values[k] > cutoff).collect();
    if kept.is_empty() {
        return Err(Error::Numerical("Gram matrix vanishes".into()));
    }
    let cols: Vec<CVector> = kept
        .iter()
        .map(|&k| eig.vectors.column(k) / C64::from(eig.values[k].sqrt()))
        .collect();
    let class_basis = CMatrix::from_columns(&cols);
    let mut rep = GNSRepresentation {
        dimension: kept.len(),
        gram,
        gram_rank: kept.len(),
        class_basis,
        rep_map: Vec::new(),
        cyclic_vector: CVector::zeros(0),
        state: f.clone(),
    };
    rep.rep_map = basis.iter().map(|b| rep.represent(b)).collect();
    rep.cyclic_vector = rep.class_vector(&Operator::identity(f.algebra.ambient_dim));
    Ok(rep)
}

/// Purity of a density matrix restricted to one factor of a factored space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubalgebraPurity {
    pub purity: f64,
    pub is_pure: bool,
    /// Weight of the density outside the factored space.
    pub leakage: f64,
}

pub const PURITY_THRESHOLD: f64 = 1.0 - 1e-8;
pub const MAX_SUPPORT_LEAKAGE: f64 = 1e-6;

/// Compress `density` into the factored space, trace out the other factor and
/// return `tr(ρ_red²)` for the factor `which`.
pub fn purity_on_subalgebra(
    density: &Operator,
    factored: &FactoredSpace,
    which: Factor,
) -> Result<SubalgebraPurity> {
    if density.dim() != factored.ambient_dim() {
        return Err(Error::DimensionMismatch {
            left: density.dim(),
            right: factored.ambient_dim(),
        });
    }
    let total = density.trace().re;
    let compressed = factored.compress(density);
    let inside = compressed.trace().re;
    let leakage = 1.0 - inside / total;
    if leakage > MAX_SUPPORT_LEAKAGE {
        return Err(Error::Leakage { weight: leakage });
    }
    let rho = compressed.matrix().map(|z| z / C64::from(inside));
    let reduced = factored.reduce(&rho, which);
    let purity = linalg::purity(&reduced);
    Ok(SubalgebraPurity {
        purity,
        is_pure: purity >= PURITY_THRESHOLD,
        leakage: leakage.max(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::commutant::{bell_factorization, two_qubit_pi_tau};
    use crate::linalg::ONE;

    fn pi_algebra() -> (MatrixAlgebra, Vec<Operator>) {
        let (pi, _) = two_qubit_pi_tau();
        let ops: Vec<Operator> = pi.generators.into_iter().map(|(_, g)| g).collect();
        let mut basis = vec![Operator::identity(4)];
        basis.extend(ops.iter().cloned());
        (MatrixAlgebra::from_basis("pi", basis).unwrap(), ops)
    }

    /// Density on the π₃ = −1 eigenspace, maximally mixed over τ.
    fn pi_lowest_state() -> StateFunctional {
        let (alg, ops) = pi_algebra();
        let rho = &(&Operator::identity(4) - &ops[2]) * 0.25;
        StateFunctional::new(alg, rho).unwrap()
    }

    fn pi_plus(ops: &[Operator]) -> Operator {
        &(&ops[0] + &ops[1].scale(linalg::I)) * 0.5
    }

    #[test]
    fn pi_state_values() {
        let f = pi_lowest_state();
        let (_, ops) = pi_algebra();
        assert!((evaluate(&f, &Operator::identity(4)) - ONE).norm() < 1e-15);
        assert!((evaluate(&f, &ops[2]) + ONE).norm() < 1e-15);
        assert!(evaluate(&f, &ops[0]).norm() < 1e-15);
        assert!(evaluate(&f, &ops[1]).norm() < 1e-15);
    }

    #[test]
    fn pi_gns_is_two_dimensional() {
        let f = pi_lowest_state();
        let (_, ops) = pi_algebra();
        let rep = gns_construct(&f).unwrap();
        assert_eq!(rep.dimension, 2);
        let one = rep.class_vector(&Operator::identity(4));
        let up = rep.class_vector(&pi_plus(&ops));
        assert!((one.norm() - 1.0).abs() < 1e-12);
        assert!((up.norm() - 1.0).abs() < 1e-12);
        assert!(one.dotc(&up).norm() < 1e-12);
        let p3 = rep.represent(&ops[2]);
        assert!(((up.adjoint() * p3.matrix() * &up)[(0, 0)] - ONE).norm() < 1e-12);
        assert!(((one.adjoint() * p3.matrix() * &one)[(0, 0)] + ONE).norm() < 1e-12);
        // (1|π₃|1) straight from the transition formula
        let pp = pi_plus(&ops);
        assert!((transition_amplitude(&f, &pp, &ops[2], &pp) - ONE).norm() < 1e-12);
        for op in &ops[..2] {
            assert!(transition_amplitude(&f, &pp, op, &pp).norm() < 1e-12);
        }
        assert!(rep.homomorphism_residual() < 1e-9);
    }

    #[test]
    fn pi_null_space() {
        let f = pi_lowest_state();
        let (_, ops) = pi_algebra();
        let pm = pi_plus(&ops).adjoint();
        let zero = Operator::zeros(4);
        assert!(equivalence_class_check(&f, &pm, &zero));
        let one_plus = &Operator::identity(4) + &ops[2];
        assert!(equivalence_class_check(&f, &one_plus, &zero));
        assert!(equivalence_class_check(&f, &ops[0], &ops[0]));
        assert!(!equivalence_class_check(
            &f,
            &Operator::identity(4),
            &pi_plus(&ops)
        ));
    }

    #[test]
    fn hilbert_schmidt_case() {
        let alg = MatrixAlgebra::full(2).unwrap();
        let f = StateFunctional::new(alg, &Operator::identity(4) * 0.25).unwrap();
        let rep = gns_construct(&f).unwrap();
        assert_eq!(rep.dimension, 16);
        assert!(linalg::max_abs(&(&rep.gram - CMatrix::identity(16, 16))) < 1e-14);
    }

    #[test]
    fn cyclic_vector_reproduces_state() {
        let alg = MatrixAlgebra::full(2).unwrap();
        let psi = CVector::from_vec(vec![
            C64::new(0.5, 0.1),
            C64::new(0.2, -0.3),
            C64::new(0.0, 0.4),
            C64::new(0.6, 0.0),
        ]);
        let psi = linalg::normalized(&psi).unwrap();
        let rho = Operator::from_mat(&psi * psi.adjoint());
        let f = StateFunctional::new(alg.clone(), rho).unwrap();
        let rep = gns_construct(&f).unwrap();
        // pure state on gl(4): GNS space is C^4
        assert_eq!(rep.dimension, 4);
        for (b, rb) in alg.basis.iter().zip(&rep.rep_map) {
            let v = &rep.cyclic_vector;
            let amp = (v.adjoint() * rb.matrix() * v)[(0, 0)];
            assert!((amp - evaluate(&f, b)).norm() < 1e-10);
        }
        assert!(rep.homomorphism_residual() < 1e-9);
    }

    #[test]
    fn dimension_is_basis_independent() {
        let alg = MatrixAlgebra::full(2).unwrap();
        let rho = CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::from(0.5),
            C64::from(0.5),
            C64::from(0.0),
            C64::from(0.0),
        ]));
        let f = StateFunctional::new(alg.clone(), Operator::from_mat(rho.clone())).unwrap();
        let d1 = gns_construct(&f).unwrap().dimension;
        // mix basis elements with a fixed invertible triangular transform
        let n = alg.basis.len();
        let rotated: Vec<Operator> = (0..n)
            .map(|i| {
                (0..=i).fold(Operator::zeros(4), |acc, k| {
                    let c = C64::new(
                        1.0 / (1.0 + (i + k) as f64),
                        0.3 * (k as f64 - i as f64).sin(),
                    );
                    &acc + &alg.basis[k].scale(if k == i { ONE } else { c })
                })
            })
            .collect();
        let alg2 = MatrixAlgebra::from_basis("rotated", rotated).unwrap();
        let f2 = StateFunctional::new(alg2, Operator::from_mat(rho)).unwrap();
        assert_eq!(gns_construct(&f2).unwrap().dimension, d1);
        assert_eq!(d1, 8);
    }

    #[test]
    fn invalid_states_are_rejected() {
        let alg = MatrixAlgebra::full(1).unwrap();
        let neg = Operator::from_mat(CMatrix::from_diagonal(&CVector::from_vec(vec![
            C64::from(1.5),
            C64::from(-0.5),
        ])));
        assert!(matches!(
            StateFunctional::new(alg.clone(), neg),
            Err(Error::PositivityViolation { .. })
        ));
        assert!(StateFunctional::new(alg, Operator::identity(2)).is_err());
    }

    #[test]
    fn algebra_validation() {
        let z = realize(&PauliString::parse("Z").unwrap());
        let x = realize(&PauliString::parse("X").unwrap());
        // missing identity
        assert!(MatrixAlgebra::from_basis("bad", vec![z.clone()]).is_err());
        // dependent
        assert!(
            MatrixAlgebra::from_basis("bad", vec![Operator::identity(2), z.clone(), &z * 2.0])
                .is_err()
        );
        let gen = MatrixAlgebra::generated_by("xz", &[x, z]).unwrap();
        assert_eq!(gen.dimension(), 4);
        assert!(gen.closure_residual() < 1e-9);
    }

    #[test]
    fn pi_algebra_closes() {
        let (alg, ops) = pi_algebra();
        assert!(alg.closure_residual() < 1e-12);
        let gen = MatrixAlgebra::generated_by("pi", &ops).unwrap();
        assert_eq!(gen.dimension(), 4);
    }

    #[test]
    fn bell_mixture_is_pure_on_pi_factor() {
        let bell = crate::commutant::bell_identification();
        let v11 = &bell[0].amplitudes;
        let v1m = &bell[1].amplitudes;
        let rho = Operator::from_mat((v11 * v11.adjoint() + v1m * v1m.adjoint()).scale(0.5));
        let f = bell_factorization();
        let on_pi = purity_on_subalgebra(&rho, &f, Factor::Multiplicity).unwrap();
        assert!((on_pi.purity - 1.0).abs() < 1e-12);
        assert!(on_pi.is_pure);
        let on_tau = purity_on_subalgebra(&rho, &f, Factor::Irrep).unwrap();
        assert!((on_tau.purity - 0.5).abs() < 1e-12);
        assert!(!on_tau.is_pure);
    }

    #[test]
    fn product_state_is_pure_on_both_factors() {
        let f = bell_factorization();
        let a = linalg::normalized(&CVector::from_vec(vec![
            C64::new(0.3, 0.2),
            C64::new(-0.7, 0.1),
        ]))
        .unwrap();
        let b = linalg::normalized(&CVector::from_vec(vec![
            C64::new(0.5, 0.0),
            C64::new(0.1, 0.9),
        ]))
        .unwrap();
        let psi = f.product_vector(&a, &b).unwrap();
        let rho = Operator::from_mat(&psi * psi.adjoint());
        for which in [Factor::Multiplicity, Factor::Irrep] {
            let p = purity_on_subalgebra(&rho, &f, which).unwrap();
            assert!((p.purity - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn df_algebra_state_gives_irreducible_copy() {
        let d = crate::spin::decompose(&crate::spin::total_spin(3).unwrap()).unwrap();
        let space = crate::spin::factorize(&d, crate::spin::HalfInt::from_twice(1)).unwrap();
        let alg = MatrixAlgebra::df_algebra("df-3", &space).unwrap();
        // M_2 on the multiplicity factor plus the identity
        assert_eq!(alg.dimension(), 5);
        let a = linalg::normalized(&CVector::from_vec(vec![
            C64::new(0.8, 0.0),
            C64::new(0.0, 0.6),
        ]))
        .unwrap();
        let b = CVector::from_vec(vec![ONE, linalg::ZERO]);
        let psi = space.product_vector(&a, &b).unwrap();
        let f = StateFunctional::new(alg, Operator::from_mat(&psi * psi.adjoint())).unwrap();
        let rep = gns_construct(&f).unwrap();
        assert_eq!(rep.dimension, space.left_dim);
        assert!(rep.homomorphism_residual() < 1e-9);
    }

    #[test]
    fn leakage_is_reported() {
        let d = crate::spin::decompose(&crate::spin::total_spin(3).unwrap()).unwrap();
        let f = crate::spin::factorize(&d, crate::spin::HalfInt::from_twice(1)).unwrap();
        // |000⟩ lives in j = 3/2
        let mut rho = CMatrix::zeros(8, 8);
        rho[(0, 0)] = ONE;
        let err =
            purity_on_subalgebra(&Operator::from_mat(rho), &f, Factor::Multiplicity).unwrap_err();
        match err {
            Error::Leakage { weight } => assert!((weight - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }
}
