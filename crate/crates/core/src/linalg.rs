//! Dense complex linear-algebra helpers shared by every module.
//!
//! Everything here works on `nalgebra` dynamic matrices of `Complex<f64>`.
//! Tensor products follow the convention used across the crate: in
//! `a.kronecker(&b)` the left factor owns the most significant index block.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVector) -> f64 {
    v.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Hilbert–Schmidt inner product `tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Self {
        // Symmetrize first so the solver never sees rounding asymmetry.
        let sym = (h + h.adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(sym);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        Self { values, vectors }
    }

    /// `f(h) = V diag(f(λ)) V†` for a complex-valued spectral function.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (k, &lambda) in self.values.iter().enumerate() {
            let fk = f(lambda);
            for z in scaled.column_mut(k).iter_mut() {
                *z *= fk;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Orthonormal basis (as columns) of the null space of `a`.
///
/// Singular values `<= tol` count as zero. Wide matrices are padded with zero
/// rows so the SVD always exposes a complete right-singular basis.
pub fn null_space(a: &CMatrix, tol: f64) -> CMatrix {
    let cols = a.ncols();
    if cols == 0 {
        return CMatrix::zeros(a.nrows(), 0);
    }
    let padded = if a.nrows() < cols {
        let mut p = CMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let kernel: Vec<CVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect();
    if kernel.is_empty() {
        CMatrix::zeros(cols, 0)
    } else {
        CMatrix::from_columns(&kernel)
    }
}

/// Numerical rank: singular values above `tol`.
pub fn rank(a: &CMatrix, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}

/// Orthonormalize the columns of `a` with modified Gram–Schmidt, dropping
/// columns whose residual norm falls below `tol`.
pub fn orthonormalize_columns(a: &CMatrix, tol: f64) -> CMatrix {
    let mut out: Vec<CVector> = Vec::new();
    for col in a.column_iter() {
        let mut v = col.into_owned();
        // two passes keep orthogonality at machine precision
        for _ in 0..2 {
            for q in &out {
                let proj = q.dotc(&v);
                v -= q * proj;
            }
        }
        let n = v.norm();
        if n > tol {
            out.push(v / C64::from(n));
        }
    }
    if out.is_empty() {
        CMatrix::zeros(a.nrows(), 0)
    } else {
        CMatrix::from_columns(&out)
    }
}

/// `Tr_B` of an operator on `C^{d_a} ⊗ C^{d_b}`.
pub fn partial_trace_right(m: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    assert_eq!(m.nrows(), d_a * d_b, "partial trace dimension mismatch");
    CMatrix::from_fn(d_a, d_a, |i, j| {
        (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()
    })
}

/// `Tr_A` of an operator on `C^{d_a} ⊗ C^{d_b}`.
pub fn partial_trace_left(m: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    assert_eq!(m.nrows(), d_a * d_b, "partial trace dimension mismatch");
    CMatrix::from_fn(d_b, d_b, |i, j| {
        (0..d_a).map(|k| m[(k * d_b + i, k * d_b + j)]).sum()
    })
}

/// Reduced density matrix of the left factor of a pure bipartite vector,
/// computed without forming the full projector.
pub fn reduce_pure_left(psi: &CVector, d_a: usize, d_b: usize) -> CMatrix {
    assert_eq!(psi.len(), d_a * d_b, "state dimension mismatch");
    // psi reshaped as a d_a x d_b matrix M (row-major): rho_A = M M†
    let m = CMatrix::from_fn(d_a, d_b, |i, k| psi[i * d_b + k]);
    &m * m.adjoint()
}

pub fn reduce_pure_right(psi: &CVector, d_a: usize, d_b: usize) -> CMatrix {
    assert_eq!(psi.len(), d_a * d_b, "state dimension mismatch");
    let m = CMatrix::from_fn(d_a, d_b, |i, k| psi[i * d_b + k]);
    (m.adjoint() * &m).transpose()
}

/// `tr(ρ²)`.
pub fn purity(rho: &CMatrix) -> f64 {
    hs_inner(rho, rho).re
}

/// Von Neumann entropy in nats; eigenvalues below 1e-14 contribute nothing.
pub fn von_neumann_entropy(rho: &CMatrix) -> f64 {
    HermitianEigen::new(rho)
        .values
        .iter()
        .filter(|&&p| p > 1e-14)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Square root of a positive semidefinite matrix; negative rounding noise in
/// the spectrum is clipped to zero.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    HermitianEigen::new(m).map(|l| C64::from(l.max(0.0).sqrt()))
}

/// Purity threshold above which a density matrix is treated as rank one by
/// [`fidelity`].
const PURE_STATE_CUTOFF: f64 = 1.0 - 1e-12;

/// Uhlmann fidelity, squared convention: `F = (tr √(√ρ σ √ρ))²`.
///
/// When either argument is pure the rank-one form `⟨φ|ρ|φ⟩` is used, which
/// avoids square roots of rounding-level eigenvalues.
pub fn fidelity(rho: &CMatrix, sigma: &CMatrix) -> f64 {
    for (pure, other) in [(sigma, rho), (rho, sigma)] {
        let eig = HermitianEigen::new(pure);
        let top = eig.values.len() - 1;
        if eig.values[top] >= PURE_STATE_CUTOFF {
            let phi = eig.vectors.column(top).into_owned();
            return (phi.adjoint() * other * &phi)[(0, 0)].re;
        }
    }
    let s = sqrt_psd(rho);
    let inner = &s * sigma * &s;
    let root: f64 = HermitianEigen::new(&inner)
        .values
        .iter()
        .map(|&l| l.max(0.0).sqrt())
        .sum();
    root * root
}

/// Column-major vectorization.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

pub fn unvectorize(v: &CVector, dim: usize) -> CMatrix {
    CMatrix::from_iterator(dim, dim, v.iter().copied())
}

/// Normalize a vector, failing on (numerically) zero input.
pub fn normalized(v: &CVector) -> Result<CVector> {
    let n = v.norm();
    if n < 1e-14 || !n.is_finite() {
        return Err(Error::Numerical(format!(
            "cannot normalize vector of norm {n:e}"
        )));
    }
    Ok(v / C64::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // one equation, three unknowns
        let a = CMatrix::from_row_slice(1, 3, &[ONE, ONE, ZERO]);
        let k = null_space(&a, 1e-9);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&a * &k)) < 1e-14);
        assert!(max_abs(&(k.adjoint() * &k - CMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn null_space_full_rank_is_empty() {
        let k = null_space(&CMatrix::identity(3, 3), 1e-9);
        assert_eq!(k.ncols(), 0);
    }

    #[test]
    fn partial_traces_of_product() {
        let a =
            CMatrix::from_row_slice(2, 2, &[c(0.7, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.3, 0.0)]);
        let b =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)]);
        let ab = a.kronecker(&b);
        assert!(max_abs(&(partial_trace_right(&ab, 2, 2) - &a)) < 1e-15);
        assert!(max_abs(&(partial_trace_left(&ab, 2, 2) - &b)) < 1e-15);
    }

    #[test]
    fn pure_reductions_match_full_partial_trace() {
        let psi = normalized(&CVector::from_vec(vec![
            c(0.3, 0.1),
            c(-0.2, 0.4),
            c(0.5, 0.0),
            c(0.1, -0.6),
            c(0.0, 0.2),
            c(0.7, 0.3),
        ]))
        .unwrap();
        let rho = &psi * psi.adjoint();
        assert!(max_abs(&(reduce_pure_left(&psi, 2, 3) - partial_trace_right(&rho, 2, 3))) < 1e-15);
        assert!(max_abs(&(reduce_pure_right(&psi, 2, 3) - partial_trace_left(&rho, 2, 3))) < 1e-15);
    }

    #[test]
    fn fidelity_pure_and_mixed_routes_agree() {
        let rho =
            CMatrix::from_row_slice(2, 2, &[c(0.6, 0.0), c(0.1, 0.1), c(0.1, -0.1), c(0.4, 0.0)]);
        let sigma =
            CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.2, 0.0), c(0.2, 0.0), c(0.5, 0.0)]);
        let f = fidelity(&rho, &sigma);
        assert!((fidelity(&sigma, &rho) - f).abs() < 1e-12);
        // F(ρ, ρ) = 1
        assert!((fidelity(&rho, &rho) - 1.0).abs() < 1e-12);
        let phi = CVector::from_vec(vec![ONE, ZERO]);
        let pure = &phi * phi.adjoint();
        assert!((fidelity(&rho, &pure) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn entropy_of_maximally_mixed_qubit() {
        let rho = CMatrix::identity(2, 2).scale(0.5);
        assert!((von_neumann_entropy(&rho) - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn vectorization_round_trip() {
        let m = CMatrix::from_fn(3, 3, |i, j| c(i as f64, j as f64));
        assert_eq!(unvectorize(&vectorize(&m), 3), m);
    }
}
