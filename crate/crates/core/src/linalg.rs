//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, Scalar};
use num_complex::Complex64;

use crate::error::{PirdError, Result};

/// Extracts the square submatrix with rows and columns `idx` (in that order).
pub fn submatrix<T: Scalar + Copy>(m: &DMatrix<T>, idx: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(idx.len(), idx.len(), |r, c| m[(idx[r], idx[c])])
}

/// Rectangular block `rows × cols` of `m`.
pub fn block<T: Scalar + Copy>(m: &DMatrix<T>, rows: &[usize], cols: &[usize]) -> DMatrix<T> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

pub fn is_symmetric(m: &DMatrix<f64>, rel_tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let n = m.nrows();
    (0..n).all(|i| (0..i).all(|j| (m[(i, j)] - m[(j, i)]).abs() <= rel_tol * scale))
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn min_eigenvalue_sym(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Symmetric (eigen) square root of a symmetric positive semi-definite matrix.
pub fn sym_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = symmetrize(m).symmetric_eigen();
    if let Some(neg) = eig.eigenvalues.iter().find(|&&v| v < 0.0) {
        return Err(PirdError::Numerical(format!(
            "square root of a matrix with negative eigenvalue {neg:e}"
        )));
    }
    let root = eig.eigenvalues.map(f64::sqrt);
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&root) * v.transpose())
}

/// log-determinant of a symmetric positive definite matrix, `None` if the
/// Cholesky factorization fails.
pub fn log_det_spd(m: &DMatrix<f64>) -> Option<f64> {
    if m.is_empty() {
        return Some(0.0);
    }
    let chol = symmetrize(m).cholesky()?;
    let l = chol.l_dirty();
    Some(2.0 * (0..m.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>())
}

/// Determinant of a complex square matrix via LU with partial pivoting.
pub fn complex_det(m: &DMatrix<Complex64>) -> Complex64 {
    if m.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    m.clone().lu().determinant()
}

/// Companion (state-transition) matrix of a VAR with lag matrices `coeffs`.
pub fn companion(coeffs: &[DMatrix<f64>], dim: usize) -> DMatrix<f64> {
    let p = coeffs.len();
    let n = p * dim;
    let mut c = DMatrix::zeros(n, n);
    for (k, a) in coeffs.iter().enumerate() {
        c.view_mut((0, k * dim), (dim, dim)).copy_from(a);
    }
    for i in dim..n {
        c[(i, i - dim)] = 1.0;
    }
    c
}

pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    match nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 100 * m.nrows().max(10)) {
        Some(schur) => schur.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max),
        None => gelfand_radius(m),
    }
}

/// `ρ(A) = lim ‖A^k‖^{1/k}` by repeated squaring with renormalization.
fn gelfand_radius(m: &DMatrix<f64>) -> f64 {
    let mut a = m.clone();
    let mut log_scale = 0.0;
    let mut k = 1.0;
    for _ in 0..40 {
        let n = a.norm();
        if n == 0.0 {
            return 0.0;
        }
        a /= n;
        log_scale += n.ln() / k;
        a = &a * &a;
        k *= 2.0;
    }
    (log_scale + a.norm().max(f64::MIN_POSITIVE).ln() / k).exp()
}
