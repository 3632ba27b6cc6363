//! Small dense helpers shared by the structure modules.

use nalgebra::{DMatrix, DVector};

/// Frobenius norm of `residual`, divided by the Frobenius norm of `reference`
/// when the reference is nonzero.
pub fn relative_residual(residual: &DMatrix<f64>, reference: &DMatrix<f64>) -> f64 {
    let scale = reference.norm();
    if scale > 0.0 {
        residual.norm() / scale
    } else {
        residual.norm()
    }
}

/// `[[diag(top), 0], [0, diag(bottom)]]`
pub fn block_diagonal(top: &[f64], bottom: &[f64]) -> DMatrix<f64> {
    let n = top.len();
    debug_assert_eq!(n, bottom.len());
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = top[i];
        m[(n + i, n + i)] = bottom[i];
    }
    m
}

/// `[[0, diag(upper)], [diag(lower), 0]]`
pub fn block_off_diagonal(upper: &[f64], lower: &[f64]) -> DMatrix<f64> {
    let n = upper.len();
    debug_assert_eq!(n, lower.len());
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = upper[i];
        m[(n + i, i)] = lower[i];
    }
    m
}

pub fn symmetric_part_residual(m: &DMatrix<f64>) -> f64 {
    relative_residual(&(m - m.transpose()), m)
}

pub fn antisymmetric_part_residual(m: &DMatrix<f64>) -> f64 {
    relative_residual(&(m + m.transpose()), m)
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().min()
}

/// 2-norm condition number from singular values; `f64::INFINITY` when singular.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 1.0;
    }
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn from_rows(rows: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

pub fn concat(top: &DVector<f64>, bottom: &DVector<f64>) -> DVector<f64> {
    let n = top.len();
    DVector::from_fn(n + bottom.len(), |i, _| if i < n { top[i] } else { bottom[i - n] })
}
