//! Thin wrappers over nalgebra for the dense complex linear algebra used here.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Roots of `c_0 + c_1 w + ... + c_m w^m` (`c_m != 0`) as eigenvalues of the
/// companion matrix.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = coeffs.len().saturating_sub(1);
    if m == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[m];
    let mut companion = DMatrix::<Complex64>::zeros(m, m);
    for i in 1..m {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..m {
        companion[(i, m - 1)] = -coeffs[i] / lead;
    }
    companion
        .schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or(Error::EigenFailure)
}

/// Spectral norm (largest singular value).
pub fn operator_norm(a: &DMatrix<Complex64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Eigenvalues of a Hermitian matrix in ascending order. Only the lower
/// triangle is trusted; the matrix is symmetrized first.
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let herm = DMatrix::from_fn(n, n, |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Largest entrywise `|a_ij - conj(a_ji)|`.
pub fn hermitian_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}
