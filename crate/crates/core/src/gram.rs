//! Moment (Gram) matrices over finite index lists and the reproducing kernels
//! of the monomial subspaces they span.
//!
//! With `C = (C_{α_i - α_j})` and `C = L L*`, the kernel of
//! `span{z^α : α ∈ X}` in `L^2(μ)` is
//! `K(z, ζ) = v(z)^T conj(C^{-1} v(ζ)) = y(ζ)* y(z)` where `y = L^{-1} v`.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{check_dim, MultiIndex};
use crate::linalg;
use crate::moments::MomentTable;
use crate::poly::PowerTable;

#[derive(Clone, Debug, PartialEq)]
pub struct GramDiagnostics {
    pub size: usize,
    /// Largest `|G_ij - conj(G_ji)|`.
    pub hermitian_defect: f64,
    /// Ratio of the largest to the smallest squared Cholesky pivot, a cheap
    /// lower bound on the condition number.
    pub pivot_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct GramMatrix {
    indices: Vec<MultiIndex>,
    entries: DMatrix<Complex64>,
    factor: DMatrix<Complex64>,
    max_index: MultiIndex,
    diagnostics: GramDiagnostics,
}

/// Assembles `(C_{α_i - α_j})` and factors it. A failed factorization is an
/// error, never patched with jitter.
pub fn build_gram(table: &MomentTable, indices: &[MultiIndex]) -> Result<GramMatrix> {
    if indices.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let d = table.dim();
    let mut seen = BTreeSet::new();
    for alpha in indices {
        check_dim(d, alpha.dim())?;
        if !seen.insert(alpha) {
            return Err(Error::DuplicateGramIndex);
        }
    }
    let mut lo = alloc::vec![i64::MAX; d];
    let mut hi = alloc::vec![i64::MIN; d];
    for alpha in indices {
        for j in 0..d {
            lo[j] = lo[j].min(alpha[j]);
            hi[j] = hi[j].max(alpha[j]);
        }
    }
    if (0..d).any(|j| hi[j] - lo[j] > table.range()[j]) {
        return Err(Error::OutOfRange);
    }

    let m = indices.len();
    let mut diff = alloc::vec![0i64; d];
    let entries = DMatrix::from_fn(m, m, |i, k| {
        for j in 0..d {
            diff[j] = indices[i][j] - indices[k][j];
        }
        table.get_diff(&diff).expect("range checked above")
    });
    let hermitian_defect = linalg::hermitian_defect(&entries);
    let factor = entries
        .clone()
        .cholesky()
        .ok_or(Error::CholeskyFailure { size: m })?
        .unpack();
    let pivots: Vec<f64> = (0..m).map(|i| factor[(i, i)].norm_sqr()).collect();
    let pmax = pivots.iter().copied().fold(0.0, f64::max);
    let pmin = pivots.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(GramMatrix {
        indices: indices.to_vec(),
        entries,
        factor,
        max_index: MultiIndex::new(hi),
        diagnostics: GramDiagnostics {
            size: m,
            hermitian_defect,
            pivot_ratio: pmax / pmin,
        },
    })
}

/// Rejects points outside the open unit polydisk.
pub(crate) fn check_point(d: usize, z: &[Complex64]) -> Result<()> {
    check_dim(d, z.len())?;
    if z.iter().all(|w| w.norm() < 1.0) {
        Ok(())
    } else {
        Err(Error::OutsideDomain)
    }
}

impl GramMatrix {
    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Lower-triangular `L` with `C = L L*`.
    pub fn cholesky_factor(&self) -> &DMatrix<Complex64> {
        &self.factor
    }

    pub fn diagnostics(&self) -> &GramDiagnostics {
        &self.diagnostics
    }

    pub fn size(&self) -> usize {
        self.indices.len()
    }

    pub fn dim(&self) -> usize {
        self.max_index.dim()
    }

    /// Ascending eigenvalues of the Gram matrix.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.entries)
    }

    /// `v(z) = (z^α)_{α ∈ X}`.
    pub fn monomial_vector(&self, z: &[Complex64]) -> DVector<Complex64> {
        let powers = PowerTable::new(z, &self.max_index);
        DVector::from_iterator(self.size(), self.indices.iter().map(|a| powers.monomial(a)))
    }

    /// `y(z) = L^{-1} v(z)`, so that `K(z, ζ) = y(ζ)* y(z)`.
    pub fn feature_vector(&self, z: &[Complex64]) -> Result<DVector<Complex64>> {
        check_point(self.dim(), z)?;
        Ok(self.feature_unchecked(z))
    }

    pub(crate) fn feature_unchecked(&self, z: &[Complex64]) -> DVector<Complex64> {
        let v = self.monomial_vector(z);
        self.factor
            .solve_lower_triangular(&v)
            .expect("Cholesky factor has a nonzero diagonal")
    }

    /// Feature vectors of several points as the columns of one matrix.
    pub(crate) fn feature_matrix(&self, points: &[Vec<Complex64>]) -> DMatrix<Complex64> {
        let mut v = DMatrix::zeros(self.size(), points.len());
        for (c, z) in points.iter().enumerate() {
            v.set_column(c, &self.monomial_vector(z));
        }
        self.factor
            .solve_lower_triangular(&v)
            .expect("Cholesky factor has a nonzero diagonal")
    }

    /// Reproducing kernel of the spanned subspace at `(z, ζ)`.
    pub fn rk_evaluate(&self, z: &[Complex64], zeta: &[Complex64]) -> Result<Complex64> {
        let yz = self.feature_vector(z)?;
        let yw = self.feature_vector(zeta)?;
        Ok(yw.dotc(&yz))
    }

    /// `C^{-1} v(ζ)` by two triangular solves.
    pub fn solve(&self, zeta: &[Complex64]) -> DVector<Complex64> {
        let y = self.feature_unchecked(zeta);
        self.factor
            .adjoint()
            .solve_upper_triangular(&y)
            .expect("Cholesky factor has a nonzero diagonal")
    }
}

/// `max_γ |Σ_α C_{γ-α} x_α - ζ^γ|` over the index list, with `x = C^{-1} v(ζ)`
/// and the moments read back from `table`.
pub fn reproducing_property_residual(
    gram: &GramMatrix,
    table: &MomentTable,
    zeta: &[Complex64],
) -> Result<f64> {
    check_point(gram.dim(), zeta)?;
    let x = gram.solve(zeta);
    let v = gram.monomial_vector(zeta);
    let d = gram.dim();
    let mut diff = alloc::vec![0i64; d];
    let mut worst = 0.0f64;
    for (i, gamma) in gram.indices.iter().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, alpha) in gram.indices.iter().enumerate() {
            for j in 0..d {
                diff[j] = gamma[j] - alpha[j];
            }
            acc += table.get_diff(&diff).ok_or(Error::OutOfRange)? * x[k];
        }
        worst = worst.max((acc - v[i]).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{enumerate, IndexSetExpr};
    use crate::moments::compute_moments;
    use crate::poly::StablePolynomial;
    use approx::assert_abs_diff_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn mi<const D: usize>(a: [i64; D]) -> MultiIndex {
        MultiIndex::from(a)
    }

    fn half_table(r: i64) -> MomentTable {
        let p = StablePolynomial::univariate(1, 0, &[c(1.0), c(-0.5)]).unwrap();
        compute_moments(&p, &mi([r]), 64).unwrap()
    }

    #[test]
    fn two_by_two_geometric() {
        let g = build_gram(&half_table(2), &[mi([0]), mi([1])]).unwrap();
        let e = g.entries();
        assert_abs_diff_eq!(e[(0, 0)].re, 4.0 / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)].re, 2.0 / 3.0, epsilon = 1e-14);
        let ev = g.eigenvalues();
        assert_abs_diff_eq!(ev[0], 2.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ev[1], 2.0, epsilon = 1e-13);
        assert!(ev[0] >= 4.0 / 9.0 && ev[1] <= 4.0);
    }

    #[test]
    fn lebesgue_gram_is_identity() {
        let one = StablePolynomial::constant(mi([1, 1]), c(1.0));
        let t = compute_moments(&one, &mi([3, 3]), 64).unwrap();
        let idx = enumerate(&IndexSetExpr::BSet(mi([1, 1])), &mi([4, 4])).unwrap();
        let g = build_gram(&t, &idx).unwrap();
        let eye = DMatrix::<Complex64>::identity(idx.len(), idx.len());
        assert!((g.entries() - eye).camax() < 1e-15);
    }

    #[test]
    fn product_singleton() {
        let a = StablePolynomial::univariate(2, 0, &[c(1.0), c(-0.5)]).unwrap();
        let b = StablePolynomial::univariate(2, 1, &[c(1.0), c(-1.0 / 3.0)]).unwrap();
        let t = compute_moments(&a.mul(&b).unwrap(), &mi([1, 1]), 64).unwrap();
        let g = build_gram(&t, &[mi([0, 0])]).unwrap();
        assert_abs_diff_eq!(g.entries()[(0, 0)].re, 1.5, epsilon = 1e-14);
    }

    #[test]
    fn rejects_bad_index_lists() {
        let t = half_table(2);
        assert_eq!(build_gram(&t, &[]).unwrap_err(), Error::EmptyIndexSet);
        assert_eq!(
            build_gram(&t, &[mi([0]), mi([0])]).unwrap_err(),
            Error::DuplicateGramIndex
        );
        assert_eq!(build_gram(&t, &[mi([0]), mi([3])]).unwrap_err(), Error::OutOfRange);
        assert!(matches!(
            build_gram(&t, &[mi([0, 0])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rk_examples() {
        let t = half_table(2);
        let g = build_gram(&t, &[mi([0])]).unwrap();
        let v = g.rk_evaluate(&[c(0.3)], &[Complex64::new(-0.2, 0.4)]).unwrap();
        assert_abs_diff_eq!((v - c(0.75)).norm(), 0.0, epsilon = 1e-14);

        let g = build_gram(&t, &[mi([0]), mi([1])]).unwrap();
        assert_abs_diff_eq!(g.rk_evaluate(&[c(0.0)], &[c(0.0)]).unwrap().re, 1.0, epsilon = 1e-14);

        let one = StablePolynomial::constant(mi([1, 1]), c(1.0));
        let t = compute_moments(&one, &mi([1, 1]), 64).unwrap();
        let g = build_gram(&t, &[mi([0, 0]), mi([0, 1]), mi([1, 0])]).unwrap();
        let z = [c(0.5), c(0.5)];
        assert_abs_diff_eq!(g.rk_evaluate(&z, &z).unwrap().re, 1.5, epsilon = 1e-15);
        assert_eq!(g.rk_evaluate(&[c(1.0), c(0.0)], &z).unwrap_err(), Error::OutsideDomain);
    }

    #[test]
    fn reproducing_residuals() {
        let t = half_table(2);
        let g = build_gram(&t, &[mi([0]), mi([1])]).unwrap();
        assert!(reproducing_property_residual(&g, &t, &[c(0.0)]).unwrap() < 1e-14);
        assert!(reproducing_property_residual(&g, &t, &[c(0.3)]).unwrap() < 1e-10);

        let one = StablePolynomial::constant(mi([0, 0]), c(1.0));
        let t = compute_moments(&one, &mi([2, 2]), 64).unwrap();
        let idx = enumerate(&IndexSetExpr::Orthant, &mi([3, 3])).unwrap();
        let g = build_gram(&t, &idx).unwrap();
        let r = reproducing_property_residual(&g, &t, &[Complex64::new(0.1, 0.7), c(-0.4)]).unwrap();
        assert!(r < 1e-15, "{r}");
    }

    #[test]
    fn feature_matrix_matches_pointwise() {
        let t = half_table(3);
        let g = build_gram(&t, &[mi([0]), mi([1]), mi([2])]).unwrap();
        let pts = alloc::vec![alloc::vec![c(0.1)], alloc::vec![Complex64::new(0.2, -0.5)]];
        let y = g.feature_matrix(&pts);
        for (col, z) in pts.iter().enumerate() {
            let yz = g.feature_vector(z).unwrap();
            assert!((y.column(col) - yz).camax() < 1e-15);
        }
    }
}
