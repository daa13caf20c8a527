//! The kernels `K_S`, `L_S` at truncation level `N`, the Schur-normalized
//! pairs built from them, and truncation sweeps.
//!
//! Indexing follows the swapped convention: `K_S` is the kernel of
//! `X_T ∩ [0,N)^d` and `L_S` is the kernel of `X_T ⊖ (X_S ∩ X_T)`, so that
//! `𝒫 = K_S + L_T` in the limit `N → ∞`. At every finite `N`,
//! `K_S - L_S = K_T - L_T` is the kernel of `X_S ∩ X_T ∩ [0,N)^d`.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gram::build_gram;
use crate::kernel::{explicit_p, KernelHandle, Point};
use crate::lattice::{check_dim, enumerate, IndexSetExpr, MultiIndex, VarSet};
use crate::linalg::hermitian_eigenvalues;
use crate::moments::MomentTable;
use crate::poly::{inner_value, StablePolynomial};

/// A polynomial, its degree bound, a partition `S ⊔ T` and a truncation level.
#[derive(Clone, Debug)]
pub struct DecompositionSpec {
    pub p: StablePolynomial,
    pub n: MultiIndex,
    /// Zero-based variable set; `T` is its complement.
    pub s: VarSet,
    pub truncation: usize,
}

impl DecompositionSpec {
    pub fn new(p: StablePolynomial, n: MultiIndex, s: VarSet, truncation: usize) -> Result<Self> {
        let d = p.dim();
        check_dim(d, n.dim())?;
        if d < 2 {
            return Err(Error::InvalidPartition("a partition needs at least two variables"));
        }
        if s.is_empty() || s.span() > d || s == VarSet::full(d) {
            return Err(Error::InvalidPartition("S must be a nonempty proper subset"));
        }
        if truncation == 0 {
            return Err(Error::InvalidParameter("truncation level must be positive".into()));
        }
        p.reflect(&n)?;
        Ok(DecompositionSpec {
            p,
            n,
            s,
            truncation,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn t(&self) -> VarSet {
        self.s.complement(self.dim())
    }

    /// The same partition at another truncation level.
    pub fn at(&self, truncation: usize) -> Self {
        DecompositionSpec {
            truncation,
            ..self.clone()
        }
    }

    /// The same truncation with the roles of `S` and `T` exchanged.
    pub fn swapped(&self) -> Self {
        DecompositionSpec {
            s: self.t(),
            ..self.clone()
        }
    }

    fn cube(&self) -> MultiIndex {
        MultiIndex::splat(self.dim(), self.truncation as i64)
    }
}

/// Moment table plus a cache of factored Gram matrices keyed by index list.
pub struct Workspace {
    table: MomentTable,
    grams: BTreeMap<Vec<MultiIndex>, Arc<crate::gram::GramMatrix>>,
}

impl Workspace {
    pub fn new(table: MomentTable) -> Self {
        Workspace {
            table,
            grams: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> &MomentTable {
        &self.table
    }

    fn check(&self, p: &StablePolynomial, truncation: usize) -> Result<()> {
        check_dim(self.table.dim(), p.dim())?;
        if self.table.poly_hash() != p.identity_hash() {
            return Err(Error::InvalidParameter(
                "moment table belongs to a different polynomial".into(),
            ));
        }
        if self.table.range().entries().iter().any(|&r| r + 1 < truncation as i64) {
            return Err(Error::OutOfRange);
        }
        Ok(())
    }

    /// Reproducing kernel of `expr ∩ box`; the zero kernel when that set is
    /// empty.
    pub fn subspace(&mut self, expr: &IndexSetExpr, bx: &MultiIndex) -> Result<KernelHandle> {
        let indices = enumerate(expr, bx)?;
        if indices.is_empty() {
            return Ok(KernelHandle::Constant(0.0));
        }
        if let Some(g) = self.grams.get(&indices) {
            return Ok(KernelHandle::GramSubspace(g.clone()));
        }
        let g = Arc::new(build_gram(&self.table, &indices)?);
        self.grams.insert(indices, g.clone());
        Ok(KernelHandle::GramSubspace(g))
    }

    /// Kernel of `X_S ∩ [0,N)^d` (with `X_∅ = {0}`).
    pub fn x_union(&mut self, s: VarSet, n: &MultiIndex, truncation: usize) -> Result<KernelHandle> {
        let bx = MultiIndex::splat(n.dim(), truncation as i64);
        self.subspace(&IndexSetExpr::XUnion(s, n.clone()), &bx)
    }
}

/// `K_S^N`: the kernel of `X_T ∩ [0,N)^d`.
pub fn build_ks(ws: &mut Workspace, spec: &DecompositionSpec) -> Result<KernelHandle> {
    ws.check(&spec.p, spec.truncation)?;
    ws.x_union(spec.t(), &spec.n, spec.truncation)
}

/// `L_S^N`: kernel of `X_T ∩ box` minus kernel of `X_S ∩ X_T ∩ box`.
pub fn build_ls(ws: &mut Workspace, spec: &DecompositionSpec) -> Result<KernelHandle> {
    ws.check(&spec.p, spec.truncation)?;
    let outer = ws.x_union(spec.t(), &spec.n, spec.truncation)?;
    let inner = intersection_kernel(ws, spec)?;
    Ok(KernelHandle::difference(outer, inner))
}

fn intersection_kernel(ws: &mut Workspace, spec: &DecompositionSpec) -> Result<KernelHandle> {
    let expr = IndexSetExpr::intersect(
        IndexSetExpr::XUnion(spec.s, spec.n.clone()),
        IndexSetExpr::XUnion(spec.t(), spec.n.clone()),
    );
    ws.subspace(&expr, &spec.cube())
}

#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub p_kernel: KernelHandle,
    pub k_s: KernelHandle,
    pub l_s: KernelHandle,
    pub k_t: KernelHandle,
    pub l_t: KernelHandle,
    pub truncation: usize,
    pub n_points: usize,
    /// `max |𝒫 - K_S^N - L_T^N|` over all point pairs.
    pub max_residual: f64,
    /// The same maximum restricted to the diagonal.
    pub max_diagonal_residual: f64,
}

/// Builds all four kernels and measures `𝒫 - K_S^N - L_T^N` on `points`.
pub fn decompose(
    ws: &mut Workspace,
    spec: &DecompositionSpec,
    points: &[Point],
) -> Result<DecompositionResult> {
    let swapped = spec.swapped();
    let k_s = build_ks(ws, spec)?;
    let l_s = build_ls(ws, spec)?;
    let k_t = build_ks(ws, &swapped)?;
    let l_t = build_ls(ws, &swapped)?;
    let p_kernel = explicit_p(&spec.p, &spec.n)?;
    let resid = KernelHandle::difference(
        p_kernel.clone(),
        KernelHandle::sum(k_s.clone(), l_t.clone()),
    )
    .matrix(points)?;
    Ok(DecompositionResult {
        p_kernel,
        k_s,
        l_s,
        k_t,
        l_t,
        truncation: spec.truncation,
        n_points: points.len(),
        max_residual: max_abs(&resid),
        max_diagonal_residual: (0..points.len())
            .map(|i| resid[(i, i)].norm())
            .fold(0.0, f64::max),
    })
}

/// `max |(K_S^N - L_S^N) - (K_T^N - L_T^N)|` over point pairs.
pub fn exact_difference_identity(
    ws: &mut Workspace,
    spec: &DecompositionSpec,
    points: &[Point],
) -> Result<f64> {
    let swapped = spec.swapped();
    let left = KernelHandle::difference(build_ks(ws, spec)?, build_ls(ws, spec)?);
    let right = KernelHandle::difference(build_ks(ws, &swapped)?, build_ls(ws, &swapped)?);
    Ok(max_abs(&KernelHandle::difference(left, right).matrix(points)?))
}

/// `K(z, ζ) / (p(z) conj p(ζ))`.
pub fn schur_normalize(k: KernelHandle, p: &StablePolynomial) -> KernelHandle {
    KernelHandle::normalized(k, p.clone())
}

/// Two kernels together with the residual of the identity they satisfy.
#[derive(Clone, Debug)]
pub struct KernelPair {
    pub first: KernelHandle,
    pub second: KernelHandle,
    /// Largest identity defect over all point pairs.
    pub residual: f64,
}

/// `(Γ_1, Γ_2)` for `d = 2` with
/// `1 - f(z) conj f(ζ) = (1 - z_1 conj ζ_1) Γ_1 + (1 - z_2 conj ζ_2) Γ_2`.
pub fn agler_pair(
    ws: &mut Workspace,
    p: &StablePolynomial,
    n: &MultiIndex,
    truncation: usize,
    points: &[Point],
) -> Result<KernelPair> {
    if p.dim() != 2 {
        return Err(Error::InvalidParameter("the Agler pair is defined for d = 2".into()));
    }
    let g = gkvw_pair(ws, p, n, 0, 1, truncation, points)?;
    // Γ_2 is the S = {1} member, Γ_1 the T = {2} member
    Ok(KernelPair {
        first: g.second,
        second: g.first,
        residual: g.residual,
    })
}

/// `(K, K')` with `S = {j}`, `T` its complement and `k ∈ T`:
/// `1 - f(z) conj f(ζ) = Π_{r≠j}(1 - z_r conj ζ_r) K + Π_{r≠k}(1 - z_r conj ζ_r) K'`.
pub fn gkvw_pair(
    ws: &mut Workspace,
    p: &StablePolynomial,
    n: &MultiIndex,
    j: usize,
    k: usize,
    truncation: usize,
    points: &[Point],
) -> Result<KernelPair> {
    let d = p.dim();
    if j == k {
        return Err(Error::InvalidParameter("j and k must differ".into()));
    }
    if j >= d || k >= d {
        return Err(Error::InvalidParameter("variable index exceeds the dimension".into()));
    }
    let spec = DecompositionSpec::new(p.clone(), n.clone(), VarSet::singleton(j), truncation)?;
    let k_s = build_ks(ws, &spec)?;
    let l_t = build_ls(ws, &spec.swapped())?;
    let first = schur_normalize(KernelHandle::shift(j, k_s), p);
    let second = schur_normalize(KernelHandle::shift(k, l_t), p);

    let mut rhs = KernelHandle::sum(
        shift_all_but(d, j, first.clone()),
        shift_all_but(d, k, second.clone()),
    );
    rhs = KernelHandle::scaled(-1.0, rhs);
    let m = rhs.matrix(points)?;
    let reflected = p.reflect(n)?;
    let f: Vec<Complex64> = points
        .iter()
        .map(|z| inner_value(p, &reflected, z))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for a in 0..points.len() {
        for b in 0..points.len() {
            let lhs = Complex64::new(1.0, 0.0) - f[a] * f[b].conj();
            worst = worst.max((lhs + m[(a, b)]).norm());
        }
    }
    Ok(KernelPair {
        first,
        second,
        residual: worst,
    })
}

fn shift_all_but(d: usize, skip: usize, k: KernelHandle) -> KernelHandle {
    (0..d)
        .filter(|&r| r != skip)
        .fold(k, |acc, r| KernelHandle::shift(r, acc))
}

/// Diagnostics for one truncation level.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub truncation: usize,
    pub max_residual: f64,
    /// Smallest eigenvalue over `(1 - z_j conj ζ_j) K_S^N` and
    /// `(1 - z_j conj ζ_j) L_S^N`, `j ∈ S`.
    pub min_contractive_eig: f64,
    /// `K_S^N(ζ, ζ)` at every point.
    pub ks_diagonal: Vec<f64>,
}

/// Runs [`decompose`] and the contractivity spectra over an increasing
/// ladder of truncation levels.
pub fn truncation_sweep(
    ws: &mut Workspace,
    spec: &DecompositionSpec,
    ladder: &[usize],
    points: &[Point],
) -> Result<Vec<SweepRow>> {
    if ladder.is_empty() || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("ladder must be strictly increasing".into()));
    }
    let mut rows = Vec::with_capacity(ladder.len());
    for &level in ladder {
        let at = spec.at(level);
        let result = decompose(ws, &at, points)?;
        let mut min_eig = f64::INFINITY;
        for j in spec.s.iter() {
            for k in [&result.k_s, &result.l_s] {
                let m = KernelHandle::shift(j, k.clone()).matrix(points)?;
                let ev = hermitian_eigenvalues(&m);
                min_eig = min_eig.min(ev.first().copied().unwrap_or(0.0));
            }
        }
        let diag = result.k_s.matrix(points)?;
        rows.push(SweepRow {
            truncation: level,
            max_residual: result.max_residual,
            min_contractive_eig: min_eig,
            ks_diagonal: (0..points.len()).map(|i| diag[(i, i)].re).collect(),
        });
    }
    Ok(rows)
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|v| v.norm()).fold(0.0, f64::max)
}
