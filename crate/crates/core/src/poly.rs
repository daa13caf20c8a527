//! Polynomials on the closed polydisk: evaluation, the reflection
//! `p̃(z) = z^n conj(p(1/conj z))`, the rational inner function `p̃/p`,
//! a numerical stability test, and the stable test corpus.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lattice::{box_points, check_dim, MultiIndex};
use crate::linalg;

/// A complex polynomial in `d` variables with a multi-degree bound `n`.
///
/// Coefficients are stored sparsely and keyed by multi-index; every stored
/// index lies in the box `0 <= α <= n`. Stability on the closed polydisk is
/// *not* implied by the type; see [`check_stability`].
#[derive(Clone, Debug, PartialEq)]
pub struct StablePolynomial {
    degree: MultiIndex,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl StablePolynomial {
    /// Builds a polynomial from `(index, coefficient)` terms. Indices must be
    /// unique and lie in `[0, degree]`. Exact zeros are dropped.
    pub fn new<I>(degree: MultiIndex, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        if !degree.is_nonnegative() {
            return Err(Error::InvalidParameter(format!(
                "degree bound {degree} has a negative component"
            )));
        }
        let mut coeffs = BTreeMap::new();
        for (alpha, c) in terms {
            check_dim(degree.dim(), alpha.dim())?;
            if !alpha.is_nonnegative() || !alpha.leq(&degree)? {
                return Err(Error::IndexOutsideBox);
            }
            if coeffs.contains_key(&alpha) {
                return Err(Error::DuplicateIndex);
            }
            if c != Complex64::new(0.0, 0.0) {
                coeffs.insert(alpha, c);
            }
        }
        Ok(StablePolynomial { degree, coeffs })
    }

    /// The constant `c` in `d` variables with degree bound `degree`.
    pub fn constant(degree: MultiIndex, c: Complex64) -> Self {
        let d = degree.dim();
        Self::new(degree, [(MultiIndex::zeros(d), c)]).expect("origin is inside every box")
    }

    pub fn dim(&self) -> usize {
        self.degree.dim()
    }

    /// The degree bound `n`.
    pub fn degree(&self) -> &MultiIndex {
        &self.degree
    }

    /// Nonzero coefficients in graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs.get(alpha).copied().unwrap_or_default()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Componentwise maximum exponent over the nonzero terms.
    pub fn actual_degree(&self) -> MultiIndex {
        let d = self.dim();
        let mut out = vec![0i64; d];
        for alpha in self.coeffs.keys() {
            for j in 0..d {
                out[j] = out[j].max(alpha[j]);
            }
        }
        MultiIndex::new(out)
    }

    /// Returns the same polynomial with a different degree bound.
    pub fn with_degree(&self, degree: MultiIndex) -> Result<Self> {
        check_dim(self.dim(), degree.dim())?;
        let actual = self.actual_degree();
        for j in 0..self.dim() {
            if actual[j] > degree[j] {
                return Err(Error::DegreeExceedsBound {
                    variable: j,
                    degree: actual[j],
                    bound: degree[j],
                });
            }
        }
        Ok(StablePolynomial {
            degree,
            coeffs: self.coeffs.clone(),
        })
    }

    /// `Σ_α c_α z^α`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        check_dim(self.dim(), z.len())?;
        Ok(self.eval_unchecked(z))
    }

    pub(crate) fn eval_unchecked(&self, z: &[Complex64]) -> Complex64 {
        let powers = PowerTable::new(z, &self.degree);
        self.coeffs
            .iter()
            .map(|(alpha, c)| c * powers.monomial(alpha))
            .sum()
    }

    /// `p̃_α = conj(p_{n-α})` for `0 <= α <= n`; the result carries bound `n`.
    pub fn reflect(&self, n: &MultiIndex) -> Result<Self> {
        let with_bound = self.with_degree(n.clone())?;
        let terms = with_bound
            .coeffs
            .iter()
            .map(|(alpha, c)| (n - alpha, c.conj()));
        StablePolynomial::new(n.clone(), terms)
    }

    /// Reflection with respect to the polynomial's own degree bound.
    pub fn reflected(&self) -> Self {
        self.reflect(&self.degree)
            .expect("own degree bound always dominates the support")
    }

    /// Evaluates the rational inner function `p̃(z)/p(z)` at a point of the
    /// open polydisk.
    pub fn inner_eval(&self, n: &MultiIndex, z: &[Complex64]) -> Result<Complex64> {
        check_dim(self.dim(), z.len())?;
        if z.iter().any(|w| w.norm() >= 1.0) {
            return Err(Error::OutsideDomain);
        }
        let reflected = self.reflect(n)?;
        inner_value(self, &reflected, z)
    }

    /// Product of two polynomials in the same variables.
    pub fn mul(&self, other: &StablePolynomial) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        let degree = &self.degree + &other.degree;
        let mut acc: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                *acc.entry(a + b).or_default() += ca * cb;
            }
        }
        StablePolynomial::new(degree, acc)
    }

    /// Embeds a univariate coefficient vector `c_0 + c_1 w + ...` as a
    /// polynomial in variable `j` of `d` variables.
    pub fn univariate(d: usize, j: usize, coeffs: &[Complex64]) -> Result<Self> {
        if j >= d {
            return Err(Error::InvalidParameter(format!("variable {j} out of range for d = {d}")));
        }
        let deg = coeffs.len().saturating_sub(1) as i64;
        let degree = MultiIndex::zeros(d).with_entry(j, deg);
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (MultiIndex::zeros(d).with_entry(j, k as i64), c));
        StablePolynomial::new(degree, terms)
    }

    /// A SHA-256 digest of the dimension, degree bound and coefficient bits,
    /// rendered as lowercase hex. Identical polynomials hash identically.
    pub fn identity_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dim() as u64).to_le_bytes());
        for &n in self.degree.entries() {
            h.update(n.to_le_bytes());
        }
        for (alpha, c) in &self.coeffs {
            for &a in alpha.entries() {
                h.update(a.to_le_bytes());
            }
            h.update(c.re.to_bits().to_le_bytes());
            h.update(c.im.to_bits().to_le_bytes());
        }
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for byte in digest {
            let _ = write!(out, "{byte:02x}");
        }
        out
    }
}

/// `p̃(z)/p(z)` given both polynomials.
pub(crate) fn inner_value(
    p: &StablePolynomial,
    reflected: &StablePolynomial,
    z: &[Complex64],
) -> Result<Complex64> {
    let pz = p.eval_unchecked(z);
    let scale: f64 = p.terms().map(|(_, c)| c.norm()).sum();
    if pz.norm() <= 1e-14 * scale {
        return Err(Error::Vanishing);
    }
    Ok(reflected.eval_unchecked(z) / pz)
}

/// Per-variable powers `z_j^k` for `k <= n_j`.
pub(crate) struct PowerTable {
    powers: Vec<Vec<Complex64>>,
}

impl PowerTable {
    pub(crate) fn new(z: &[Complex64], max: &MultiIndex) -> Self {
        let powers = z
            .iter()
            .enumerate()
            .map(|(j, &w)| {
                let top = max[j].max(0) as usize;
                let mut row = Vec::with_capacity(top + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                for _ in 0..=top {
                    row.push(acc);
                    acc *= w;
                }
                row
            })
            .collect();
        PowerTable { powers }
    }

    pub(crate) fn monomial(&self, alpha: &MultiIndex) -> Complex64 {
        alpha
            .entries()
            .iter()
            .zip(&self.powers)
            .map(|(&a, row)| row[a as usize])
            .product()
    }
}

/// Default torus grid per circle: 256 for `d <= 2`, 64 for `d = 3`, 32 beyond.
pub fn default_stability_grid(d: usize) -> usize {
    match d {
        0..=2 => 256,
        3 => 64,
        _ => 32,
    }
}

pub const DEFAULT_MARGIN_THRESHOLD: f64 = 1e-6;

/// One stage of the telescoping test.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    /// Zero-based index of the variable swept over the closed disk.
    pub variable: usize,
    /// Number of univariate slices examined.
    pub slices: usize,
    /// Smallest root modulus over all slices (`inf` when no slice has roots).
    pub min_root_modulus: f64,
    /// A slice vanished identically.
    pub degenerate: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityVerdict {
    pub stable: bool,
    /// Minimum of `|p|` over the dense torus grid.
    pub margin: f64,
    /// Maximum of `|p|` over the same grid.
    pub torus_max: f64,
    pub grid: usize,
    pub threshold: f64,
    pub stages: Vec<StageRecord>,
}

/// Numerical stability test on the closed polydisk.
///
/// Stage `k` puts variables `0..k` on a torus grid, freezes the trailing
/// variables at 1 and requires every root of the univariate slice in `z_k` to
/// have modulus above `1 + margin_threshold`. A dense torus-grid minimum of
/// `|p|` completes the verdict.
pub fn check_stability(
    p: &StablePolynomial,
    grid: usize,
    margin_threshold: f64,
) -> Result<StabilityVerdict> {
    if grid < 16 {
        return Err(Error::InvalidGrid {
            grid,
            reason: "stability grid needs at least 16 points per circle",
        });
    }
    let d = p.dim();
    let circle: Vec<Complex64> = (0..grid)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid as f64))
        .collect();

    let mut stages = Vec::with_capacity(d);
    for k in 0..d {
        stages.push(telescoping_stage(p, k, &circle, margin_threshold)?);
    }

    let (torus_min, torus_max) = torus_extremes(p, grid);
    let stable = stages.iter().all(|s| s.pass) && torus_min > margin_threshold;
    Ok(StabilityVerdict {
        stable,
        margin: torus_min,
        torus_max,
        grid,
        threshold: margin_threshold,
        stages,
    })
}

/// [`check_stability`] with the default grid for the dimension and the
/// default margin threshold.
pub fn check_stability_default(p: &StablePolynomial) -> StabilityVerdict {
    check_stability(p, default_stability_grid(p.dim()), DEFAULT_MARGIN_THRESHOLD)
        .expect("default grid is valid")
}

fn telescoping_stage(
    p: &StablePolynomial,
    k: usize,
    circle: &[Complex64],
    threshold: f64,
) -> Result<StageRecord> {
    let grid = circle.len();
    let slice_len = p.degree()[k] as usize + 1;
    let slices = grid.pow(k as u32);
    let scale: f64 = p.terms().map(|(_, c)| c.norm()).sum();

    let mut min_root = f64::INFINITY;
    let mut degenerate = false;
    let mut counter = vec![0usize; k];
    for _ in 0..slices {
        let mut slice = vec![Complex64::new(0.0, 0.0); slice_len];
        for (alpha, c) in p.terms() {
            let mut w = *c;
            for (i, &ci) in counter.iter().enumerate() {
                let e = alpha[i] as usize;
                w *= circle[(ci * e) % grid];
            }
            // trailing variables are frozen at 1
            slice[alpha[k] as usize] += w;
        }
        match univariate_root_modulus(&slice, scale)? {
            None => degenerate = true,
            Some(m) => min_root = min_root.min(m),
        }
        for i in (0..k).rev() {
            counter[i] += 1;
            if counter[i] < grid {
                break;
            }
            counter[i] = 0;
        }
    }
    let pass = !degenerate && min_root > 1.0 + threshold;
    Ok(StageRecord {
        variable: k,
        slices,
        min_root_modulus: min_root,
        degenerate,
        pass,
    })
}

/// Smallest root modulus of a univariate polynomial, `inf` for a nonzero
/// constant, `None` for the zero polynomial.
fn univariate_root_modulus(coeffs: &[Complex64], scale: f64) -> Result<Option<f64>> {
    let tol = 1e-13 * scale.max(f64::MIN_POSITIVE);
    let mut top = coeffs.len();
    while top > 0 && coeffs[top - 1].norm() <= tol {
        top -= 1;
    }
    match top {
        0 => Ok(None),
        1 => Ok(Some(f64::INFINITY)),
        _ => {
            let roots = linalg::polynomial_roots(&coeffs[..top])?;
            Ok(Some(
                roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min),
            ))
        }
    }
}

/// Minimum and maximum of `|p|` on a uniform `grid^d` torus grid.
///
/// Works line by line along the last variable: the slice coefficients are
/// formed once per line and evaluated by Horner's rule.
pub fn torus_extremes(p: &StablePolynomial, grid: usize) -> (f64, f64) {
    let d = p.dim();
    let last = d - 1;
    let circle: Vec<Complex64> = (0..grid)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / grid as f64))
        .collect();
    let terms: Vec<(Vec<usize>, Complex64)> = p
        .terms()
        .map(|(a, c)| (a.entries().iter().map(|&e| e as usize).collect(), *c))
        .collect();
    let slice_len = p.degree()[last] as usize + 1;
    let lines = grid.pow(last as u32);
    let mut counter = vec![0usize; last];
    let mut slice = vec![Complex64::new(0.0, 0.0); slice_len];
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for _ in 0..lines {
        slice.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
        for (alpha, c) in &terms {
            let mut w = *c;
            for (j, &cj) in counter.iter().enumerate() {
                w *= circle[(cj * alpha[j]) % grid];
            }
            slice[alpha[last]] += w;
        }
        for &t in &circle {
            let v = slice.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c);
            let m = v.norm_sqr();
            lo = lo.min(m);
            hi = hi.max(m);
        }
        for j in (0..last).rev() {
            counter[j] += 1;
            if counter[j] < grid {
                break;
            }
            counter[j] = 0;
        }
    }
    (libm::sqrt(lo), libm::sqrt(hi))
}

/// Refuses polynomials that fail the default stability test.
pub(crate) fn ensure_stable(p: &StablePolynomial) -> Result<StabilityVerdict> {
    let verdict = check_stability_default(p);
    if verdict.stable {
        Ok(verdict)
    } else {
        Err(Error::Unstable {
            margin: verdict.margin,
        })
    }
}

/// A univariate factor `scale · Π_i (1 - w / r_i)` in root form.
#[derive(Clone, Debug, PartialEq)]
pub struct RootFactor {
    pub scale: Complex64,
    pub roots: Vec<Complex64>,
}

impl RootFactor {
    pub fn new(scale: Complex64, roots: Vec<Complex64>) -> Self {
        RootFactor { scale, roots }
    }

    /// Ascending coefficient vector.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut c = vec![self.scale];
        for r in &self.roots {
            let a = -r.inv();
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, &ck) in c.iter().enumerate() {
                next[k] += ck;
                next[k + 1] += ck * a;
            }
            c = next;
        }
        c
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.scale == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter("factor scale must be nonzero".into()));
        }
        if let Some(r) = self.roots.iter().find(|r| r.norm() <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "root {r} lies in the closed unit disk"
            )));
        }
        Ok(())
    }
}

/// Parameters of the stable test corpus.
#[derive(Clone, Debug, PartialEq)]
pub enum CorpusKind {
    /// `c - Σ_j a_j z_j` with `Σ |a_j| < |c|`.
    Affine {
        constant: Complex64,
        weights: Vec<Complex64>,
    },
    /// `Π_j q_j(z_j)`, one root-form factor per variable.
    Separable { factors: Vec<RootFactor> },
    /// `det(I - K Z)` with `Z = diag(z_1 I_{n_1}, ..., z_d I_{n_d})` and
    /// operator norm `||K|| < 1`.
    Determinantal {
        matrix: DMatrix<Complex64>,
        blocks: MultiIndex,
    },
}

impl CorpusKind {
    /// Separable factors with `degree` roots per variable, moduli drawn from
    /// `[min_modulus, max_modulus]` and uniform arguments.
    pub fn random_separable(
        d: usize,
        degree: usize,
        min_modulus: f64,
        max_modulus: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let factors = (0..d)
            .map(|_| {
                let roots = (0..degree)
                    .map(|_| {
                        let r = rng.gen_range(min_modulus..=max_modulus);
                        let t = rng.gen_range(0.0..2.0 * PI);
                        Complex64::from_polar(r, t)
                    })
                    .collect();
                RootFactor::new(Complex64::new(1.0, 0.0), roots)
            })
            .collect();
        CorpusKind::Separable { factors }
    }

    /// A seeded complex matrix rescaled to operator norm `norm`, with block
    /// sizes `blocks` (its order is `Σ blocks`).
    pub fn random_determinantal(blocks: MultiIndex, norm: f64, seed: u64) -> Self {
        let m = blocks.entries().iter().sum::<i64>().max(0) as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(m, m, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let current = linalg::operator_norm(&raw);
        let matrix = if current > 0.0 {
            raw.map(|c| c * (norm / current))
        } else {
            raw
        };
        CorpusKind::Determinantal { matrix, blocks }
    }
}

/// Builds a corpus polynomial and confirms it with [`check_stability`].
pub fn gen_corpus(kind: &CorpusKind) -> Result<StablePolynomial> {
    let p = match kind {
        CorpusKind::Affine { constant, weights } => {
            let d = weights.len();
            if d == 0 {
                return Err(Error::InvalidParameter("affine corpus needs d >= 1".into()));
            }
            let total: f64 = weights.iter().map(|a| a.norm()).sum();
            if total >= constant.norm() {
                return Err(Error::InvalidParameter(format!(
                    "affine weights sum to {total}, not below |c| = {}",
                    constant.norm()
                )));
            }
            let mut terms = vec![(MultiIndex::zeros(d), *constant)];
            for (j, a) in weights.iter().enumerate() {
                terms.push((MultiIndex::unit(d, j), -a));
            }
            StablePolynomial::new(MultiIndex::splat(d, 1), terms)?
        }
        CorpusKind::Separable { factors } => {
            let d = factors.len();
            if d == 0 {
                return Err(Error::InvalidParameter("separable corpus needs d >= 1".into()));
            }
            let mut acc = StablePolynomial::constant(MultiIndex::zeros(d), Complex64::new(1.0, 0.0));
            for (j, f) in factors.iter().enumerate() {
                f.validate()?;
                acc = acc.mul(&StablePolynomial::univariate(d, j, &f.coefficients())?)?;
            }
            acc
        }
        CorpusKind::Determinantal { matrix, blocks } => determinantal(matrix, blocks)?,
    };
    let verdict = check_stability_default(&p);
    if !verdict.stable {
        return Err(Error::Unstable {
            margin: verdict.margin,
        });
    }
    Ok(p)
}

fn determinantal(matrix: &DMatrix<Complex64>, blocks: &MultiIndex) -> Result<StablePolynomial> {
    let d = blocks.dim();
    if d == 0 || !blocks.is_nonnegative() {
        return Err(Error::InvalidParameter("block sizes must be nonnegative, d >= 1".into()));
    }
    let m = blocks.entries().iter().sum::<i64>() as usize;
    if matrix.nrows() != m || matrix.ncols() != m {
        return Err(Error::InvalidParameter(format!(
            "matrix is {}x{}, block sizes sum to {m}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let norm = linalg::operator_norm(matrix);
    if norm >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "operator norm {norm} is not below 1"
        )));
    }
    // variable owning each row of Z
    let owner: Vec<usize> = (0..d)
        .flat_map(|j| core::iter::repeat_n(j, blocks[j] as usize))
        .collect();

    // Interpolate on (n_j + 1)-th roots of unity; the degree in z_j is at most n_j.
    let sizes = MultiIndex::new(blocks.entries().iter().map(|&b| b + 1).collect());
    let nodes = box_points(&sizes)?;
    let total = nodes.len() as f64;
    let omega = |j: usize, k: i64| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / sizes[j] as f64);

    let values: Vec<(MultiIndex, Complex64)> = nodes
        .iter()
        .map(|node| {
            let mut a = DMatrix::<Complex64>::identity(m, m);
            for r in 0..m {
                for c in 0..m {
                    let w = omega(owner[c], node[owner[c]]);
                    a[(r, c)] -= matrix[(r, c)] * w;
                }
            }
            (node.clone(), a.determinant())
        })
        .collect();

    let mut terms = Vec::new();
    for alpha in &nodes {
        let mut c = Complex64::new(0.0, 0.0);
        for (node, v) in &values {
            let mut w = *v;
            for j in 0..d {
                w *= omega(j, -(alpha[j] * node[j]) % sizes[j]);
            }
            c += w;
        }
        c /= total;
        let c = Complex64::new(clean(c.re), clean(c.im));
        terms.push((alpha.clone(), c));
    }
    StablePolynomial::new(blocks.clone(), terms)
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-14 {
        0.0
    } else {
        x
    }
}
