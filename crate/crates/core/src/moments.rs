//! Fourier moments of the Bernstein–Szegő measure `dμ = |p|^{-2} dσ` on the
//! torus.
//!
//! Convention: `C_γ = ∫ z^γ dμ`, so that `<z^α, z^β>_μ = C_{α-β}`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{Direction, Radix2};
use crate::lattice::{box_points, check_dim, enumerate, IndexSetExpr, MultiIndex};
use crate::poly::{ensure_stable, RootFactor, StablePolynomial};

/// The moment convention string carried by every serialized table and report.
pub const MOMENT_CONVENTION: &str = "C_gamma = int z^gamma dmu";

/// Moments `C_γ` for all `γ` in the symmetric box `[-R, R]^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    poly_hash: String,
    range: MultiIndex,
    grid: usize,
    /// row-major over `γ + R ∈ [0, 2R]^d`
    values: Vec<Complex64>,
    aliasing_error_estimate: f64,
}

impl MomentTable {
    /// Reassembles a table from stored parts (row-major values). Used by
    /// on-disk caches.
    pub fn from_parts(
        poly_hash: String,
        range: MultiIndex,
        grid: usize,
        values: Vec<Complex64>,
        aliasing_error_estimate: f64,
    ) -> Result<Self> {
        if !range.is_nonnegative() {
            return Err(Error::InvalidParameter("moment range must be nonnegative".into()));
        }
        let expected: usize = range.entries().iter().map(|&r| 2 * r as usize + 1).product();
        if values.len() != expected {
            return Err(Error::InvalidParameter(alloc::format!(
                "moment table holds {} values, range needs {expected}",
                values.len()
            )));
        }
        Ok(MomentTable {
            poly_hash,
            range,
            grid,
            values,
            aliasing_error_estimate,
        })
    }

    pub fn poly_hash(&self) -> &str {
        &self.poly_hash
    }

    pub fn range(&self) -> &MultiIndex {
        &self.range
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn dim(&self) -> usize {
        self.range.dim()
    }

    pub fn aliasing_error_estimate(&self) -> f64 {
        self.aliasing_error_estimate
    }

    /// Row-major values over `γ + R ∈ [0, 2R]^d`.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn covers(&self, gamma: &MultiIndex) -> bool {
        gamma.dim() == self.dim()
            && (0..self.dim()).all(|j| gamma[j].abs() <= self.range[j])
    }

    /// `C_γ`.
    pub fn get(&self, gamma: &MultiIndex) -> Result<Complex64> {
        check_dim(self.dim(), gamma.dim())?;
        if !self.covers(gamma) {
            return Err(Error::OutOfRange);
        }
        Ok(self.values[self.offset(gamma.entries())])
    }

    /// `C_γ` for a raw difference vector already known to be in range.
    pub(crate) fn get_diff(&self, gamma: &[i64]) -> Option<Complex64> {
        for (j, &g) in gamma.iter().enumerate() {
            if g.abs() > self.range[j] {
                return None;
            }
        }
        Some(self.values[self.offset(gamma)])
    }

    fn offset(&self, gamma: &[i64]) -> usize {
        let mut off = 0usize;
        for (j, &g) in gamma.iter().enumerate() {
            let width = 2 * self.range[j] as usize + 1;
            off = off * width + (g + self.range[j]) as usize;
        }
        off
    }

    /// Values listed in graded lexicographic order of `γ + R`.
    pub fn graded_values(&self) -> Vec<Complex64> {
        let bx = self.shifted_box();
        box_points(&bx)
            .expect("shifted box is nonempty")
            .iter()
            .map(|shifted| {
                let gamma: Vec<i64> = shifted
                    .entries()
                    .iter()
                    .zip(self.range.entries())
                    .map(|(s, r)| s - r)
                    .collect();
                self.values[self.offset(&gamma)]
            })
            .collect()
    }

    /// Inverse of [`MomentTable::graded_values`].
    pub fn from_graded(
        poly_hash: String,
        range: MultiIndex,
        grid: usize,
        graded: Vec<Complex64>,
        aliasing_error_estimate: f64,
    ) -> Result<Self> {
        let mut table = MomentTable::from_parts(
            poly_hash,
            range.clone(),
            grid,
            vec![Complex64::new(0.0, 0.0); graded.len()],
            aliasing_error_estimate,
        )?;
        let order = box_points(&table.shifted_box())?;
        for (shifted, v) in order.iter().zip(graded) {
            let gamma: Vec<i64> = shifted
                .entries()
                .iter()
                .zip(range.entries())
                .map(|(s, r)| s - r)
                .collect();
            let off = table.offset(&gamma);
            table.values[off] = v;
        }
        Ok(table)
    }

    fn shifted_box(&self) -> MultiIndex {
        MultiIndex::new(self.range.entries().iter().map(|r| 2 * r + 1).collect())
    }

    /// Largest `|C_{-γ} - conj(C_γ)|` relative to `C_0`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let zero = MultiIndex::zeros(d);
        let c0 = self.get(&zero).map(|c| c.norm()).unwrap_or(1.0);
        let mut worst = 0.0f64;
        let bx = self.shifted_box();
        for shifted in box_points(&bx).expect("nonempty") {
            let gamma: Vec<i64> = shifted
                .entries()
                .iter()
                .zip(self.range.entries())
                .map(|(s, r)| s - r)
                .collect();
            let neg: Vec<i64> = gamma.iter().map(|g| -g).collect();
            let a = self.values[self.offset(&gamma)];
            let b = self.values[self.offset(&neg)];
            worst = worst.max((b - a.conj()).norm());
        }
        worst / c0
    }
}

/// `max(64, next power of two >= 8 max_j R_j)`.
pub fn default_grid(range: &MultiIndex) -> usize {
    let r = range.max_entry().max(0) as usize;
    (8 * r).next_power_of_two().max(64)
}

/// Moments of `|p|^{-2} dσ` by `M`-point trapezoidal quadrature per circle,
/// evaluated with FFTs. The aliasing estimate is the largest change of any
/// stored moment when the grid is doubled.
pub fn compute_moments(p: &StablePolynomial, range: &MultiIndex, grid: usize) -> Result<MomentTable> {
    check_dim(p.dim(), range.dim())?;
    if !range.is_nonnegative() {
        return Err(Error::InvalidParameter("moment range must be nonnegative".into()));
    }
    if !grid.is_power_of_two() {
        return Err(Error::InvalidGrid {
            grid,
            reason: "must be a power of two",
        });
    }
    let rmax = range.max_entry().max(0) as usize;
    if grid < 2 * rmax + 2 {
        return Err(Error::InvalidGrid {
            grid,
            reason: "must be at least 2 max(R) + 2",
        });
    }
    if p.degree().max_entry() as usize >= grid {
        return Err(Error::InvalidGrid {
            grid,
            reason: "must exceed the polynomial degree",
        });
    }
    ensure_stable(p)?;

    let values = quadrature_moments(p, range, grid)?;
    let doubled = quadrature_moments(p, range, 2 * grid)?;
    let aliasing = values
        .iter()
        .zip(&doubled)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    MomentTable::from_parts(p.identity_hash(), range.clone(), grid, values, aliasing)
}

/// Doubles the grid, starting from [`default_grid`], until the aliasing
/// estimate drops to `tol` or the grid would exceed `max_grid`. Returns the
/// last table computed; callers inspect its estimate.
pub fn compute_moments_adaptive(
    p: &StablePolynomial,
    range: &MultiIndex,
    tol: f64,
    max_grid: usize,
) -> Result<MomentTable> {
    let mut grid = default_grid(range).max((p.degree().max_entry() as usize + 1).next_power_of_two());
    loop {
        let table = compute_moments(p, range, grid)?;
        if table.aliasing_error_estimate <= tol || 2 * grid > max_grid {
            return Ok(table);
        }
        grid *= 2;
    }
}

/// Row-major moments over `[-R, R]^d`. Samples are generated line by line
/// along the last axis, so peak memory is `M^{d-1} (2R+1)`.
fn quadrature_moments(p: &StablePolynomial, range: &MultiIndex, m: usize) -> Result<Vec<Complex64>> {
    let d = p.dim();
    let last = d - 1;
    let circle: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64))
        .collect();
    let inverse = Radix2::new(m, Direction::Inverse);
    let width = |j: usize| 2 * range[j] as usize + 1;
    let terms: Vec<(Vec<usize>, Complex64)> = p
        .terms()
        .map(|(a, c)| (a.entries().iter().map(|&e| e as usize).collect(), *c))
        .collect();

    // pass over the last axis: samples -> truncated line transforms
    let outer_count = m.pow(last as u32);
    let wl = width(last);
    let mut shape: Vec<usize> = vec![m; d];
    shape[last] = wl;
    let mut data = vec![Complex64::new(0.0, 0.0); outer_count * wl];
    let mut counter = vec![0usize; last];
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    let mut min_modulus = f64::INFINITY;
    for outer in 0..outer_count {
        line.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (alpha, c) in &terms {
            let mut w = *c;
            for (i, &ci) in counter.iter().enumerate() {
                w *= circle[(ci * alpha[i]) % m];
            }
            line[alpha[last]] += w;
        }
        // polynomial values along the line
        inverse.process(&mut line);
        for v in line.iter_mut() {
            let n2 = v.norm_sqr();
            min_modulus = min_modulus.min(n2);
            *v = Complex64::new(1.0 / n2, 0.0);
        }
        inverse.process(&mut line);
        let r = range[last];
        for (slot, g) in (-r..=r).enumerate() {
            data[outer * wl + slot] = line[g.rem_euclid(m as i64) as usize];
        }
        for i in (0..last).rev() {
            counter[i] += 1;
            if counter[i] < m {
                break;
            }
            counter[i] = 0;
        }
    }
    if min_modulus.is_nan() || min_modulus <= 0.0 || !min_modulus.is_finite() {
        return Err(Error::Unstable { margin: 0.0 });
    }

    for axis in (0..last).rev() {
        let (next, next_shape) = transform_axis(&data, &shape, axis, range[axis], &inverse);
        data = next;
        shape = next_shape;
    }

    let norm = libm::pow(m as f64, d as f64);
    data.iter_mut().for_each(|v| *v /= norm);
    symmetrize(&mut data, range);
    Ok(data)
}

/// Transforms one full-length axis and keeps frequencies `[-r, r]`.
fn transform_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    r: i64,
    plan: &Radix2,
) -> (Vec<Complex64>, Vec<usize>) {
    let m = shape[axis];
    let width = 2 * r as usize + 1;
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut next_shape = shape.to_vec();
    next_shape[axis] = width;
    let mut out = vec![Complex64::new(0.0, 0.0); outer * width * inner];
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for o in 0..outer {
        for i in 0..inner {
            for (k, slot) in line.iter_mut().enumerate() {
                *slot = data[(o * m + k) * inner + i];
            }
            plan.process(&mut line);
            for (slot, g) in (-r..=r).enumerate() {
                out[(o * width + slot) * inner + i] = line[g.rem_euclid(m as i64) as usize];
            }
        }
    }
    (out, next_shape)
}

/// Enforces `C_{-γ} = conj(C_γ)` and a real `C_0` exactly.
fn symmetrize(values: &mut [Complex64], range: &MultiIndex) {
    // row-major reversal maps γ to -γ
    let n = values.len();
    let _ = range;
    for i in 0..n {
        let j = n - 1 - i;
        if i <= j {
            let avg = (values[i] + values[j].conj()) * 0.5;
            values[i] = avg;
            values[j] = avg.conj();
        }
    }
}

/// `<z^α, z^β>_μ = C_{α-β}`.
pub fn inner_product(table: &MomentTable, alpha: &MultiIndex, beta: &MultiIndex) -> Result<Complex64> {
    check_dim(table.dim(), alpha.dim())?;
    check_dim(table.dim(), beta.dim())?;
    table.get(&(alpha - beta))
}

/// Exact moments for a separable polynomial `Π_j q_j(z_j)`: the product of
/// univariate moments, each from a partial-fraction expansion of `1/q_j`
/// (or its power series when roots repeat).
pub fn separable_oracle(factors: &[RootFactor], gamma: &MultiIndex) -> Result<Complex64> {
    check_dim(factors.len(), gamma.dim())?;
    let mut acc = Complex64::new(1.0, 0.0);
    for (j, f) in factors.iter().enumerate() {
        f.validate()?;
        acc *= univariate_moment(f, gamma[j]);
    }
    Ok(acc)
}

fn univariate_moment(f: &RootFactor, k: i64) -> Complex64 {
    if k < 0 {
        return univariate_moment(f, -k).conj();
    }
    let scale = 1.0 / f.scale.norm_sqr();
    let a: Vec<Complex64> = f.roots.iter().map(|r| r.inv()).collect();
    if a.is_empty() {
        return if k == 0 {
            Complex64::new(scale, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let repeated = a
        .iter()
        .enumerate()
        .any(|(i, x)| a[i + 1..].iter().any(|y| (x - y).norm() < 1e-6));
    let raw = if repeated {
        series_moment(&a, k as usize)
    } else {
        partial_fraction_moment(&a, k)
    };
    raw * scale
}

/// `Σ_{i,j} A_i conj(A_j) conj(a_j)^k / (1 - a_i conj(a_j))` with
/// `1/Π(1 - a_i w) = Σ_i A_i / (1 - a_i w)`.
fn partial_fraction_moment(a: &[Complex64], k: i64) -> Complex64 {
    let r = a.len();
    let weights: Vec<Complex64> = (0..r)
        .map(|i| {
            let mut w = Complex64::new(1.0, 0.0);
            for j in 0..r {
                if j != i {
                    w /= Complex64::new(1.0, 0.0) - a[j] / a[i];
                }
            }
            w
        })
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..r {
        for j in 0..r {
            let aj = a[j].conj();
            acc += weights[i] * weights[j].conj() * aj.powi(k as i32)
                / (Complex64::new(1.0, 0.0) - a[i] * aj);
        }
    }
    acc
}

/// `Σ_n h_n conj(h_{n+k})` with `h` the power-series coefficients of
/// `1/Π(1 - a_i w)`.
fn series_moment(a: &[Complex64], k: usize) -> Complex64 {
    // monic-at-zero coefficients of Π(1 - a_i w)
    let mut q = vec![Complex64::new(1.0, 0.0)];
    for &ai in a {
        let mut next = vec![Complex64::new(0.0, 0.0); q.len() + 1];
        for (i, &c) in q.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * ai;
        }
        q = next;
    }
    let rho = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let terms = if rho == 0.0 {
        a.len() + k + 1
    } else {
        let base = libm::ceil(libm::log(1e-22) / libm::log(rho)) as usize;
        (base + 60 * a.len()).min(200_000) + k
    };
    let mut h = vec![Complex64::new(0.0, 0.0); terms + 1];
    h[0] = Complex64::new(1.0, 0.0);
    for n in 1..=terms {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 1..q.len().min(n + 1) {
            s -= q[i] * h[n - i];
        }
        h[n] = s;
    }
    (0..=terms - k).map(|n| h[n] * h[n + k].conj()).sum()
}

/// Largest `|<z^α, z^β p̃>_μ| = |Σ_γ conj(p̃_γ) C_{α-β-γ}|` over
/// `α ∈ B ∩ [0, alpha_box)` and `β ∈ [0, beta_box)`. Zero in exact arithmetic.
pub fn ptilde_orthogonality_residual(
    p: &StablePolynomial,
    n: &MultiIndex,
    table: &MomentTable,
    alpha_box: &MultiIndex,
    beta_box: &MultiIndex,
) -> Result<f64> {
    let reflected = p.reflect(n)?;
    let alphas = enumerate(&IndexSetExpr::BSet(n.clone()), alpha_box)?;
    let betas = box_points(beta_box)?;
    let terms: Vec<(&MultiIndex, Complex64)> =
        reflected.terms().map(|(g, c)| (g, c.conj())).collect();
    let mut worst = 0.0f64;
    for alpha in &alphas {
        for beta in &betas {
            let shift = alpha - beta;
            let mut acc = Complex64::new(0.0, 0.0);
            for (gamma, c) in &terms {
                let diff = &shift - *gamma;
                acc += c * table.get_diff(diff.entries()).ok_or(Error::OutOfRange)?;
            }
            worst = worst.max(acc.norm());
        }
    }
    Ok(worst)
}

/// The moment range needed by [`ptilde_orthogonality_residual`].
pub fn ptilde_range(n: &MultiIndex, alpha_box: &MultiIndex, beta_box: &MultiIndex) -> MultiIndex {
    MultiIndex::new(
        (0..n.dim())
            .map(|j| (alpha_box[j] - 1).max(beta_box[j] - 1 + n[j]))
            .collect(),
    )
}
