//! Evaluable Hermitian kernels on the open polydisk.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gram::{check_point, GramMatrix};
use crate::lattice::MultiIndex;
use crate::poly::{ensure_stable, StablePolynomial};

/// A point of the open polydisk.
pub type Point = Vec<Complex64>;

#[derive(Clone, Debug)]
pub enum KernelHandle {
    /// `(p(z) conj p(ζ) - p̃(z) conj p̃(ζ)) · Π_j 1/(1 - z_j conj ζ_j)`.
    ExplicitP {
        p: StablePolynomial,
        reflected: StablePolynomial,
    },
    /// The Szegő kernel `Π_j 1/(1 - z_j conj ζ_j)` in `d` variables.
    SzegoProduct(usize),
    GramSubspace(Arc<GramMatrix>),
    Difference(Box<KernelHandle>, Box<KernelHandle>),
    Sum(Box<KernelHandle>, Box<KernelHandle>),
    /// `c · K` with `c` real.
    Scaled(f64, Box<KernelHandle>),
    /// `(1 - z_j conj ζ_j) K`, `j` zero-based.
    ShiftFactor(usize, Box<KernelHandle>),
    /// `K(z, ζ) / (p(z) conj p(ζ))`.
    PNormalized(Box<KernelHandle>, StablePolynomial),
    /// The constant kernel `c` (real, so that it is Hermitian).
    Constant(f64),
}

/// The Pick kernel of `f = p̃/p` in closed form.
pub fn explicit_p(p: &StablePolynomial, n: &MultiIndex) -> Result<KernelHandle> {
    let reflected = p.reflect(n)?;
    ensure_stable(p)?;
    Ok(KernelHandle::ExplicitP {
        p: p.with_degree(n.clone())?,
        reflected,
    })
}

impl KernelHandle {
    pub fn difference(a: KernelHandle, b: KernelHandle) -> Self {
        KernelHandle::Difference(Box::new(a), Box::new(b))
    }

    pub fn sum(a: KernelHandle, b: KernelHandle) -> Self {
        KernelHandle::Sum(Box::new(a), Box::new(b))
    }

    pub fn scaled(c: f64, k: KernelHandle) -> Self {
        KernelHandle::Scaled(c, Box::new(k))
    }

    pub fn shift(j: usize, k: KernelHandle) -> Self {
        KernelHandle::ShiftFactor(j, Box::new(k))
    }

    pub fn normalized(k: KernelHandle, p: StablePolynomial) -> Self {
        KernelHandle::PNormalized(Box::new(k), p)
    }

    pub fn gram(g: GramMatrix) -> Self {
        KernelHandle::GramSubspace(Arc::new(g))
    }

    /// Number of variables, when the kernel fixes it.
    pub fn dim(&self) -> Option<usize> {
        match self {
            KernelHandle::ExplicitP { p, .. } => Some(p.dim()),
            KernelHandle::SzegoProduct(d) => Some(*d),
            KernelHandle::GramSubspace(g) => Some(g.dim()),
            KernelHandle::Difference(a, b) | KernelHandle::Sum(a, b) => a.dim().or(b.dim()),
            KernelHandle::Scaled(_, k) | KernelHandle::ShiftFactor(_, k) => k.dim(),
            KernelHandle::PNormalized(_, p) => Some(p.dim()),
            KernelHandle::Constant(_) => None,
        }
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        match self {
            KernelHandle::ExplicitP { .. } => "P".into(),
            KernelHandle::SzegoProduct(d) => format!("S_{d}"),
            KernelHandle::GramSubspace(g) => format!("Gram[{}]", g.size()),
            KernelHandle::Difference(a, b) => format!("({} - {})", a.describe(), b.describe()),
            KernelHandle::Sum(a, b) => format!("({} + {})", a.describe(), b.describe()),
            KernelHandle::Scaled(c, k) => format!("{c}*{}", k.describe()),
            KernelHandle::ShiftFactor(j, k) => format!("(1-z{0}w{0}*){1}", j + 1, k.describe()),
            KernelHandle::PNormalized(k, _) => format!("{}/pp*", k.describe()),
            KernelHandle::Constant(c) => format!("{c}"),
        }
    }

    fn check(&self, z: &[Complex64]) -> Result<()> {
        match self.dim() {
            Some(d) => check_point(d, z),
            None if z.iter().all(|w| w.norm() < 1.0) => Ok(()),
            None => Err(Error::OutsideDomain),
        }
    }

    /// `K(z, ζ)`.
    pub fn eval(&self, z: &[Complex64], zeta: &[Complex64]) -> Result<Complex64> {
        self.check(z)?;
        self.check(zeta)?;
        Ok(self.eval_unchecked(z, zeta))
    }

    fn eval_unchecked(&self, z: &[Complex64], zeta: &[Complex64]) -> Complex64 {
        match self {
            KernelHandle::ExplicitP { p, reflected } => {
                let num = p.eval_unchecked(z) * p.eval_unchecked(zeta).conj()
                    - reflected.eval_unchecked(z) * reflected.eval_unchecked(zeta).conj();
                num * szego(z, zeta)
            }
            KernelHandle::SzegoProduct(_) => szego(z, zeta),
            KernelHandle::GramSubspace(g) => {
                g.feature_unchecked(zeta).dotc(&g.feature_unchecked(z))
            }
            KernelHandle::Difference(a, b) => a.eval_unchecked(z, zeta) - b.eval_unchecked(z, zeta),
            KernelHandle::Sum(a, b) => a.eval_unchecked(z, zeta) + b.eval_unchecked(z, zeta),
            KernelHandle::Scaled(c, k) => k.eval_unchecked(z, zeta) * *c,
            KernelHandle::ShiftFactor(j, k) => {
                (Complex64::new(1.0, 0.0) - z[*j] * zeta[*j].conj()) * k.eval_unchecked(z, zeta)
            }
            KernelHandle::PNormalized(k, p) => {
                k.eval_unchecked(z, zeta) / (p.eval_unchecked(z) * p.eval_unchecked(zeta).conj())
            }
            KernelHandle::Constant(c) => Complex64::new(*c, 0.0),
        }
    }

    /// `M_ij = K(z_i, z_j)`. Gram-subspace parts are batched through one
    /// triangular solve per kernel.
    pub fn matrix(&self, points: &[Point]) -> Result<DMatrix<Complex64>> {
        for (i, z) in points.iter().enumerate() {
            self.check(z).map_err(|e| match e {
                Error::OutsideDomain => Error::InvalidParameter(format!(
                    "point {i} lies outside the open polydisk"
                )),
                other => other,
            })?;
        }
        Ok(self.matrix_unchecked(points))
    }

    fn matrix_unchecked(&self, points: &[Point]) -> DMatrix<Complex64> {
        let n = points.len();
        match self {
            KernelHandle::GramSubspace(g) => {
                let y = g.feature_matrix(points);
                // (Y* Y)_{ji} = y(z_j)* y(z_i) = K(z_i, z_j)
                y.ad_mul(&y).transpose()
            }
            KernelHandle::Difference(a, b) => a.matrix_unchecked(points) - b.matrix_unchecked(points),
            KernelHandle::Sum(a, b) => a.matrix_unchecked(points) + b.matrix_unchecked(points),
            KernelHandle::Scaled(c, k) => k.matrix_unchecked(points) * Complex64::new(*c, 0.0),
            KernelHandle::ShiftFactor(j, k) => {
                let mut m = k.matrix_unchecked(points);
                for r in 0..n {
                    for s in 0..n {
                        m[(r, s)] *= Complex64::new(1.0, 0.0) - points[r][*j] * points[s][*j].conj();
                    }
                }
                m
            }
            KernelHandle::PNormalized(k, p) => {
                let mut m = k.matrix_unchecked(points);
                let vals: Vec<Complex64> = points.iter().map(|z| p.eval_unchecked(z)).collect();
                for r in 0..n {
                    for s in 0..n {
                        m[(r, s)] /= vals[r] * vals[s].conj();
                    }
                }
                m
            }
            _ => DMatrix::from_fn(n, n, |r, s| self.eval_unchecked(&points[r], &points[s])),
        }
    }
}

fn szego(z: &[Complex64], zeta: &[Complex64]) -> Complex64 {
    z.iter()
        .zip(zeta)
        .map(|(a, b)| (Complex64::new(1.0, 0.0) - a * b.conj()).inv())
        .product()
}
