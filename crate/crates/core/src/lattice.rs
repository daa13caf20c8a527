//! Multi-indices on the integer lattice and the symbolic subsets of it that
//! index the subspaces used throughout the crate.
//!
//! All finite enumerations are returned in graded lexicographic order (total
//! degree first, ties broken lexicographically). Gram matrices inherit this
//! order for their rows and columns.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Index, Neg, Sub};

use crate::error::{Error, Result};

/// A point of the integer lattice of dimension `d`.
///
/// Ordering is graded lexicographic, not the plain lexicographic order of
/// the underlying entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<i64>);

impl MultiIndex {
    pub fn new(entries: Vec<i64>) -> Self {
        MultiIndex(entries)
    }

    pub fn zeros(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    /// `(v, v, ..., v)` in dimension `d`.
    pub fn splat(d: usize, v: i64) -> Self {
        MultiIndex(vec![v; d])
    }

    /// The unit vector `e_j` (zero-based `j`).
    pub fn unit(d: usize, j: usize) -> Self {
        let mut e = vec![0; d];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    /// Componentwise `self <= other`.
    pub fn leq(&self, other: &MultiIndex) -> Result<bool> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.0.iter().zip(&other.0).all(|(a, b)| a <= b))
    }

    /// Largest entry, or 0 for the empty index.
    pub fn max_entry(&self) -> i64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn with_entry(&self, j: usize, v: i64) -> Self {
        let mut e = self.0.clone();
        e[j] = v;
        MultiIndex(e)
    }
}

/// Free-function form of [`MultiIndex::leq`].
pub fn leq(a: &MultiIndex, b: &MultiIndex) -> Result<bool> {
    a.leq(b)
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Index<usize> for MultiIndex {
    type Output = i64;

    fn index(&self, j: usize) -> &i64 {
        &self.0[j]
    }
}

impl From<Vec<i64>> for MultiIndex {
    fn from(v: Vec<i64>) -> Self {
        MultiIndex(v)
    }
}

impl<const D: usize> From<[i64; D]> for MultiIndex {
    fn from(v: [i64; D]) -> Self {
        MultiIndex(v.to_vec())
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;

    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;

    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.dim(), rhs.dim(), "multi-index dimension mismatch");
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &MultiIndex {
    type Output = MultiIndex;

    fn neg(self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

/// A subset of the variables `{0, ..., d-1}` (zero-based), stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VarSet(u64);

impl VarSet {
    pub const MAX_VARS: usize = 64;

    pub fn empty() -> Self {
        VarSet(0)
    }

    /// `{0, ..., d-1}`.
    pub fn full(d: usize) -> Self {
        assert!(d <= Self::MAX_VARS);
        if d == 64 {
            VarSet(u64::MAX)
        } else {
            VarSet((1u64 << d) - 1)
        }
    }

    pub fn singleton(j: usize) -> Self {
        assert!(j < Self::MAX_VARS);
        VarSet(1 << j)
    }

    pub fn from_vars<I: IntoIterator<Item = usize>>(vars: I) -> Self {
        vars.into_iter()
            .fold(VarSet(0), |acc, j| VarSet(acc.0 | Self::singleton(j).0))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, j: usize) -> bool {
        j < Self::MAX_VARS && self.0 & (1 << j) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within `{0, ..., d-1}`.
    pub fn complement(self, d: usize) -> VarSet {
        VarSet(!self.0 & Self::full(d).0)
    }

    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..Self::MAX_VARS).filter(move |&j| self.contains(j))
    }

    /// Largest variable index plus one, i.e. the smallest `d` containing the set.
    pub fn span(self) -> usize {
        (Self::MAX_VARS as u32 - self.0.leading_zeros()) as usize
    }

    /// All nonempty proper subsets of `{0, ..., d-1}` in increasing bitmask order.
    pub fn nonempty_proper_subsets(d: usize) -> impl Iterator<Item = VarSet> {
        assert!(d < Self::MAX_VARS);
        (1u64..(1u64 << d) - 1).map(VarSet)
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Displays with one-based variable labels, e.g. `{1,3}`.
impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, j) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", j + 1)?;
        }
        f.write_str("}")
    }
}

/// Symbolic subsets of the lattice. Membership is decidable pointwise; finite
/// pieces are obtained with [`enumerate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexSetExpr {
    /// `{α : α >= 0}`.
    Orthant,
    /// `{α : α >= n}`.
    ShiftedOrthant(MultiIndex),
    /// `{α >= 0 : α is not >= n}`, i.e. some `α_j < n_j`.
    BSet(MultiIndex),
    /// `{α >= 0 : α_j < n_j}` for a zero-based variable `j`.
    XSingle(usize, MultiIndex),
    /// Union of `XSingle(j, n)` over `j` in the set; the empty union is `{0}`.
    XUnion(VarSet, MultiIndex),
    /// `{α : 0 <= α < N}`.
    BoxSet(MultiIndex),
    Union(Box<IndexSetExpr>, Box<IndexSetExpr>),
    Intersect(Box<IndexSetExpr>, Box<IndexSetExpr>),
    Diff(Box<IndexSetExpr>, Box<IndexSetExpr>),
    Singleton(MultiIndex),
}

impl IndexSetExpr {
    pub fn union(a: IndexSetExpr, b: IndexSetExpr) -> Self {
        IndexSetExpr::Union(Box::new(a), Box::new(b))
    }

    pub fn intersect(a: IndexSetExpr, b: IndexSetExpr) -> Self {
        IndexSetExpr::Intersect(Box::new(a), Box::new(b))
    }

    pub fn diff(a: IndexSetExpr, b: IndexSetExpr) -> Self {
        IndexSetExpr::Diff(Box::new(a), Box::new(b))
    }

    /// The dimension the expression is pinned to, if any. `Orthant` alone is
    /// dimension-agnostic.
    pub fn dim(&self) -> Option<usize> {
        use IndexSetExpr::*;
        match self {
            Orthant => None,
            ShiftedOrthant(n) | BSet(n) | XSingle(_, n) | XUnion(_, n) | BoxSet(n)
            | Singleton(n) => Some(n.dim()),
            Union(a, b) | Intersect(a, b) | Diff(a, b) => a.dim().or_else(|| b.dim()),
        }
    }

    /// Pointwise membership.
    pub fn contains(&self, alpha: &MultiIndex) -> Result<bool> {
        use IndexSetExpr::*;
        let d = alpha.dim();
        Ok(match self {
            Orthant => alpha.is_nonnegative(),
            ShiftedOrthant(n) => n.leq(alpha)?,
            BSet(n) => {
                check_dim(n.dim(), d)?;
                alpha.is_nonnegative() && (0..d).any(|j| alpha[j] < n[j])
            }
            XSingle(j, n) => {
                check_dim(n.dim(), d)?;
                if *j >= d {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "variable {j} out of range for dimension {d}"
                    )));
                }
                alpha.is_nonnegative() && alpha[*j] < n[*j]
            }
            XUnion(s, n) => {
                check_dim(n.dim(), d)?;
                if s.span() > d {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "variable set {s} out of range for dimension {d}"
                    )));
                }
                if s.is_empty() {
                    alpha.entries().iter().all(|&a| a == 0)
                } else {
                    alpha.is_nonnegative() && s.iter().any(|j| alpha[j] < n[j])
                }
            }
            BoxSet(n) => {
                check_dim(n.dim(), d)?;
                alpha.is_nonnegative() && (0..d).all(|j| alpha[j] < n[j])
            }
            Union(a, b) => a.contains(alpha)? | b.contains(alpha)?,
            Intersect(a, b) => a.contains(alpha)? & b.contains(alpha)?,
            Diff(a, b) => a.contains(alpha)? & !b.contains(alpha)?,
            Singleton(s) => {
                check_dim(s.dim(), d)?;
                s == alpha
            }
        })
    }
}

/// Free-function form of [`IndexSetExpr::contains`].
pub fn contains(expr: &IndexSetExpr, alpha: &MultiIndex) -> Result<bool> {
    expr.contains(alpha)
}

/// Lists `expr ∩ [0, bx)` in graded lexicographic order.
pub fn enumerate(expr: &IndexSetExpr, bx: &MultiIndex) -> Result<Vec<MultiIndex>> {
    if let Some(d) = expr.dim() {
        check_dim(d, bx.dim())?;
    }
    let mut out = Vec::new();
    for alpha in box_points(bx)? {
        if expr.contains(&alpha)? {
            out.push(alpha);
        }
    }
    out.sort();
    Ok(out)
}

/// Every lattice point of `[0, bx)` in graded lexicographic order.
pub fn box_points(bx: &MultiIndex) -> Result<Vec<MultiIndex>> {
    for (component, &value) in bx.entries().iter().enumerate() {
        if value < 1 {
            return Err(Error::InvalidBox { component, value });
        }
    }
    let d = bx.dim();
    let total: usize = bx.entries().iter().map(|&v| v as usize).product();
    let mut out = Vec::with_capacity(total);
    let mut cur = vec![0i64; d];
    for _ in 0..total {
        out.push(MultiIndex(cur.clone()));
        for j in (0..d).rev() {
            cur[j] += 1;
            if cur[j] < bx[j] {
                break;
            }
            cur[j] = 0;
        }
    }
    out.sort();
    Ok(out)
}
