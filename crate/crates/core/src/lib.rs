//! Decompositions of the polydisk Pick kernel of a rational inner function.
//!
//! For a polynomial `p` with no zeros on the closed polydisk and `n ≥ deg p`,
//! `f = p̃/p` is inner, where `p̃(z) = z^n conj(p(1/conj z))`. The Pick kernel
//! `(1 - f(z) conj f(ζ)) / Π_j (1 - z_j conj ζ_j)` splits into reproducing
//! kernels of monomial subspaces of `L^2(|p|^{-2} dσ)`. This crate computes
//! those kernels and certifies the splitting numerically.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod certify;
pub mod decomp;
pub mod error;
pub mod fft;
pub mod gram;
pub mod kernel;
pub mod lattice;
pub mod linalg;
pub mod moments;
pub mod poly;

pub use error::{Error, Result};
pub use lattice::{IndexSetExpr, MultiIndex, VarSet};
pub use moments::{compute_moments, MomentTable};
pub use nalgebra;
pub use num_complex::Complex64;
pub use poly::{check_stability, StablePolynomial};
