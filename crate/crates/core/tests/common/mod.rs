#![allow(dead_code)]

use pickdecomp_core::poly::{gen_corpus, CorpusKind, RootFactor};
use pickdecomp_core::{Complex64, MultiIndex, StablePolynomial};

pub fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn mi<const D: usize>(a: [i64; D]) -> MultiIndex {
    MultiIndex::from(a)
}

/// `c - Σ_j z_j`.
pub fn affine(d: usize, constant: f64) -> StablePolynomial {
    gen_corpus(&CorpusKind::Affine {
        constant: c(constant),
        weights: vec![c(1.0); d],
    })
    .unwrap()
}

pub fn trivial(d: usize) -> StablePolynomial {
    StablePolynomial::constant(MultiIndex::zeros(d), c(1.0))
}

/// `(1 - z_1/2)(1 - z_2/3)`.
pub fn half_third() -> StablePolynomial {
    gen_corpus(&CorpusKind::Separable {
        factors: vec![
            RootFactor::new(c(1.0), vec![c(2.0)]),
            RootFactor::new(c(1.0), vec![c(3.0)]),
        ],
    })
    .unwrap()
}

pub fn separable(seed: u64) -> StablePolynomial {
    gen_corpus(&CorpusKind::random_separable(2, 2, 1.6, 3.0, seed)).unwrap()
}

pub fn determinantal(blocks: MultiIndex, seed: u64) -> StablePolynomial {
    gen_corpus(&CorpusKind::random_determinantal(blocks, 0.5, seed)).unwrap()
}

/// A named corpus member with its degree bound.
pub struct Member {
    pub name: &'static str,
    pub p: StablePolynomial,
    pub n: MultiIndex,
}

fn member(name: &'static str, p: StablePolynomial) -> Member {
    let n = p.degree().clone();
    Member { name, p, n }
}

pub fn corpus_d2() -> Vec<Member> {
    vec![
        member("4 - z1 - z2", affine(2, 4.0)),
        member("(1 - z1/2)(1 - z2/3)", half_third()),
        member("separable seed 3", separable(3)),
        member("determinantal (2,1)", determinantal(mi([2, 1]), 11)),
    ]
}

pub fn corpus_d3() -> Vec<Member> {
    vec![
        member("8 - z1 - z2 - z3", affine(3, 8.0)),
        member("determinantal (1,1,1)", determinantal(mi([1, 1, 1]), 5)),
    ]
}
