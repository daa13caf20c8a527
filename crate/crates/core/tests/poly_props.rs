mod common;

use common::*;
use pickdecomp_core::Complex64;
use pickdecomp_core::poly::{check_stability_default, gen_corpus, CorpusKind};
use pickdecomp_core::{MultiIndex, StablePolynomial};
use proptest::prelude::*;

fn torus_point(thetas: &[f64]) -> Vec<Complex64> {
    thetas.iter().map(|&t| Complex64::from_polar(1.0, t)).collect()
}

fn disk_point(polar: &[(f64, f64)]) -> Vec<Complex64> {
    polar.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect()
}

fn corpus_member() -> impl Strategy<Value = StablePolynomial> {
    prop_oneof![
        (0u64..1000, 1usize..3).prop_map(|(s, deg)| gen_corpus(&CorpusKind::random_separable(2, deg, 1.3, 3.0, s)).unwrap()),
        (0u64..1000).prop_map(|s| determinantal(mi([1, 1]), s)),
        (0u64..1000).prop_map(|s| determinantal(mi([2, 1]), s)),
        (2.5f64..6.0).prop_map(|c| affine(2, c)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reflection_is_an_involution(p in corpus_member()) {
        let n = p.degree().clone();
        let back = p.reflect(&n).unwrap().reflect(&n).unwrap();
        for (alpha, c) in p.terms() {
            prop_assert!((back.coefficient(alpha) - c).norm() < 1e-14);
        }
        prop_assert_eq!(back.num_terms(), p.num_terms());
    }

    #[test]
    fn reflection_preserves_modulus_on_torus(p in corpus_member(), t in proptest::collection::vec(0.0f64..6.3, 2)) {
        let z = torus_point(&t);
        let pt = p.reflected();
        let a = p.evaluate(&z).unwrap().norm();
        let b = pt.evaluate(&z).unwrap().norm();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn corpus_is_stable(p in corpus_member()) {
        prop_assert!(check_stability_default(&p).stable);
    }

    #[test]
    fn inner_function_is_contractive(p in corpus_member(), pts in proptest::collection::vec((0.0f64..0.999, 0.0f64..6.3), 2)) {
        let z = disk_point(&pts);
        let f = p.inner_eval(p.degree(), &z).unwrap();
        prop_assert!(f.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn inner_function_is_unimodular_on_torus(p in corpus_member(), t in proptest::collection::vec(0.0f64..6.3, 2)) {
        let z = torus_point(&t);
        let f = p.reflected().evaluate(&z).unwrap() / p.evaluate(&z).unwrap();
        prop_assert!((f.norm() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn hundred_points_contractive_for_fixed_members() {
    let members = corpus_d2();
    for m in &members {
        for k in 0..100 {
            let r = 0.99 * ((k % 10) as f64 + 0.5) / 10.0;
            let z = vec![
                Complex64::from_polar(r, 0.37 * k as f64),
                Complex64::from_polar(0.99 - r * 0.5, 1.1 * k as f64),
            ];
            let f = m.p.inner_eval(&m.n, &z).unwrap();
            assert!(f.norm() <= 1.0 + 1e-12, "{}: |f| = {}", m.name, f.norm());
        }
    }
}

#[test]
fn unstable_examples_rejected() {
    let boundary = StablePolynomial::new(
        MultiIndex::from([1, 1]),
        [(mi([0, 0]), c(2.0)), (mi([1, 0]), c(-1.0)), (mi([0, 1]), c(-1.0))],
    )
    .unwrap();
    assert!(!check_stability_default(&boundary).stable);
    let inside = StablePolynomial::univariate(2, 0, &[c(1.0), c(-2.0)]).unwrap();
    assert!(!check_stability_default(&inside).stable);
}
