mod common;

use common::*;
use pickdecomp_core::certify::{run_suite, PointSet, SuiteConfig};
use pickdecomp_core::decomp::{
    agler_pair, decompose, exact_difference_identity, gkvw_pair, DecompositionSpec, Workspace,
};
use pickdecomp_core::moments::{compute_moments, default_grid};
use pickdecomp_core::{Error, MultiIndex, StablePolynomial, VarSet};
use proptest::prelude::*;

fn workspace(p: &StablePolynomial, top: usize) -> Workspace {
    let r = MultiIndex::splat(p.dim(), top as i64 - 1);
    Workspace::new(compute_moments(p, &r, default_grid(&r)).unwrap())
}

fn pts(d: usize) -> PointSet {
    PointSet::default_set(d, 0.6, 42).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn difference_identity_is_exact_at_every_level(seed in 0u64..1000, big in 2usize..7) {
        for p in [separable(seed), determinantal(mi([1, 1]), seed)] {
            let mut ws = workspace(&p, big);
            let spec = DecompositionSpec::new(p.clone(), p.degree().clone(), VarSet::singleton(0), big).unwrap();
            prop_assert!(exact_difference_identity(&mut ws, &spec, pts(2).points()).unwrap() < 1e-9);
        }
    }
}

#[test]
fn residual_drops_tenfold_from_four_to_eight() {
    for m in corpus_d2() {
        let mut ws = workspace(&m.p, 8);
        for s in VarSet::nonempty_proper_subsets(2) {
            let spec = DecompositionSpec::new(m.p.clone(), m.n.clone(), s, 4).unwrap();
            let coarse = decompose(&mut ws, &spec, pts(2).points()).unwrap().max_residual;
            let fine = decompose(&mut ws, &spec.at(8), pts(2).points()).unwrap().max_residual;
            assert!(fine * 10.0 <= coarse, "{} S={s}: {coarse:e} -> {fine:e}", m.name);
        }
    }
}

#[test]
fn pair_identities_hold_at_sixteen() {
    for m in corpus_d2() {
        let mut ws = workspace(&m.p, 16);
        let a = agler_pair(&mut ws, &m.p, &m.n, 16, pts(2).points()).unwrap();
        let g = gkvw_pair(&mut ws, &m.p, &m.n, 1, 0, 16, pts(2).points()).unwrap();
        assert!(a.residual < 1e-5, "{}: {:e}", m.name, a.residual);
        assert!(g.residual < 1e-5, "{}: {:e}", m.name, g.residual);
    }
}

#[test]
fn workspace_rejects_foreign_or_short_tables() {
    let p = half_third();
    let mut ws = workspace(&affine(2, 4.0), 8);
    let spec = DecompositionSpec::new(p.clone(), p.degree().clone(), VarSet::singleton(0), 4).unwrap();
    assert!(decompose(&mut ws, &spec, pts(2).points()).is_err());

    let mut ws = workspace(&p, 4);
    assert!(matches!(
        decompose(&mut ws, &spec.at(8), pts(2).points()),
        Err(Error::OutOfRange)
    ));
}

#[test]
fn spec_rejects_bad_partitions() {
    let p = half_third();
    let n = p.degree().clone();
    assert!(DecompositionSpec::new(p.clone(), n.clone(), VarSet::empty(), 4).is_err());
    assert!(DecompositionSpec::new(p.clone(), n.clone(), VarSet::full(2), 4).is_err());
    assert!(DecompositionSpec::new(p.clone(), n.clone(), VarSet::singleton(0), 0).is_err());
    let one = StablePolynomial::univariate(1, 0, &[c(1.0), c(-0.5)]).unwrap();
    assert!(DecompositionSpec::new(one, mi([1]), VarSet::singleton(0), 4).is_err());
}

#[test]
fn suite_passes_and_is_deterministic() {
    let p = half_third();
    let config = SuiteConfig::default();
    let first = run_suite(&p, p.degree(), &config).unwrap();
    let failed: Vec<_> = first.records.iter().filter(|r| !r.pass).map(|r| r.id.clone()).collect();
    assert!(first.pass, "failed checks: {failed:?}");
    let second = run_suite(&p, p.degree(), &config).unwrap();
    assert_eq!(first, second);
}

#[test]
fn suite_on_unstable_input_reports_only_stability() {
    let bad = StablePolynomial::univariate(2, 1, &[c(1.0), c(-2.0)]).unwrap();
    let report = run_suite(&bad, bad.degree(), &SuiteConfig::default()).unwrap();
    assert!(!report.pass);
    assert_eq!(report.records.len(), 1);
    assert_eq!(report.records[0].id, "stability");
}
