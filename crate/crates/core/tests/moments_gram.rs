mod common;

use common::*;
use pickdecomp_core::certify::{check_psd, PointSet};
use pickdecomp_core::gram::{build_gram, reproducing_property_residual};
use pickdecomp_core::kernel::KernelHandle;
use pickdecomp_core::lattice::box_points;
use pickdecomp_core::moments::{compute_moments, separable_oracle};
use pickdecomp_core::poly::{gen_corpus, torus_extremes, CorpusKind, RootFactor};
use pickdecomp_core::{Complex64, MomentTable, MultiIndex, StablePolynomial};
use proptest::prelude::*;

fn root_factor() -> impl Strategy<Value = RootFactor> {
    proptest::collection::vec((1.5f64..3.0, 0.0f64..6.3), 1..=2).prop_map(|roots| {
        RootFactor::new(
            c(1.0),
            roots.into_iter().map(|(r, t)| Complex64::from_polar(r, t)).collect(),
        )
    })
}

fn separable_pair() -> impl Strategy<Value = (Vec<RootFactor>, StablePolynomial)> {
    proptest::collection::vec(root_factor(), 2).prop_map(|factors| {
        let p = gen_corpus(&CorpusKind::Separable { factors: factors.clone() }).unwrap();
        (factors, p)
    })
}

fn oracle_error(table: &MomentTable, factors: &[RootFactor]) -> f64 {
    let r = table.range().clone();
    let lo = MultiIndex::new(r.entries().iter().map(|&x| -x).collect());
    let span = MultiIndex::new(r.entries().iter().map(|&x| 2 * x + 1).collect());
    box_points(&span)
        .unwrap()
        .iter()
        .map(|g| {
            let gamma = g + &lo;
            (table.get(&gamma).unwrap() - separable_oracle(factors, &gamma).unwrap()).norm()
        })
        .fold(0.0, f64::max)
}

fn points(d: usize, seed: u64) -> PointSet {
    PointSet::random(d, 10, 0.7, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fft_moments_match_separable_oracle((factors, p) in separable_pair()) {
        let table = compute_moments(&p, &MultiIndex::splat(2, 4), 128).unwrap();
        prop_assert!(oracle_error(&table, &factors) < 1e-10);
    }

    #[test]
    fn moments_are_hermitian((factors, p) in separable_pair()) {
        let _ = factors;
        let table = compute_moments(&p, &MultiIndex::splat(2, 3), 32).unwrap();
        prop_assert!(table.hermitian_defect() < 1e-14);
    }

    #[test]
    fn doubling_grid_cuts_aliasing((factors, p) in separable_pair()) {
        let r = MultiIndex::splat(2, 3);
        let coarse = oracle_error(&compute_moments(&p, &r, 16).unwrap(), &factors);
        let fine = oracle_error(&compute_moments(&p, &r, 32).unwrap(), &factors);
        prop_assert!(coarse < 1e-14 || fine * 10.0 <= coarse, "coarse {coarse:e} fine {fine:e}");
    }

    #[test]
    fn nested_gram_kernels_are_ordered(seed in 0u64..500, keep in 1usize..9) {
        let p = determinantal(mi([1, 1]), seed);
        let table = compute_moments(&p, &MultiIndex::splat(2, 2), 64).unwrap();
        let all = box_points(&MultiIndex::splat(2, 3)).unwrap();
        let big = KernelHandle::gram(build_gram(&table, &all).unwrap());
        let small = KernelHandle::gram(build_gram(&table, &all[..keep]).unwrap());
        let pts = points(2, seed);
        prop_assert!(check_psd(&small, &pts, 1e-10).unwrap().pass);
        prop_assert!(check_psd(&KernelHandle::difference(big, small), &pts, 1e-10).unwrap().pass);
    }

    #[test]
    fn gram_reproduces_monomials(seed in 0u64..500, t in 0.0f64..6.3, r in 0.0f64..0.9) {
        let p = separable(seed);
        let table = compute_moments(&p, &MultiIndex::splat(2, 3), 128).unwrap();
        let idx = box_points(&MultiIndex::splat(2, 4)).unwrap();
        let g = build_gram(&table, &idx).unwrap();
        let zeta = vec![Complex64::from_polar(r, t), Complex64::from_polar(0.5 * r, -t)];
        prop_assert!(reproducing_property_residual(&g, &table, &zeta).unwrap() < 1e-9);
    }

    #[test]
    fn gram_spectrum_sits_in_torus_sandwich(seed in 0u64..500) {
        let p = determinantal(mi([1, 1]), seed);
        let table = compute_moments(&p, &MultiIndex::splat(2, 4), 64).unwrap();
        let g = build_gram(&table, &box_points(&MultiIndex::splat(2, 5)).unwrap()).unwrap();
        let (lo, hi) = torus_extremes(&p, 512);
        let eig = g.eigenvalues();
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(min >= 1.0 / (hi * hi) * (1.0 - 1e-6));
        prop_assert!(max <= 1.0 / (lo * lo) * (1.0 + 1e-6));
    }

    #[test]
    fn kernel_matrices_are_hermitian(seed in 0u64..500) {
        let p = half_third();
        let table = compute_moments(&p, &MultiIndex::splat(2, 3), 64).unwrap();
        let g = build_gram(&table, &box_points(&MultiIndex::splat(2, 4)).unwrap()).unwrap();
        let k = KernelHandle::difference(
            KernelHandle::normalized(KernelHandle::shift(1, KernelHandle::gram(g)), p.clone()),
            KernelHandle::scaled(0.3, KernelHandle::SzegoProduct(2)),
        );
        let m = k.matrix(points(2, seed).points()).unwrap();
        let defect = (&m - m.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max);
        prop_assert!(defect < 1e-10);
    }

    #[test]
    fn psd_verdict_is_scale_invariant_above_unit_spectrum(seed in 0u64..500, t in 0.1f64..3.0, scale in 1.0f64..100.0) {
        let pts = points(2, seed);
        let k = KernelHandle::difference(
            KernelHandle::SzegoProduct(2),
            KernelHandle::scaled(t, KernelHandle::Constant(1.0)),
        );
        let base = check_psd(&k, &pts, 1e-6).unwrap();
        let lmax = pickdecomp_core::certify::kernel_matrix(&k, &pts)
            .unwrap()
            .symmetric_eigenvalues()
            .max();
        prop_assume!(lmax >= 1.0);
        let scaled = check_psd(&KernelHandle::scaled(scale, k), &pts, 1e-6).unwrap();
        prop_assert_eq!(base.pass, scaled.pass);
        let (a, b) = (base.min_eig.unwrap(), scaled.min_eig.unwrap());
        prop_assert!((b - scale * a).abs() <= 1e-9 * scale * lmax);
    }
}

#[test]
fn one_variable_gram_kernel_matches_christoffel_darboux() {
    for (k, roots) in [vec![c(2.0)], vec![Complex64::new(0.3, 1.4), c(-1.7)]].into_iter().enumerate() {
        let factor = RootFactor::new(c(1.0), roots);
        let p = StablePolynomial::univariate(1, 0, &factor.coefficients()).unwrap();
        let n = p.degree()[0];
        let pt = p.reflected();
        let table = compute_moments(&p, &MultiIndex::from([12]), 256).unwrap();
        for big in [n.max(1), 4, 8, 13] {
            let idx: Vec<MultiIndex> = (0..big).map(|a| MultiIndex::from([a])).collect();
            let g = KernelHandle::gram(build_gram(&table, &idx).unwrap());
            let zs = [c(0.0), Complex64::new(0.4, -0.3), Complex64::from_polar(0.8, 2.0)];
            for &z in &zs {
                for &w in &zs {
                    let zw = z * w.conj();
                    let cd = (p.evaluate(&[z]).unwrap() * p.evaluate(&[w]).unwrap().conj()
                        - zw.powi((big - n) as i32)
                            * pt.evaluate(&[z]).unwrap()
                            * pt.evaluate(&[w]).unwrap().conj())
                        / (c(1.0) - zw);
                    let got = g.eval(&[z], &[w]).unwrap();
                    assert!((got - cd).norm() < 1e-11, "case {k} N={big}: {got} vs {cd}");
                }
            }
        }
    }
}
