use pickdecomp_core::lattice::{box_points, contains, enumerate};
use pickdecomp_core::{IndexSetExpr, MultiIndex, VarSet};
use proptest::prelude::*;

fn degree_and_box() -> impl Strategy<Value = (MultiIndex, i64)> {
    (2usize..=3)
        .prop_flat_map(|d| (proptest::collection::vec(0i64..4, d), 3i64..6))
        .prop_map(|(n, big)| (MultiIndex::new(n), big))
}

fn count(expr: &IndexSetExpr, bx: &MultiIndex) -> usize {
    enumerate(expr, bx).unwrap().len()
}

proptest! {
    #[test]
    fn x_union_count_matches_closed_form((n, big) in degree_and_box(), bits in 1u64..8) {
        let d = n.dim();
        let s = VarSet::from_vars((0..d).filter(|j| bits >> j & 1 == 1));
        prop_assume!(!s.is_empty());
        let bx = MultiIndex::splat(d, big);
        let outside: i64 = (0..d)
            .map(|j| if s.contains(j) { big - n[j].min(big) } else { big })
            .product();
        let expected = big.pow(d as u32) - outside;
        prop_assert_eq!(count(&IndexSetExpr::XUnion(s, n.clone()), &bx) as i64, expected);
    }

    #[test]
    fn x_union_is_monotone_in_s((n, big) in degree_and_box(), a in 1u64..8, b in 0u64..8) {
        let d = n.dim();
        let s = VarSet::from_vars((0..d).filter(|j| a >> j & 1 == 1));
        prop_assume!(!s.is_empty());
        let s2 = s.union(VarSet::from_vars((0..d).filter(|j| b >> j & 1 == 1)));
        let bx = MultiIndex::splat(d, big);
        for alpha in enumerate(&IndexSetExpr::XUnion(s, n.clone()), &bx).unwrap() {
            prop_assert!(contains(&IndexSetExpr::XUnion(s2, n.clone()), &alpha).unwrap());
        }
    }

    #[test]
    fn b_is_union_of_all_x((n, big) in degree_and_box()) {
        let d = n.dim();
        let bx = MultiIndex::splat(d, big);
        let b = enumerate(&IndexSetExpr::BSet(n.clone()), &bx).unwrap();
        let x = enumerate(&IndexSetExpr::XUnion(VarSet::full(d), n.clone()), &bx).unwrap();
        prop_assert_eq!(b, x);
    }

    #[test]
    fn enumerate_agrees_with_contains((n, big) in degree_and_box(), j in 0usize..2) {
        let d = n.dim();
        let bx = MultiIndex::splat(d, big);
        let expr = IndexSetExpr::diff(
            IndexSetExpr::BSet(n.clone()),
            IndexSetExpr::intersect(
                IndexSetExpr::XSingle(j, n.clone()),
                IndexSetExpr::XSingle(d - 1, n.clone()),
            ),
        );
        let listed = enumerate(&expr, &bx).unwrap();
        let filtered: Vec<MultiIndex> = box_points(&bx)
            .unwrap()
            .into_iter()
            .filter(|a| contains(&expr, a).unwrap())
            .collect();
        prop_assert_eq!(listed, filtered);
    }

    #[test]
    fn shift_maps_x_t_into_itself((n, big) in degree_and_box(), bits in 1u64..8) {
        let d = n.dim();
        let t = VarSet::from_vars((0..d).filter(|j| bits >> j & 1 == 1));
        prop_assume!(!t.is_empty() && t.len() < d);
        let bx = MultiIndex::splat(d, big);
        let x_t = IndexSetExpr::XUnion(t, n.clone());
        for alpha in enumerate(&x_t, &bx).unwrap() {
            for j in t.complement(d).iter() {
                let shifted = &alpha + &MultiIndex::unit(d, j);
                prop_assert!(contains(&x_t, &shifted).unwrap());
            }
        }
    }
}

#[test]
fn empty_union_is_origin() {
    let n = MultiIndex::from([2, 3]);
    let pts = enumerate(&IndexSetExpr::XUnion(VarSet::empty(), n), &MultiIndex::splat(2, 5)).unwrap();
    assert_eq!(pts, vec![MultiIndex::zeros(2)]);
}

#[test]
fn orthant_complement_of_b() {
    let n = MultiIndex::from([1, 2]);
    let bx = MultiIndex::splat(2, 4);
    let b = count(&IndexSetExpr::BSet(n.clone()), &bx);
    let shifted = count(&IndexSetExpr::ShiftedOrthant(n), &bx);
    assert_eq!(b + shifted, 16);
}
