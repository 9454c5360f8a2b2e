//! Invariants of the space, hyperspace, contraction and orbit modules, checked
//! on seeded random instances.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use setfix_core::contraction::{
    condition1_sides, condition1_terms, condition2_sides, condition3_terms, Coefficients,
    ContractionParams,
};
use setfix_core::hyperspace::{hausdorff, hausdorff_via_envelope};
use setfix_core::oracle::{random_family, random_pseudometric};
use setfix_core::{
    CompactSet, MultiMap, PointId, PseudometricFamily, SingleValuedMap, DEFAULT_TOL,
};

fn family_from_seed(seed: u64, n: usize, m: usize, zero_p: f64) -> PseudometricFamily {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_family(&mut rng, n, m, 0.3, zero_p)
}

fn subsets(n: usize) -> Vec<CompactSet> {
    (1u64..(1 << n)).filter_map(CompactSet::from_bits).collect()
}

fn arb_family(max_n: usize, max_m: usize) -> impl Strategy<Value = PseudometricFamily> {
    (
        any::<u64>(),
        1..=max_n,
        1..=max_m,
        prop_oneof![Just(0.0), Just(0.3)],
    )
        .prop_map(|(seed, n, m, zero_p)| family_from_seed(seed, n, m, zero_p))
}

fn arb_map(family: &PseudometricFamily, seed: u64) -> MultiMap {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = family.point_count();
    let images = (0..n)
        .map(|_| {
            let bits = rng.gen_range(1u64..(1 << n));
            CompactSet::from_bits(bits).unwrap()
        })
        .collect();
    MultiMap::new(family, images).unwrap()
}

fn arb_coefficients() -> impl Strategy<Value = Coefficients> {
    (-1.5f64..1.5, 0.0f64..0.95, 0.0f64..0.95)
        .prop_filter("0 < b + c < 1", |(_, b, c)| b + c > 0.0 && b + c < 1.0)
        .prop_map(|(a, b, c)| Coefficients::new(a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shortest_path_tables_are_valid(seed in any::<u64>(), n in 1usize..=9, zero_p in 0.0f64..0.8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = random_pseudometric(&mut rng, n, 0.3, zero_p);
        let family = PseudometricFamily::new(n, vec![table]).unwrap();
        prop_assert!(family.validate(DEFAULT_TOL).is_valid());
    }

    #[test]
    fn singleton_distance_is_point_distance(family in arb_family(6, 3)) {
        for i in 0..family.index_count() {
            for x in family.points() {
                for y in family.points() {
                    prop_assert_eq!(
                        family.point_to_set_distance(i, x, &CompactSet::singleton(y)),
                        family.distance(i, x, y)
                    );
                }
            }
        }
    }

    #[test]
    fn point_to_set_distance_is_one_lipschitz(family in arb_family(6, 2)) {
        let n = family.point_count();
        for a in subsets(n) {
            for i in 0..family.index_count() {
                for x in family.points() {
                    for y in family.points() {
                        let lhs = family.point_to_set_distance(i, x, &a);
                        let rhs = family.distance(i, x, y) + family.point_to_set_distance(i, y, &a);
                        prop_assert!(lhs <= rhs + DEFAULT_TOL);
                    }
                }
            }
        }
    }

    #[test]
    fn diameter_is_monotone(family in arb_family(6, 3)) {
        let all = subsets(family.point_count());
        for a in &all {
            for b in all.iter().filter(|b| b.is_subset_of(a)) {
                prop_assert!(family.augmented_diameter(b) <= family.augmented_diameter(a));
            }
        }
    }

    #[test]
    fn hausdorff_formulas_agree(family in arb_family(8, 4), seed in any::<u64>()) {
        use rand::Rng;
        let n = family.point_count();
        let pairs: Vec<(CompactSet, CompactSet)> = if n <= 5 {
            let all = subsets(n);
            all.iter().flat_map(|a| all.iter().map(move |b| (a.clone(), b.clone()))).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200)
                .map(|_| {
                    let a = CompactSet::from_bits(rng.gen_range(1u64..(1 << n))).unwrap();
                    let b = CompactSet::from_bits(rng.gen_range(1u64..(1 << n))).unwrap();
                    (a, b)
                })
                .collect()
        };
        for (a, b) in &pairs {
            for i in 0..family.index_count() {
                let direct = hausdorff(&family, i, a, b);
                let envelope = hausdorff_via_envelope(&family, i, a, b);
                prop_assert!((direct - envelope).abs() <= DEFAULT_TOL, "{} vs {}", direct, envelope);
            }
        }
    }

    #[test]
    fn hausdorff_of_singletons(family in arb_family(6, 3)) {
        for i in 0..family.index_count() {
            for x in family.points() {
                for y in family.points() {
                    let (a, b) = (CompactSet::singleton(x), CompactSet::singleton(y));
                    prop_assert_eq!(hausdorff(&family, i, &a, &b), family.distance(i, x, y));
                }
            }
        }
    }

    #[test]
    fn exponent_one_matches_exponent_free_form(
        family in arb_family(6, 3),
        map_seed in any::<u64>(),
        coefficients in arb_coefficients(),
    ) {
        let map = arb_map(&family, map_seed);
        let params = ContractionParams::uniform(1, coefficients, family.index_count()).unwrap();
        for x in family.points() {
            for y in family.points() {
                for i in 0..family.index_count() {
                    prop_assert_eq!(
                        condition1_sides(&family, &map, &params, x, y, i),
                        condition2_sides(&family, &map, coefficients, x, y, i)
                    );
                }
            }
        }
    }

    #[test]
    fn lifted_map_matches_single_valued_form(
        family in arb_family(6, 3),
        targets_seed in any::<u64>(),
        coefficients in arb_coefficients(),
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(targets_seed);
        let n = family.point_count();
        let t = SingleValuedMap::new(&family, (0..n).map(|_| PointId(rng.gen_range(0..n))).collect()).unwrap();
        let lifted = t.lift();
        let params = ContractionParams::uniform(1, coefficients, family.index_count()).unwrap();
        for x in family.points() {
            for y in family.points() {
                for i in 0..family.index_count() {
                    let multi = condition1_terms(&family, &lifted, &params, x, y, i);
                    let single = condition3_terms(&family, &t, coefficients, x, y, i);
                    prop_assert_eq!(multi.image_gap, single.image_gap);
                    prop_assert_eq!((multi.lhs(), multi.rhs()), (single.lhs(), single.rhs()));
                }
            }
        }
    }

    #[test]
    fn subtractive_variant_is_min_minus_min(
        family in arb_family(6, 2),
        targets_seed in any::<u64>(),
        b in 0.01f64..0.5,
        c in 0.01f64..0.45,
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(targets_seed);
        let n = family.point_count();
        let t = SingleValuedMap::new(&family, (0..n).map(|_| PointId(rng.gen_range(0..n))).collect()).unwrap();
        let co = Coefficients::new(-1.0, b, c);
        for x in family.points() {
            for y in family.points() {
                for i in 0..family.index_count() {
                    let d = |u, v| family.distance(i, u, v);
                    let (tx, ty) = (t.apply(x), t.apply(y));
                    let first = d(tx, ty).min(d(x, tx)).min(d(y, ty));
                    let second = d(x, ty).min(d(y, tx));
                    let terms = condition3_terms(&family, &t, co, x, y, i);
                    prop_assert_eq!(terms.min_term(), first);
                    prop_assert_eq!(terms.cross_gap, second);
                    prop_assert_eq!(terms.lhs(), first - second);
                    prop_assert_eq!(terms.rhs(), b * d(x, tx) + c * d(x, y));
                }
            }
        }
    }
}

#[test]
fn hausdorff_is_a_pseudometric_on_subsets() {
    for seed in 0..40 {
        let n = 1 + (seed % 4) as usize;
        let m = 1 + (seed % 3) as usize;
        let family = family_from_seed(seed, n, m, if seed % 2 == 0 { 0.0 } else { 0.4 });
        let all = subsets(n);
        for i in 0..m {
            for a in &all {
                assert_eq!(hausdorff(&family, i, a, a), 0.0);
                for b in &all {
                    let ab = hausdorff(&family, i, a, b);
                    assert_eq!(ab, hausdorff(&family, i, b, a));
                    for c in &all {
                        let ac = hausdorff(&family, i, a, c);
                        let bc = hausdorff(&family, i, b, c);
                        assert!(ac <= ab + bc + DEFAULT_TOL);
                    }
                }
            }
        }
    }
}
