//! Solver against brute force on generated certified instances.

use setfix_core::contraction::{check_condition_global, Coefficients, ContractionParams};
use setfix_core::oracle::{
    certify_uniqueness, enumerate_fixed_points, generate_instance, Instance, InstanceProfile,
    MapKind, ParamRanges, UniquenessVerdict,
};
use setfix_core::orbit::{
    generate_orbit, is_fixed_point, solve, step_contraction_check, tail_bound, tail_bound_checks,
    Driver, OrbitStatus, SolveOptions,
};
use setfix_core::{CompactSet, MultiMap, PointId, PseudometricFamily, DEFAULT_TOL};

const KINDS: [MapKind; 5] = [
    MapKind::Constant,
    MapKind::LiftedSingleValued,
    MapKind::RandomMultivalued,
    MapKind::Sink,
    MapKind::LiftedSink,
];

fn certified_suite(count: usize, max_m: usize) -> Vec<Instance> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let kind = KINDS[(seed % KINDS.len() as u64) as usize];
        let n = match kind {
            MapKind::LiftedSingleValued | MapKind::RandomMultivalued => 1 + (seed % 6) as usize,
            _ => 1 + (seed % 10) as usize,
        };
        let m = 1 + (seed / 5 % max_m as u64) as usize;
        let r = 1 + (seed / 7 % 3) as u32;
        let mut profile = InstanceProfile::new(kind, n, m, seed).with_ranges(ParamRanges {
            a: (-1.0, 0.0),
            r: (r, r),
            ..ParamRanges::default()
        });
        profile.budget = 2_000;
        if let Ok(instance) = generate_instance(&profile) {
            out.push(instance);
        }
        seed += 1;
    }
    out
}

fn check_instance(instance: &Instance) {
    let Instance {
        family,
        map,
        params,
        ..
    } = instance;
    assert!(check_condition_global(family, map, params, DEFAULT_TOL).certifies());
    let fixed = enumerate_fixed_points(map);
    assert!(
        !fixed.is_empty(),
        "certified instance without fixed point: {instance:?}"
    );
    let n = family.point_count();
    for driver in 0..family.index_count() {
        let k = params.k(driver);
        for x0 in family.points() {
            let options = SolveOptions {
                driver: Driver::Index(driver),
                ..SolveOptions::default()
            };
            let result = solve(family, map, params, x0, &options).unwrap();
            assert_eq!(result.status(), OrbitStatus::FixedPointFound);
            assert!(!result.is_anomaly());
            assert!(result.steps < n.max(1));
            assert!(is_fixed_point(map, result.point));
            assert!(fixed.contains(&result.point));

            let orbit = &result.orbit;
            for (step, pair) in orbit.points.windows(2).enumerate() {
                assert!(map.image(pair[0]).contains(pair[1]));
                assert_eq!(
                    orbit.step_distances[driver][step],
                    family.point_to_set_distance(driver, pair[0], map.image(pair[0]))
                );
            }
            assert!(step_contraction_check(orbit, params, DEFAULT_TOL)[driver]
                .iter()
                .all(|&ok| ok));
            assert!(tail_bound_checks(family, orbit, driver, k, DEFAULT_TOL)
                .unwrap()
                .iter()
                .all(|check| check.holds));
            if let Some(&d01) = orbit.step_distances[driver].first() {
                for (step, &d) in orbit.step_distances[driver].iter().enumerate() {
                    let geometric = tail_bound(step, k, d01).unwrap() * (1.0 - k);
                    assert!(d <= geometric + DEFAULT_TOL);
                }
            }
        }
    }
}

#[test]
fn certified_instances_reach_enumerated_fixed_points() {
    for instance in certified_suite(300, 3) {
        check_instance(&instance);
    }
}

#[test]
fn certified_instances_on_a_single_metric() {
    for instance in certified_suite(150, 1) {
        assert_eq!(instance.family.index_count(), 1);
        check_instance(&instance);
    }
}

#[test]
fn lifted_instances_with_uniqueness_gate_have_one_fixed_point() {
    let ranges = ParamRanges {
        a: (0.3, 0.5),
        b: (0.5, 0.65),
        c: (0.05, 0.3),
        r: (1, 1),
    };
    let mut seen = 0;
    for seed in 0..150 {
        let n = 1 + (seed % 10) as usize;
        let m = 1 + (seed % 3) as usize;
        let kind = if seed % 3 == 0 {
            MapKind::Constant
        } else {
            MapKind::LiftedSink
        };
        let instance =
            generate_instance(&InstanceProfile::new(kind, n, m, seed).with_ranges(ranges)).unwrap();
        let t = instance
            .single_valued
            .clone()
            .or_else(|| instance.map.as_single_valued())
            .unwrap();
        match certify_uniqueness(&instance.family, &t, &instance.params, DEFAULT_TOL) {
            UniquenessVerdict::Unique(z) => {
                assert_eq!(enumerate_fixed_points(&instance.map), vec![z]);
                seen += 1;
            }
            other => panic!("seed {seed}: {other:?}"),
        }
    }
    assert_eq!(seen, 150);
}

#[test]
fn aggregate_driver_walks_a_valid_orbit() {
    for instance in certified_suite(60, 3) {
        for x0 in instance.family.points() {
            let orbit = generate_orbit(
                &instance.family,
                &instance.map,
                x0,
                Driver::Aggregate,
                100,
                DEFAULT_TOL,
            )
            .unwrap();
            for pair in orbit.points.windows(2) {
                assert!(instance.map.image(pair[0]).contains(pair[1]));
            }
        }
    }
}

/// Each index alone identifies two points. Every residual that could enter the
/// min-term vanishes, so the condition holds on all tuples, yet no point is
/// fixed: guarantees need every index to be a metric, not just a separating
/// family.
#[test]
fn separating_pseudometrics_can_certify_a_map_without_fixed_points() {
    let family = PseudometricFamily::from_matrices(&[
        vec![
            vec![0.0, 1.635, 1.635],
            vec![1.635, 0.0, 0.0],
            vec![1.635, 0.0, 0.0],
        ],
        vec![
            vec![0.0, 1.86, 0.0],
            vec![1.86, 0.0, 1.86],
            vec![0.0, 1.86, 0.0],
        ],
    ])
    .unwrap();
    assert!(family.is_separating());
    assert!(family.validate(DEFAULT_TOL).is_valid());
    let set = |ids: &[usize]| CompactSet::new(ids.iter().copied().map(PointId)).unwrap();
    let map = MultiMap::new(&family, vec![set(&[2]), set(&[0, 2]), set(&[0, 1])]).unwrap();
    let params = ContractionParams::uniform(1, Coefficients::new(0.0, 0.2, 0.1), 2).unwrap();

    assert!(check_condition_global(&family, &map, &params, DEFAULT_TOL).certifies());
    assert!(enumerate_fixed_points(&map).is_empty());
    // From p0 the orbit moves to p2, where d_0(p2, F p2) = d_1(p2, F p2) = 0
    // through different members, although p2 is not in F p2.
    let result = solve(&family, &map, &params, PointId(0), &SolveOptions::default()).unwrap();
    assert_eq!(result.orbit.points, vec![PointId(0), PointId(2)]);
    assert!(result.converged());
    assert!(result.is_degenerate());
    assert!(result.is_anomaly());
}
