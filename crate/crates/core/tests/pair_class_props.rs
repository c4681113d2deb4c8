mod common;

use proptest::prelude::*;

use common::{arb_map, arb_point, arb_set};
use hyperchaos::pair_class::{classify_point_pair, classify_set_pair, classify_stats, point_orbit_stats, scan_pairs};
use hyperchaos::rational::{dyadic, rat};
use hyperchaos::{CompactSet, Interval, OrbitStats, PLMap, PairClass, PairParams};

fn params(horizon: usize) -> PairParams {
    PairParams::new(horizon, dyadic(20), rat(1, 4)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn point_pairs_symmetric(m in arb_map(8), x in arb_point(), y in arb_point()) {
        let p = params(64);
        let a = classify_point_pair(&m, &x, &y, &p).unwrap();
        let b = classify_point_pair(&m, &y, &x, &p).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn set_pairs_symmetric(m in arb_map(8), a in arb_set(), b in arb_set()) {
        let p = params(32);
        prop_assert_eq!(classify_set_pair(&m, &a, &b, &p).unwrap(), classify_set_pair(&m, &b, &a, &p).unwrap());
    }

    #[test]
    fn singletons_match_points(m in arb_map(8), x in arb_point(), y in arb_point()) {
        let p = params(64);
        let sa = CompactSet::point(x.clone()).unwrap();
        let sb = CompactSet::point(y.clone()).unwrap();
        prop_assert_eq!(classify_set_pair(&m, &sa, &sb, &p).unwrap(), classify_point_pair(&m, &x, &y, &p).unwrap());
    }

    #[test]
    fn eps_ly_monotone(ds in proptest::collection::vec(0..=64i64, 9..40), e1 in 1i64..64, e2 in 0i64..64) {
        let distances = ds.into_iter().map(|d| rat(d, 64)).collect::<Vec<_>>();
        let tail = distances.len() / 2;
        let stats = OrbitStats::new(distances, tail).unwrap();
        let tol = rat(1, 64);
        let (hi, lo) = (rat(e1.max(e2), 64), rat(e1.min(e2), 64));
        let c = classify_stats(&stats, &tol, &hi);
        if c.is_eps_ly() {
            prop_assert!(classify_stats(&stats, &tol, &lo).is_ly());
            if lo >= tol {
                prop_assert!(classify_stats(&stats, &tol, &lo).is_eps_ly());
            }
        }
        prop_assert_eq!(c.clone(), classify_stats(&stats, &tol, &hi));
    }

    #[test]
    fn horizon_refines_only(m in arb_map(8), x in arb_point(), y in arb_point(), h in 8usize..48) {
        let tol = dyadic(20);
        let short = point_orbit_stats(&m, &x, &y, h, h / 2).unwrap();
        let long = point_orbit_stats(&m, &x, &y, 2 * h, h / 2).unwrap();
        let eps = rat(1, 4);
        let (a, b) = (classify_stats(&short, &tol, &eps), classify_stats(&long, &tol, &eps));
        prop_assert!(!(a == PairClass::Asymptotic && b == PairClass::Distal));
        prop_assert!(!(a == PairClass::Distal && b == PairClass::Asymptotic));
        if a.is_ly() {
            prop_assert!(b.is_ly());
        }
    }
}

#[test]
fn identical_points_are_asymptotic() {
    let p = params(64);
    for m in [PLMap::tent(), PLMap::identity(), PLMap::flip(), PLMap::snoha(2)] {
        let v = classify_point_pair(&m, &rat(1, 3), &rat(1, 3), &p).unwrap();
        assert_eq!(v.class, PairClass::Asymptotic);
    }
}

#[test]
fn scans_are_deterministic() {
    let p = params(64);
    let u = Interval::unit();
    let a = scan_pairs(&PLMap::tent(), (&u, &u), 4, &p).unwrap();
    let b = scan_pairs(&PLMap::tent(), (&u, &u), 4, &p).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_csv(), b.to_csv());
    let id = scan_pairs(&PLMap::identity(), (&u, &u), 4, &p).unwrap();
    assert!(!id.all_cells_ly());
}
