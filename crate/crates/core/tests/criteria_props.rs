mod common;

use proptest::prelude::*;

use common::{arb_map, arb_map_on, arb_nondegenerate, arb_set, arb_swap_map};
use hyperchaos::criteria::{
    check_f1, classify_chaos, construct_hyper_eps_ly_pair, find_invariant_transitive_intervals, invariant, ChaosParams,
    ChaosVerdict, ConstructParams, Dichotomy, Status, TriState,
};
use hyperchaos::hyperspace::{hausdorff_orbit_stats_from, induced_orbit, vietoris_member};
use hyperchaos::pair_class::classify_set_pair;
use hyperchaos::rational::{dyadic, max_of, one, rat};
use hyperchaos::{Interval, OpenInterval, PLMap, PairParams, Rational, VietorisBox};

fn pass(s: &TriState) -> bool {
    s.status == Status::Pass
}

fn fail(s: &TriState) -> bool {
    s.status == Status::Fail
}

fn check_wiring(v: &ChaosVerdict) -> std::result::Result<(), TestCaseError> {
    let (g, ge, d, de) = (&v.generic.state, &v.generic_eps.state, &v.dense.state, &v.dense_eps.state);
    if pass(ge) {
        prop_assert!(pass(g) && pass(de));
    }
    if pass(de) {
        prop_assert!(pass(ge) && pass(d));
    }
    if pass(g) {
        prop_assert!(pass(d));
    }
    if fail(d) {
        prop_assert!(fail(g) && fail(ge) && fail(de));
    }
    if fail(g) {
        prop_assert!(fail(ge) && fail(de));
    }
    Ok(())
}

fn small_params() -> ChaosParams {
    let mut p = ChaosParams::new(rat(1, 4)).unwrap();
    p.horizon = 64;
    p.scan_grid = 4;
    p.nbhd_levels = 4;
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn verdicts_respect_implications(m in arb_map_on(5, 8)) {
        let v = classify_chaos(&m, &small_params()).unwrap();
        check_wiring(&v)?;
    }

    #[test]
    fn swapped_halves_are_sound(m in prop_oneof![arb_map_on(6, 8), arb_swap_map()]) {
        let r = find_invariant_transitive_intervals(&m, 4, 128, 5, 64);
        for t in &r.intervals {
            prop_assert!(invariant(&m, &t.interval));
            if let Dichotomy::TwoSwappedHalves { y } = &t.dichotomy {
                prop_assert_eq!(&m.eval(y).unwrap(), y);
                let left = Interval::new(t.interval.lo().clone(), y.clone()).unwrap();
                let right = Interval::new(y.clone(), t.interval.hi().clone()).unwrap();
                prop_assert_eq!(m.image_interval(&left), right.clone());
                prop_assert_eq!(m.image_interval(&right), left);
            }
        }
        for c in &r.rejected {
            if let Some(y) = &c.swap {
                prop_assert_eq!(&m.eval(y).unwrap(), y);
            }
        }
    }

    #[test]
    fn f1_pass_is_monotone_in_horizon(m in arb_map(8), j1 in arb_nondegenerate(), j2 in arb_nondegenerate(), h in 4usize..40) {
        let tol = dyadic(20);
        let short = check_f1(&m, &j1, &j2, h, &tol).unwrap();
        let long = check_f1(&m, &j1, &j2, 2 * h, &tol).unwrap();
        if pass(&short.state) {
            prop_assert!(pass(&long.state));
            prop_assert_eq!(short.witness_n, long.witness_n);
        }
        if fail(&short.state) {
            prop_assert!(!pass(&long.state));
        }
    }

    #[test]
    fn square_map_consistency(m in arb_map(6), a in arb_set(), b in arb_set(), h in 4usize..20) {
        let g = m.square();
        // The induced orbit of the square is the even subsequence.
        let fo = induced_orbit(&m, &a, 2 * h);
        let go = induced_orbit(&g, &a, h);
        for (n, s) in go.iter().enumerate() {
            prop_assert_eq!(s, &fo[2 * n]);
        }
        let tol = rat(1, 64);
        let lip = max_of(&m.max_abs_slope(), &one()).clone();
        let tol2: Rational = &tol * &lip;
        let sf = hausdorff_orbit_stats_from(&m, &a, &b, 2 * h, h).unwrap();
        let sg = hausdorff_orbit_stats_from(&g, &a, &b, h, h / 2).unwrap();
        // One step of f expands distances by at most the slope modulus.
        for i in h..2 * h {
            if sf.distances[i] <= tol {
                prop_assert!(sf.distances[i + 1] <= tol2);
            }
        }
        if sg.distances[h.div_ceil(2)..].iter().any(|d| d <= &tol) {
            prop_assert!(sf.tail_min <= tol);
        }
    }

    #[test]
    fn tent_constructions_verify(a in 0i64..12, b in 1i64..5, c in 0i64..12, d in 1i64..5) {
        let open = |lo: i64, w: i64| OpenInterval::new(rat(lo, 16), rat((lo + w).min(16), 16)).unwrap();
        let bu = VietorisBox::new(vec![open(a, b)]).unwrap();
        let bv = VietorisBox::new(vec![open(c, d)]).unwrap();
        let pair = PairParams::new(256, dyadic(20), rat(1, 2)).unwrap();
        let params = ConstructParams::new(pair.clone());
        let got = construct_hyper_eps_ly_pair(&PLMap::tent(), &bu, &bv, &params);
        prop_assert!(got.is_ok(), "{:?}", got.err());
        let c = got.unwrap();
        prop_assert!(vietoris_member(&c.u, &bu) && vietoris_member(&c.v, &bv));
        prop_assert!(classify_set_pair(&PLMap::tent(), &c.u, &c.v, &pair).unwrap().class.is_eps_ly());
    }
}

#[test]
fn named_maps_respect_implications() {
    for m in [PLMap::tent(), PLMap::identity(), PLMap::flip(), PLMap::snoha(2)] {
        let v = classify_chaos(&m, &small_params()).unwrap();
        check_wiring(&v).unwrap();
    }
}
