#![allow(dead_code)]

use proptest::prelude::*;

use hyperchaos::rational::{one, rat, zero};
use hyperchaos::{CompactSet, Interval, PLMap, Rational};

pub const DEN: i64 = 64;

/// Random PL maps with `2..=max_nodes` nodes on the grid `1/DEN`.
pub fn arb_map(max_nodes: usize) -> impl Strategy<Value = PLMap> {
    arb_map_on(max_nodes, DEN)
}

/// Random PL maps with `2..=max_nodes` nodes on the grid `1/den`.
pub fn arb_map_on(max_nodes: usize, den: i64) -> impl Strategy<Value = PLMap> {
    let max_nodes = max_nodes.min(den as usize + 1);
    (
        proptest::sample::subsequence((1..den).collect::<Vec<_>>(), 0..=max_nodes - 2),
        proptest::collection::vec(0..=den, max_nodes),
    )
        .prop_map(move |(xs, ys)| {
            let mut nodes = vec![(zero(), rat(ys[0], den))];
            for (i, x) in xs.iter().enumerate() {
                nodes.push((rat(*x, den), rat(ys[i + 1], den)));
            }
            nodes.push((one(), rat(ys[xs.len() + 1], den)));
            PLMap::new(nodes).unwrap()
        })
}

/// Maps with `f([0,1/2]) = [1/2,1]` and `f([1/2,1]) = [0,1/2]`.
pub fn arb_swap_map() -> impl Strategy<Value = PLMap> {
    let half = DEN / 2;
    (proptest::collection::vec(half..=DEN, 1..4), proptest::collection::vec(0..=half, 1..4)).prop_map(
        move |(mut l, mut r)| {
            l.push(DEN);
            r.push(0);
            let mut nodes = Vec::new();
            let step_l = half / (l.len() as i64 + 1);
            nodes.push((zero(), rat(half, DEN)));
            for (i, y) in l.iter().enumerate() {
                nodes.push((rat(step_l * (i as i64 + 1), DEN), rat(*y, DEN)));
            }
            nodes.push((rat(half, DEN), rat(half, DEN)));
            let step_r = half / (r.len() as i64 + 1);
            for (i, y) in r.iter().enumerate() {
                nodes.push((rat(half + step_r * (i as i64 + 1), DEN), rat(*y, DEN)));
            }
            nodes.push((one(), rat(half, DEN)));
            PLMap::new(nodes).unwrap()
        },
    )
}

pub fn arb_point() -> impl Strategy<Value = Rational> {
    (0..=1024i64).prop_map(|p| rat(p, 1024))
}

pub fn arb_interval() -> impl Strategy<Value = Interval> {
    (0..=DEN, 0..=DEN).prop_map(|(a, b)| Interval::new(rat(a.min(b), DEN), rat(a.max(b), DEN)).unwrap())
}

pub fn arb_nondegenerate() -> impl Strategy<Value = Interval> {
    (0..DEN, 1..=DEN).prop_map(|(a, w)| {
        let lo = a.min(DEN - 1);
        let hi = (lo + w).min(DEN);
        Interval::new(rat(lo, DEN), rat(hi, DEN)).unwrap()
    })
}

pub fn arb_set() -> impl Strategy<Value = CompactSet> {
    proptest::collection::vec(arb_interval(), 1..=4).prop_map(|parts| CompactSet::from_parts(parts).unwrap())
}
