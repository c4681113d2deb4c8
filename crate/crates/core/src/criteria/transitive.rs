use std::collections::BTreeSet;

use serde::Serialize;

use super::conditions::{check_covering_transitivity, fixed_anchors, hull_of, invariant, CoveringResult};
use super::{Status, TriState};
use crate::interval::Interval;
use crate::pl_map::PLMap;
use crate::rational::{serde_rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dichotomy {
    /// Covering holds for `f` on `T`, so every power of `f` is transitive there.
    AllPowersTransitive,
    /// `f` swaps `[lo, y]` and `[y, hi]`, and `f²` covers each half.
    TwoSwappedHalves {
        #[serde(with = "serde_rat")]
        y: Rational,
    },
    NotEstablished,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitiveInterval {
    pub interval: Interval,
    pub dichotomy: Dichotomy,
    pub covering: CoveringResult,
    /// Covering results of `f²` on the two halves, for the swapped case.
    pub halves: Option<(CoveringResult, CoveringResult)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RejectedCandidate {
    pub interval: Interval,
    pub reason: String,
    /// The swap point, when `f` exchanges the two halves exactly.
    #[serde(serialize_with = "serde_rat::opt::serialize")]
    pub swap: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitiveIntervalReport {
    pub intervals: Vec<TransitiveInterval>,
    pub rejected: Vec<RejectedCandidate>,
    /// Candidates whose covering test neither passed nor failed.
    pub undecided: Vec<Interval>,
    /// A unique transitive interval, or two sharing exactly one point.
    pub h1: TriState,
    /// Per grid interval: some iterate meets the interior of a reported `T`.
    pub h2: Vec<(Interval, TriState)>,
    pub h2_all: TriState,
}

impl TransitiveIntervalReport {
    /// The two intervals of a touching pair, left one first.
    pub fn touching_pair(&self) -> Option<(&TransitiveInterval, &TransitiveInterval, Rational)> {
        if self.intervals.len() != 2 {
            return None;
        }
        let (a, b) = (&self.intervals[0], &self.intervals[1]);
        let (l, r) = if a.interval.lo() <= b.interval.lo() { (a, b) } else { (b, a) };
        (l.interval.hi() == r.interval.lo()).then(|| (l, r, l.interval.hi().clone()))
    }
}

/// Interior fixed points `y` of `t` with `f([lo, y]) = [y, hi]` and
/// `f([y, hi]) = [lo, y]`.
pub(crate) fn swap_point(m: &PLMap, t: &Interval) -> Option<Rational> {
    fixed_anchors(m).into_iter().find(|y| {
        if !(t.lo() < y && y < t.hi()) {
            return false;
        }
        let left = Interval::new_unchecked(t.lo().clone(), y.clone());
        let right = Interval::new_unchecked(y.clone(), t.hi().clone());
        m.image_interval(&left) == right && m.image_interval(&right) == left
    })
}

/// Searches for invariant transitive intervals.
///
/// Candidates are the hulls of the exact cycles reached by the dyadic grid
/// intervals of width `2^-grid` and the intervals spanned by two fixed
/// points. Each exactly invariant candidate is tested by covering under `f`;
/// if that fails and `f` swaps two halves around a fixed point, covering of
/// the halves under `f²` is tested instead.
pub fn find_invariant_transitive_intervals(
    m: &PLMap,
    grid: u32,
    horizon: usize,
    covering_grid: u32,
    covering_horizon: usize,
) -> TransitiveIntervalReport {
    let grid_intervals = Interval::unit().subdivide(1usize << grid);
    let mut candidates: BTreeSet<Interval> = BTreeSet::new();
    for j in &grid_intervals {
        if let Some(members) = m.interval_orbit(j, horizon).cycle_members() {
            candidates.insert(hull_of(members));
        }
    }
    let anchors = fixed_anchors(m);
    let anchors = &anchors[..anchors.len().min(48)];
    for (i, p) in anchors.iter().enumerate() {
        for q in &anchors[i + 1..] {
            candidates.insert(Interval::new_unchecked(p.clone(), q.clone()));
        }
    }

    let mut square: Option<PLMap> = None;
    let mut intervals = Vec::new();
    let mut rejected = Vec::new();
    let mut undecided = Vec::new();
    for t in candidates {
        if t.is_degenerate() || !invariant(m, &t) {
            continue;
        }
        let covering = check_covering_transitivity(m, &t, covering_grid, covering_horizon)
            .expect("candidate is invariant and nondegenerate");
        if covering.state.is_pass() {
            intervals.push(TransitiveInterval {
                interval: t,
                dichotomy: Dichotomy::AllPowersTransitive,
                covering,
                halves: None,
            });
            continue;
        }
        if let Some(y) = swap_point(m, &t) {
            let g = square.get_or_insert_with(|| m.square());
            let left = Interval::new_unchecked(t.lo().clone(), y.clone());
            let right = Interval::new_unchecked(y.clone(), t.hi().clone());
            let cl = check_covering_transitivity(g, &left, covering_grid, covering_horizon)
                .expect("a swapped half is invariant under the square");
            let cr = check_covering_transitivity(g, &right, covering_grid, covering_horizon)
                .expect("a swapped half is invariant under the square");
            if cl.state.is_pass() && cr.state.is_pass() {
                intervals.push(TransitiveInterval {
                    interval: t,
                    dichotomy: Dichotomy::TwoSwappedHalves { y },
                    covering,
                    halves: Some((cl, cr)),
                });
            } else {
                rejected.push(RejectedCandidate {
                    interval: t,
                    reason: format!("halves swapped, but the square map covers them: {} / {}", cl.state, cr.state),
                    swap: Some(y),
                });
            }
            continue;
        }
        match covering.state.status {
            Status::Fail => rejected.push(RejectedCandidate {
                interval: t,
                reason: format!(
                    "covering fails: images of {} keep missing part of {}",
                    covering.failing_piece.as_ref().map(|p| p.to_string()).unwrap_or_default(),
                    covering.core
                ),
                swap: None,
            }),
            _ => undecided.push(t),
        }
    }
    // Keep minimal intervals: a transitive interval containing another is
    // not transitive unless they coincide.
    let all: Vec<Interval> = intervals.iter().map(|t| t.interval.clone()).collect();
    intervals.retain(|t| !all.iter().any(|o| o != &t.interval && t.interval.contains_interval(o)));

    let h1 = match intervals.len() {
        1 => TriState::sampled_pass(),
        2 if {
            let (a, b) = (&intervals[0].interval, &intervals[1].interval);
            a.hi() == b.lo() || b.hi() == a.lo()
        } =>
        {
            TriState::sampled_pass()
        }
        0 if undecided.is_empty() => TriState::observed_fail(),
        _ => TriState::inconclusive(),
    };

    let h2: Vec<(Interval, TriState)> = grid_intervals
        .iter()
        .map(|j| {
            let o = m.interval_orbit(j, horizon);
            let hits = o.seq.iter().any(|k| intervals.iter().any(|t| k.meets_interior_of(&t.interval)));
            let state = if hits {
                TriState::sampled_pass()
            } else if o.cycle.is_some() && !intervals.is_empty() {
                TriState::certified_fail()
            } else {
                TriState::inconclusive()
            };
            (j.clone(), state)
        })
        .collect();
    let h2_all = h2.iter().fold(TriState::sampled_pass(), |acc, (_, s)| acc.and(*s));

    TransitiveIntervalReport { intervals, rejected, undecided, h1, h2, h2_all }
}
