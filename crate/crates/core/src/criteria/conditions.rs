use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::TriState;
use crate::error::{domain, Result};
use crate::interval::Interval;
use crate::pair_class::OrbitStats;
use crate::pl_map::PLMap;
use crate::rational::{fmt_rational, rat, serde_rat, zero, Rational};

fn nondegenerate(j: &Interval, what: &str) -> Result<()> {
    if j.is_degenerate() {
        return domain(format!("{what} must be a nondegenerate interval, got {j}"));
    }
    Ok(())
}

/// `f(t) ⊆ t`.
pub fn invariant(m: &PLMap, t: &Interval) -> bool {
    t.contains_interval(&m.image_interval(t))
}

/// No node lies strictly inside `j`.
pub(crate) fn affine_on(m: &PLMap, j: &Interval) -> bool {
    !m.nodes().iter().any(|(x, _)| j.lo() < x && x < j.hi())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct F1Result {
    #[serde(flatten)]
    pub state: TriState,
    /// First `n` with `dist(f^n(J1), f^n(J2)) <= tol_low`.
    pub witness_n: Option<usize>,
    #[serde(with = "serde_rat")]
    pub min_distance: Rational,
    pub certificate: Option<String>,
}

/// `liminf dist(f^n(J1), f^n(J2)) = 0`.
///
/// Fails only with a certificate: the pair of interval sequences repeats
/// exactly while staying apart, or both tails sit in disjoint invariant hulls.
pub fn check_f1(m: &PLMap, j1: &Interval, j2: &Interval, horizon: usize, tol_low: &Rational) -> Result<F1Result> {
    nondegenerate(j1, "J1")?;
    nondegenerate(j2, "J2")?;
    let mut seen: HashMap<(Interval, Interval), usize> = HashMap::new();
    let mut seq_a = Vec::with_capacity(horizon + 1);
    let mut seq_b = Vec::with_capacity(horizon + 1);
    let (mut a, mut b) = (j1.clone(), j2.clone());
    let mut min_distance: Option<Rational> = None;
    for n in 0..=horizon {
        let d = a.distance(&b);
        if min_distance.as_ref().is_none_or(|m| &d < m) {
            min_distance = Some(d.clone());
        }
        if &d <= tol_low {
            return Ok(F1Result {
                state: TriState::sampled_pass(),
                witness_n: Some(n),
                min_distance: d,
                certificate: None,
            });
        }
        if let Some(first) = seen.insert((a.clone(), b.clone()), n) {
            return Ok(F1Result {
                state: TriState::certified_fail(),
                witness_n: None,
                min_distance: min_distance.unwrap(),
                certificate: Some(format!(
                    "the pair of images repeats with period {} from n = {first}; distance stays >= {}",
                    n - first,
                    fmt_rational(&d_min_cycle(&seq_a[first..], &seq_b[first..]))
                )),
            });
        }
        seq_a.push(a.clone());
        seq_b.push(b.clone());
        a = m.image_interval(&a);
        b = m.image_interval(&b);
    }
    let tail = horizon / 2;
    let ka = hull_of(&seq_a[tail..]);
    let kb = hull_of(&seq_b[tail..]);
    let min_distance = min_distance.unwrap();
    if invariant(m, &ka) && invariant(m, &kb) && !ka.intersects(&kb) {
        return Ok(F1Result {
            state: TriState::certified_fail(),
            witness_n: None,
            min_distance,
            certificate: Some(format!("tails trapped in disjoint invariant intervals {ka} and {kb}")),
        });
    }
    Ok(F1Result { state: TriState::inconclusive(), witness_n: None, min_distance, certificate: None })
}

fn d_min_cycle(a: &[Interval], b: &[Interval]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x.distance(y)).min().unwrap_or_else(zero)
}

pub(crate) fn hull_of(seq: &[Interval]) -> Interval {
    seq.iter().skip(1).fold(seq[0].clone(), |acc, j| acc.hull(j))
}

/// Diameters of `f^n(J)`, `n = 0..=horizon`, with their tail extremes.
pub fn check_diam_growth(m: &PLMap, j: &Interval, horizon: usize, tail_start: usize) -> Result<OrbitStats> {
    nondegenerate(j, "J")?;
    let diams = m.iterate_interval(j, horizon).iter().map(Interval::diameter).collect();
    OrbitStats::new(diams, tail_start)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct G1Result {
    #[serde(flatten)]
    pub state: TriState,
    #[serde(with = "serde_rat")]
    pub tail_max_distance: Rational,
    /// `(start, period)` of the exact interval cycle, when found.
    pub cycle: Option<(usize, usize)>,
}

/// `lim dist(f^n(J), x0) = 0` for a fixed point `x0`.
pub fn check_g1(m: &PLMap, x0: &Rational, j: &Interval, horizon: usize, tol_low: &Rational) -> Result<G1Result> {
    if &m.eval(x0)? != x0 {
        return domain(format!("{} is not a fixed point", fmt_rational(x0)));
    }
    nondegenerate(j, "J")?;
    let o = m.interval_orbit(j, horizon);
    if let Some(members) = o.cycle_members() {
        let dists: Vec<Rational> = members.iter().map(|k| k.distance_to_point(x0)).collect();
        let worst = dists.iter().max().unwrap().clone();
        let state = if worst == zero() { TriState::proved_pass() } else { TriState::certified_fail() };
        return Ok(G1Result { state, tail_max_distance: worst, cycle: o.cycle });
    }
    let tail: Vec<Rational> = o.seq[horizon / 2..].iter().map(|k| k.distance_to_point(x0)).collect();
    let worst = tail.iter().max().unwrap().clone();
    let state = if &worst <= tol_low {
        TriState::sampled_pass()
    } else if tail.iter().all(|d| d > tol_low) && tail.windows(2).all(|w| w[0] <= w[1]) {
        TriState::observed_fail()
    } else {
        TriState::inconclusive()
    };
    Ok(G1Result { state, tail_max_distance: worst, cycle: None })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoveringResult {
    #[serde(flatten)]
    pub state: TriState,
    pub core: Interval,
    pub pieces: usize,
    /// A piece whose images provably keep missing part of the core.
    pub failing_piece: Option<Interval>,
    /// Largest `N` over the pieces that passed.
    pub max_n: usize,
}

/// Every piece `J` of a dyadic partition of `t` (width `|t|·2^-grid`) has
/// `H ⊆ f^n(J)` for all `N < n <= horizon`, where `H` is the central 90% of
/// `t`. A piece passes when its exact interval sequence cycles through
/// supersets of `H`, or when `N <= horizon / 2`.
pub fn check_covering_transitivity(m: &PLMap, t: &Interval, grid: u32, horizon: usize) -> Result<CoveringResult> {
    nondegenerate(t, "T")?;
    if !invariant(m, t) {
        return domain(format!("{t} is not invariant: its image is {}", m.image_interval(t)));
    }
    let core = t.shrink(&rat(1, 20));
    let pieces = t.subdivide(1usize << grid);
    let mut any_inconclusive = false;
    let mut max_n = 0;
    for piece in &pieces {
        let o = m.interval_orbit(piece, horizon);
        let last_bad = o.seq.iter().rposition(|k| !k.contains_interval(&core));
        let n = last_bad.unwrap_or(0);
        if let Some(members) = o.cycle_members() {
            if members.iter().all(|k| k.contains_interval(&core)) {
                max_n = max_n.max(n);
                continue;
            }
            return Ok(CoveringResult {
                state: TriState::certified_fail(),
                core,
                pieces: pieces.len(),
                failing_piece: Some(piece.clone()),
                max_n,
            });
        }
        if n <= horizon / 2 {
            max_n = max_n.max(n);
        } else {
            any_inconclusive = true;
        }
    }
    let state = if any_inconclusive { TriState::inconclusive() } else { TriState::sampled_pass() };
    Ok(CoveringResult { state, core, pieces: pieces.len(), failing_piece: None, max_n })
}

/// A nondegenerate invariant interval. Every pair inside it stays within its
/// diameter forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trap {
    pub interval: Interval,
    pub source: &'static str,
}

/// Fixed points that can anchor invariant intervals: isolated fixed points
/// and the endpoints of fixed segments.
pub(crate) fn fixed_anchors(m: &PLMap) -> Vec<Rational> {
    let mut out = BTreeSet::new();
    for p in m.fixed_points().parts() {
        out.insert(p.lo().clone());
        out.insert(p.hi().clone());
    }
    out.into_iter().collect()
}

/// Exactly invariant nondegenerate intervals found among: intervals spanned
/// by two fixed anchors, hulls of the exact cycles of the dyadic grid
/// intervals of width `2^-grid`, and segments of fixed points.
/// Sorted by decreasing diameter.
pub fn find_traps(m: &PLMap, grid: u32, horizon: usize) -> Vec<Trap> {
    let mut found: Vec<Trap> = Vec::new();
    let mut seen: BTreeSet<Interval> = BTreeSet::new();
    let mut push = |j: Interval, source: &'static str, found: &mut Vec<Trap>| {
        if !j.is_degenerate() && seen.insert(j.clone()) && invariant(m, &j) {
            found.push(Trap { interval: j, source });
        }
    };
    for p in m.fixed_points().parts() {
        push(p.clone(), "fixed segment", &mut found);
    }
    let anchors = fixed_anchors(m);
    let anchors = &anchors[..anchors.len().min(48)];
    for (i, p) in anchors.iter().enumerate() {
        for q in &anchors[i + 1..] {
            push(Interval::new_unchecked(p.clone(), q.clone()), "between fixed points", &mut found);
        }
    }
    for j in Interval::unit().subdivide(1usize << grid) {
        let o = m.interval_orbit(&j, horizon);
        if let Some(members) = o.cycle_members() {
            push(hull_of(members), "hull of an interval cycle", &mut found);
        }
    }
    found.sort_by(|a, b| b.interval.diameter().cmp(&a.interval.diameter()).then(a.interval.cmp(&b.interval)));
    found
}

/// The widest trap of diameter at most `eps`. A nondegenerate fixed segment
/// yields traps of every size, so it always supplies one.
pub(crate) fn trap_at_most(traps: &[Trap], eps: &Rational) -> Option<Trap> {
    if let Some(t) = traps.iter().find(|t| &t.interval.diameter() <= eps) {
        return Some(t.clone());
    }
    traps.iter().find(|t| t.source == "fixed segment").map(|t| {
        let lo = t.interval.lo().clone();
        let hi = &lo + eps;
        Trap { interval: Interval::new_unchecked(lo, hi), source: "piece of a fixed segment" }
    })
}
