use std::fmt;

use serde::Serialize;

use super::conditions::{check_diam_growth, fixed_anchors};
use super::transitive::{find_invariant_transitive_intervals, Dichotomy, TransitiveIntervalReport};
use crate::hyperspace::{vietoris_member, CompactSet, VietorisBox};
use crate::interval::Interval;
use crate::pair_class::{classify_set_pair, sampling_margin, van_der_corput, PairParams, PairVerdict};
use crate::partner::{build_partner, PartnerWindow};
use crate::pl_map::PLMap;
use crate::rational::{fmt_rational, int, rat, serde_rat, zero, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstructParams {
    /// Horizon and thresholds of the final verification.
    pub pair: PairParams,
    /// Bound on the step searches (`k`, `l`, merge times).
    pub search_horizon: usize,
    /// Candidate points tried in each intersection.
    pub candidates: usize,
}

impl ConstructParams {
    pub fn new(pair: PairParams) -> Self {
        ConstructParams { pair, search_horizon: 64, candidates: 24 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub stage: &'static str,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Construction {
    pub u: CompactSet,
    pub v: CompactSet,
    pub branch: &'static str,
    pub case: &'static str,
    pub k: usize,
    pub l: usize,
    #[serde(serialize_with = "serde_rat::opt::serialize")]
    pub x0: Option<Rational>,
    pub verdict: PairVerdict,
    pub membership: (bool, bool),
    pub trace: Vec<TraceStep>,
}

/// The failing stage of a construction, with the steps that succeeded before it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NotFound {
    pub stage: &'static str,
    pub reason: String,
    pub trace: Vec<TraceStep>,
}

impl fmt::Display for NotFound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "construction not found: {} ({})", self.stage, self.reason)
    }
}

impl std::error::Error for NotFound {}

type Outcome<T> = std::result::Result<T, NotFound>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    U,
    V,
}

/// One open of a box, followed to the stage where the case analysis runs.
#[derive(Clone, Debug)]
struct Piece {
    side: Side,
    /// Closed interval strictly inside the open.
    base: Interval,
    /// `inner ⊆ f^l(base)`; equal to `base` when `l = 0`.
    inner: Interval,
}

struct Ctx<'a> {
    m: &'a PLMap,
    boxes: (&'a VietorisBox, &'a VietorisBox),
    params: &'a ConstructParams,
    want_eps: bool,
    trace: Vec<TraceStep>,
}

impl Ctx<'_> {
    fn step(&mut self, stage: &'static str, detail: impl Into<String>) {
        self.trace.push(TraceStep { stage, detail: detail.into() });
    }

    fn fail<T>(&self, stage: &'static str, reason: impl Into<String>) -> Outcome<T> {
        Err(NotFound { stage, reason: reason.into(), trace: self.trace.clone() })
    }

    fn window(&self, shift: usize) -> Outcome<PartnerWindow> {
        let p = &self.params.pair;
        if shift >= p.tail_start {
            return self.fail("horizon", format!("{shift} steps reach past the tail start {}", p.tail_start));
        }
        Ok(PartnerWindow::from_params(p).shifted(shift))
    }

    fn candidates(&self, s: &Interval) -> Vec<Rational> {
        (1..=self.params.candidates as u64).map(|n| s.at_fraction(&van_der_corput(n))).collect()
    }

    /// Classifies `(u, v)` and checks box membership; `Some` on success.
    fn verify(&self, u: &CompactSet, v: &CompactSet) -> Option<(PairVerdict, (bool, bool))> {
        let membership = (vietoris_member(u, self.boxes.0), vietoris_member(v, self.boxes.1));
        if !(membership.0 && membership.1) {
            return None;
        }
        let verdict = classify_set_pair(self.m, u, v, &self.params.pair).ok()?;
        let ok = if self.want_eps { verdict.class.is_eps_ly() } else { verdict.class.is_ly() };
        ok.then_some((verdict, membership))
    }
}

/// Pulls `target` back through `k` steps of `g` into `piece.inner`, then
/// through `l` steps of `f` into `piece.base`.
fn pull(f: &PLMap, g: &PLMap, k: usize, l: usize, piece: &Piece, target: &Rational) -> Option<Rational> {
    let w = g.preimage_iter(k, target, &piece.inner)?;
    if l == 0 {
        Some(w)
    } else {
        f.preimage_iter(l, &w, &piece.base)
    }
}

fn build_sets(
    f: &PLMap,
    g: &PLMap,
    k: usize,
    l: usize,
    pieces: &[Piece],
    target: impl Fn(usize) -> Rational,
) -> Option<(CompactSet, CompactSet)> {
    let mut us = Vec::new();
    let mut vs = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        let x = pull(f, g, k, l, p, &target(i))?;
        match p.side {
            Side::U => us.push(x),
            Side::V => vs.push(x),
        }
    }
    Some((CompactSet::points(&us).ok()?, CompactSet::points(&vs).ok()?))
}

fn intersect_all<'a>(mut it: impl Iterator<Item = &'a Interval>) -> Option<Interval> {
    it.try_fold(Interval::unit(), |acc, j| acc.intersection(j))
}

fn pieces_from(boxes: (&VietorisBox, &VietorisBox)) -> Vec<Piece> {
    let margin = sampling_margin();
    let mk = |side, b: &VietorisBox| {
        b.opens()
            .iter()
            .map(|o| {
                let j = o.inner(&margin);
                Piece { side, base: j.clone(), inner: j }
            })
            .collect::<Vec<_>>()
    };
    let mut out = mk(Side::U, boxes.0);
    out.extend(mk(Side::V, boxes.1));
    out
}

struct Found {
    u: CompactSet,
    v: CompactSet,
    case: &'static str,
    verdict: PairVerdict,
    membership: (bool, bool),
}

/// The three cases of the split into two classes of pieces. `g` is the map
/// whose `k`-th images were intersected; it takes `factor` steps of `f`.
#[allow(clippy::too_many_arguments)]
fn run_cases(
    ctx: &mut Ctx<'_>,
    g: &PLMap,
    factor: usize,
    k: usize,
    l: usize,
    x0: &Rational,
    pieces: &[Piece],
    classes: &[u8],
) -> Outcome<Found> {
    let m = ctx.m;
    let images: Vec<Interval> = pieces.iter().map(|p| g.iterate_interval(&p.inner, k).pop().unwrap()).collect();
    let class_set = |c: u8| {
        let members: Vec<&Interval> = images.iter().zip(classes).filter(|(_, &d)| d == c).map(|(j, _)| j).collect();
        (!members.is_empty()).then(|| intersect_all(members.into_iter()))
    };
    let s1 = class_set(1);
    let s2 = class_set(2);
    for (name, s) in [("S1", &s1), ("S2", &s2)] {
        match s {
            Some(None) => return ctx.fail("intersection", format!("{name} is empty")),
            Some(Some(j)) if j.is_degenerate() => {
                return ctx.fail("intersection", format!("{name} = {j} is degenerate"))
            }
            Some(Some(j)) => ctx.step("intersection", format!("{name} = {j}")),
            None => ctx.step("intersection", format!("{name} has no members")),
        }
    }
    let shift = l + factor * k;
    let window = ctx.window(shift)?;
    let has = |side: Side, c: u8| pieces.iter().zip(classes).any(|(p, &d)| p.side == side && d == c);

    match (s1.flatten(), s2.flatten()) {
        (Some(s), None) | (None, Some(s)) => {
            ctx.step("case", "case 3: one class is empty");
            for x in ctx.candidates(&s) {
                let Some(p) = build_partner(m, &x, &s, &window) else { continue };
                let Some((u, v)) =
                    build_sets(m, g, k, l, pieces, |i| if pieces[i].side == Side::U { x.clone() } else { p.clone() })
                else {
                    continue;
                };
                if let Some((verdict, membership)) = ctx.verify(&u, &v) {
                    ctx.step("pair", format!("s = {}, p = {}", fmt_rational(&x), fmt_rational(&p)));
                    return Ok(Found { u, v, case: "case 3", verdict, membership });
                }
            }
            ctx.fail("pair-search", format!("no verified pair in {s} x {s}"))
        }
        (Some(s1), Some(s2)) if has(Side::U, 1) && has(Side::U, 2) && has(Side::V, 1) && has(Side::V, 2) => {
            ctx.step("case", "case 1: both boxes meet both classes");
            for x in ctx.candidates(&s1) {
                let Some(p) = build_partner(m, &x, &s1, &window) else { continue };
                for r in merge_candidates(m, &x, &s2, x0, ctx.params.search_horizon) {
                    let target = |i: usize| match (pieces[i].side, classes[i]) {
                        (_, 2) => r.clone(),
                        (Side::U, _) => x.clone(),
                        (Side::V, _) => p.clone(),
                    };
                    let Some((u, v)) = build_sets(m, g, k, l, pieces, target) else { continue };
                    if let Some((verdict, membership)) = ctx.verify(&u, &v) {
                        ctx.step(
                            "pair",
                            format!("s = {}, p = {}, r = {}", fmt_rational(&x), fmt_rational(&p), fmt_rational(&r)),
                        );
                        return Ok(Found { u, v, case: "case 1", verdict, membership });
                    }
                }
            }
            ctx.fail("pair-search", format!("no verified pair in {s1} x {s1} with a companion in {s2}"))
        }
        (Some(s1), Some(s2)) => {
            // One box lies in a single class c; its points all map to s.
            let (whole, c) = if !has(Side::U, 2) {
                (Side::U, 1)
            } else if !has(Side::U, 1) {
                (Side::U, 2)
            } else if !has(Side::V, 2) {
                (Side::V, 1)
            } else {
                (Side::V, 2)
            };
            let (sc, so) = if c == 1 { (&s1, &s2) } else { (&s2, &s1) };
            ctx.step("case", format!("case 2: the {whole:?} box lies in class {c}"));
            for x in ctx.candidates(sc) {
                let Some(r) = build_partner(m, &x, so, &window) else { continue };
                let target = |i: usize| if classes[i] == c { x.clone() } else { r.clone() };
                let Some((u, v)) = build_sets(m, g, k, l, pieces, target) else { continue };
                if let Some((verdict, membership)) = ctx.verify(&u, &v) {
                    ctx.step("pair", format!("s = {}, r = {}", fmt_rational(&x), fmt_rational(&r)));
                    return Ok(Found { u, v, case: "case 2", verdict, membership });
                }
            }
            ctx.fail("pair-search", format!("no verified pair in {sc} x {so}"))
        }
        (None, None) => ctx.fail("intersection", "no pieces"),
    }
}

/// Companions `r ∈ s2` for case 1, best first: points whose orbit merges
/// with that of `s` after `j` steps, then `x0`, then the midpoint.
fn merge_candidates(m: &PLMap, s: &Rational, s2: &Interval, x0: &Rational, search: usize) -> Vec<Rational> {
    let mut out = Vec::new();
    if s2.contains(s) {
        out.push(s.clone());
    }
    let orbit = m.orbit(s, search);
    for (j, t) in orbit.iter().enumerate().skip(1) {
        if let Some(r) = m.preimage_iter(j, t, s2) {
            out.push(r);
            break;
        }
    }
    if s2.contains(x0) {
        out.push(x0.clone());
    }
    out.push(s2.midpoint());
    out.dedup();
    out
}

fn finish(ctx: Ctx<'_>, found: Found, branch: &'static str, k: usize, l: usize, x0: Option<Rational>) -> Construction {
    Construction {
        u: found.u,
        v: found.v,
        branch,
        case: found.case,
        k,
        l,
        x0,
        verdict: found.verdict,
        membership: found.membership,
        trace: ctx.trace,
    }
}

fn validate(ctx: &Ctx<'_>) -> Outcome<()> {
    if ctx.params.search_horizon == 0 || ctx.params.candidates == 0 {
        return ctx.fail("input", "search_horizon and candidates must be positive");
    }
    Ok(())
}

/// Minimum over pieces of the tail minimum of `diam g^n(inner)`.
fn liminf_diameter(g: &PLMap, pieces: &[Piece], horizon: usize) -> Rational {
    pieces
        .iter()
        .map(|p| check_diam_growth(g, &p.inner, horizon, horizon / 2).expect("pieces are nondegenerate").tail_min)
        .min()
        .unwrap()
}

/// Smallest `k` such that every piece has `dist(g^k(inner), x0) < bound/4`
/// and `diam g^k(inner) > bound/2`.
fn k_for(g: &PLMap, pieces: &[Piece], x0: &Rational, bound: &Rational, search: usize) -> Option<usize> {
    let quarter = bound / int(4);
    let half = bound / int(2);
    let orbits: Vec<Vec<Interval>> = pieces.iter().map(|p| g.iterate_interval(&p.inner, search)).collect();
    (0..=search).find(|&k| orbits.iter().all(|o| o[k].distance_to_point(x0) < quarter && o[k].diameter() > half))
}

/// Builds a Li-Yorke pair `(U, V)` of the induced map with `U ∈ box_u` and
/// `V ∈ box_v`, following the three-case argument: find a fixed point `x0`
/// and a step `k` at which all images are large and close to `x0`, split the
/// opens by whether `f^k` of them reaches `x0 - δ/4`, and pull a pair of the
/// class intersections back by `k` steps.
pub fn construct_hyper_ly_pair(
    m: &PLMap,
    box_u: &VietorisBox,
    box_v: &VietorisBox,
    params: &ConstructParams,
) -> Outcome<Construction> {
    let mut ctx = Ctx { m, boxes: (box_u, box_v), params, want_eps: false, trace: Vec::new() };
    validate(&ctx)?;
    let pieces = pieces_from((box_u, box_v));
    let delta = liminf_diameter(m, &pieces, params.pair.horizon);
    if delta == zero() {
        return ctx.fail("delta", "some open has images whose diameters approach 0");
    }
    ctx.step("delta", format!("delta = {}", fmt_rational(&delta)));

    let found = fixed_anchors(m)
        .into_iter()
        .find_map(|x0| k_for(m, &pieces, &x0, &delta, params.search_horizon).map(|k| (x0, k)));
    let Some((x0, k)) = found else {
        return ctx
            .fail("k-search", format!("no fixed point and k <= {} satisfy the inequalities", params.search_horizon));
    };
    ctx.step("k-search", format!("x0 = {}, k = {k}", fmt_rational(&x0)));

    let probe = &x0 - &delta / int(4);
    let classes: Vec<u8> = pieces
        .iter()
        .map(|p| if m.iterate_interval(&p.inner, k).pop().unwrap().contains(&probe) { 1 } else { 2 })
        .collect();
    ctx.step("split", format!("classes {classes:?} by membership of {}", fmt_rational(&probe)));
    let found = run_cases(&mut ctx, m, 1, k, 0, &x0, &pieces, &classes)?;
    Ok(finish(ctx, found, "ly", k, 0, Some(x0)))
}

/// Builds an ε-Li-Yorke pair of the induced map in `box_u × box_v`, with
/// `ε = params.pair.eps`. The opens are first moved by `l` steps into the
/// interiors of invariant transitive intervals; then either the two-class
/// argument runs around the common point of two intervals (for `f`, or for
/// `f²` when one interval has swapped halves), or the covering property of a
/// single interval maps every piece over the hull of its box.
pub fn construct_hyper_eps_ly_pair(
    m: &PLMap,
    box_u: &VietorisBox,
    box_v: &VietorisBox,
    params: &ConstructParams,
) -> Outcome<Construction> {
    let mut ctx = Ctx { m, boxes: (box_u, box_v), params, want_eps: true, trace: Vec::new() };
    validate(&ctx)?;
    let report: TransitiveIntervalReport = find_invariant_transitive_intervals(m, 4, params.pair.horizon, 5, 64);
    if report.intervals.is_empty() {
        let rejected: Vec<String> = report.rejected.iter().map(|r| format!("{}: {}", r.interval, r.reason)).collect();
        return ctx.fail("transitive-intervals", format!("none found; rejected: [{}]", rejected.join("; ")));
    }
    let ts: Vec<String> = report.intervals.iter().map(|t| t.interval.to_string()).collect();
    ctx.step("transitive-intervals", ts.join(", "));

    let search = params.search_horizon;
    let mut pieces = pieces_from((box_u, box_v));
    let orbits: Vec<Vec<Interval>> = pieces.iter().map(|p| m.iterate_interval(&p.base, search)).collect();
    let entry = (0..=search).find_map(|l| {
        orbits
            .iter()
            .map(|o| {
                report.intervals.iter().find_map(|t| {
                    o[l].intersection(&t.interval).filter(|j| !j.is_degenerate()).map(|j| j.shrink(&rat(1, 3)))
                })
            })
            .collect::<Option<Vec<_>>>()
            .map(|inner| (l, inner))
    });
    let Some((l, inners)) = entry else {
        return ctx.fail("l-search", format!("some open never enters a transitive interval within {search} steps"));
    };
    for (p, j) in pieces.iter_mut().zip(inners) {
        p.inner = j;
    }
    ctx.step("l-search", format!("l = {l}"));

    if let Some((t1, _, x0)) = report.touching_pair() {
        let t1 = t1.interval.clone();
        ctx.step("branch", format!("two intervals meeting at {}", fmt_rational(&x0)));
        let classes: Vec<u8> = pieces.iter().map(|p| if t1.contains_interval(&p.inner) { 1 } else { 2 }).collect();
        return two_class(ctx, m, 1, l, x0, pieces, classes, "two intervals");
    }
    let t = &report.intervals[0];
    match &t.dichotomy {
        Dichotomy::TwoSwappedHalves { y } => {
            ctx.step("branch", format!("square map: f swaps the halves of {} at {}", t.interval, fmt_rational(y)));
            let left = Interval::new(t.interval.lo().clone(), y.clone()).expect("ordered");
            let right = Interval::new(y.clone(), t.interval.hi().clone()).expect("ordered");
            let mut classes = Vec::with_capacity(pieces.len());
            for p in pieces.iter_mut() {
                let a = p.inner.intersection(&left).filter(|j| !j.is_degenerate());
                let b = p.inner.intersection(&right).filter(|j| !j.is_degenerate());
                let (c, j) = match (a, b) {
                    (Some(a), Some(b)) if b.diameter() > a.diameter() => (2, b),
                    (Some(a), _) => (1, a),
                    (None, Some(b)) => (2, b),
                    (None, None) => unreachable!("inner is nondegenerate and inside the interval"),
                };
                p.inner = if j == p.inner { j } else { j.shrink(&rat(1, 3)) };
                classes.push(c);
            }
            let g = m.square();
            two_class(ctx, &g, 2, l, y.clone(), pieces, classes, "square map")
        }
        _ => all_powers(ctx, m, l, pieces),
    }
}

#[allow(clippy::too_many_arguments)]
fn two_class(
    mut ctx: Ctx<'_>,
    g: &PLMap,
    factor: usize,
    l: usize,
    x0: Rational,
    pieces: Vec<Piece>,
    classes: Vec<u8>,
    branch: &'static str,
) -> Outcome<Construction> {
    let horizon = ctx.params.pair.horizon / factor;
    let b = liminf_diameter(g, &pieces, horizon.max(2));
    if b == zero() {
        return ctx.fail("delta", "some piece has images whose diameters approach 0");
    }
    ctx.step("delta", format!("b = {}", fmt_rational(&b)));
    let Some(k) = k_for(g, &pieces, &x0, &b, ctx.params.search_horizon) else {
        return ctx.fail("k-search", format!("no k <= {} satisfies the inequalities", ctx.params.search_horizon));
    };
    ctx.step("k-search", format!("x0 = {}, k = {k}", fmt_rational(&x0)));
    ctx.step("split", format!("classes {classes:?} by side of {}", fmt_rational(&x0)));
    let found = run_cases(&mut ctx, g, factor, k, l, &x0, &pieces, &classes)?;
    Ok(finish(ctx, found, branch, k, l, Some(x0)))
}

fn all_powers(mut ctx: Ctx<'_>, m: &PLMap, l: usize, pieces: Vec<Piece>) -> Outcome<Construction> {
    ctx.step("branch", "all powers transitive: covering");
    let hull = |side: Side| {
        pieces.iter().filter(|p| p.side == side).map(|p| p.inner.clone()).reduce(|a, b| a.hull(&b)).unwrap()
    };
    let (hu, hv) = (hull(Side::U), hull(Side::V));
    let search = ctx.params.search_horizon;
    let orbits: Vec<Vec<Interval>> = pieces.iter().map(|p| m.iterate_interval(&p.inner, search)).collect();
    let k = (0..=search).find(|&k| {
        pieces.iter().zip(&orbits).all(|(p, o)| o[k].contains_interval(if p.side == Side::U { &hu } else { &hv }))
    });
    let Some(k) = k else {
        return ctx.fail("covering", format!("no k <= {search} maps every piece over {hu} and {hv}"));
    };
    ctx.step("covering", format!("k = {k}: images cover U' = {hu} and V' = {hv}"));
    let window = ctx.window(l + k)?;
    for s in ctx.candidates(&hu) {
        let Some(p) = build_partner(m, &s, &hv, &window) else { continue };
        let Some((u, v)) =
            build_sets(m, m, k, l, &pieces, |i| if pieces[i].side == Side::U { s.clone() } else { p.clone() })
        else {
            continue;
        };
        if let Some((verdict, membership)) = ctx.verify(&u, &v) {
            ctx.step("pair", format!("s = {}, p = {}", fmt_rational(&s), fmt_rational(&p)));
            let found = Found { u, v, case: "single interval", verdict, membership };
            return Ok(finish(ctx, found, "all powers", k, l, None));
        }
    }
    ctx.fail("pair-search", format!("no verified pair in {hu} x {hv}"))
}
