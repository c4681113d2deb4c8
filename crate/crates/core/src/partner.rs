//! Partner points by itinerary pullback.
//!
//! Points with rational coordinates are eventually periodic under a PL map
//! with rational nodes, so plain sampling rarely meets a pair that comes close
//! *and* separates inside the tail window. Here the orbit of a partner `y` is
//! planned instead: the reachable set `f^t(Y)` is tracked exactly, two
//! waypoints are fixed inside the tail window (one far from `f^t(x)`, one
//! within `tol_low / 2` of it), and the end point is pulled back through the
//! waypoints with exact preimages. The resulting pair is then classified like
//! any other; nothing here decides a verdict.

use crate::hyperspace::CompactSet;
use crate::interval::Interval;
use crate::pair_class::PairParams;
use crate::pl_map::{IntervalOrbit, PLMap};
use crate::rational::{abs_diff, int, Rational};

#[derive(Clone, Debug)]
pub struct PartnerWindow {
    pub tail_start: usize,
    pub horizon: usize,
    pub tol_low: Rational,
    pub eps: Rational,
}

impl PartnerWindow {
    pub fn from_params(p: &PairParams) -> Self {
        PartnerWindow { tail_start: p.tail_start, horizon: p.horizon, tol_low: p.tol_low.clone(), eps: p.eps.clone() }
    }

    /// The same window seen from time `t0` onwards.
    pub fn shifted(&self, t0: usize) -> Self {
        PartnerWindow {
            tail_start: self.tail_start.saturating_sub(t0),
            horizon: self.horizon.saturating_sub(t0),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stage {
    Far,
    Near,
}

/// A point `y ∈ region` whose orbit passes within `tol_low / 2` of the orbit of
/// `x` and, at another tail time, farther than the threshold from it. The
/// threshold is `eps` when that is reachable, else `tol_low`.
pub fn build_partner(m: &PLMap, x: &Rational, region: &Interval, w: &PartnerWindow) -> Option<Rational> {
    if w.horizon == 0 || w.tail_start >= w.horizon {
        return None;
    }
    let xs = m.orbit(x, w.horizon);
    let delta = &w.tol_low / int(2);
    let plans = [
        (&w.eps, [Stage::Far, Stage::Near]),
        (&w.eps, [Stage::Near, Stage::Far]),
        (&w.tol_low, [Stage::Far, Stage::Near]),
        (&w.tol_low, [Stage::Near, Stage::Far]),
    ];
    let base = m.interval_orbit(region, w.horizon);
    for (threshold, order) in plans {
        if let Some(way) = plan(m, &xs, &base, w.tail_start, threshold, &delta, order) {
            if let Some(y) = pull_back(m, &xs, region, &way, &delta) {
                return Some(y);
            }
        }
    }
    None
}

fn plan(
    m: &PLMap,
    xs: &[Rational],
    base: &IntervalOrbit,
    tail_start: usize,
    threshold: &Rational,
    delta: &Rational,
    order: [Stage; 2],
) -> Option<Vec<(usize, Stage, Interval)>> {
    // The reachable set follows an exact interval orbit, restarted at each
    // waypoint; cycles make long windows cheap.
    let mut cur: (std::borrow::Cow<'_, IntervalOrbit>, usize) = (std::borrow::Cow::Borrowed(base), 0);
    let mut out = Vec::with_capacity(2);
    let horizon = xs.len() - 1;
    for (t, xt) in xs.iter().enumerate() {
        let reach = cur.0.at(t - cur.1)?.clone();
        if t >= tail_start {
            let stage = order[out.len()];
            let picked = match stage {
                Stage::Far => far_part(&reach, xt, threshold),
                Stage::Near => near_part(&reach, xt, delta),
            };
            if let Some(wp) = picked {
                out.push((t, stage, wp.clone()));
                if out.len() == order.len() {
                    return Some(out);
                }
                cur = (std::borrow::Cow::Owned(m.interval_orbit(&wp, horizon - t)), t);
            }
        }
    }
    None
}

/// The part of `r` at distance `>= (threshold + D) / 2` from `x` on the
/// farther side, where `D` is the largest distance from `x` to `r`.
fn far_part(r: &Interval, x: &Rational, threshold: &Rational) -> Option<Interval> {
    let to_lo = x - r.lo();
    let to_hi = r.hi() - x;
    let (big, upper) = if to_hi >= to_lo { (to_hi, true) } else { (to_lo, false) };
    if &big <= threshold {
        return None;
    }
    let d = (threshold + &big) / int(2);
    let part = if upper {
        Interval::new_unchecked(x + &d, r.hi().clone())
    } else {
        Interval::new_unchecked(r.lo().clone(), x - &d)
    };
    part.intersection(r).filter(|p| !p.is_degenerate())
}

fn near_part(r: &Interval, x: &Rational, delta: &Rational) -> Option<Interval> {
    let lo = x - delta;
    let hi = x + delta;
    let lo = if lo < int(0) { int(0) } else { lo };
    let hi = if hi > int(1) { int(1) } else { hi };
    if lo > hi {
        return None;
    }
    Interval::new_unchecked(lo, hi).intersection(r).filter(|p| !p.is_degenerate())
}

fn pull_back(
    m: &PLMap,
    xs: &[Rational],
    region: &Interval,
    way: &[(usize, Stage, Interval)],
    delta: &Rational,
) -> Option<Rational> {
    let (t_last, stage, w_last) = way.last()?;
    let xt = &xs[*t_last];
    let mut z = match stage {
        Stage::Near => {
            let up = xt + delta;
            let down = xt - delta;
            if w_last.contains(&up) {
                up
            } else if w_last.contains(&down) {
                down
            } else if abs_diff(w_last.lo(), xt) >= abs_diff(w_last.hi(), xt) {
                w_last.lo().clone()
            } else {
                w_last.hi().clone()
            }
        }
        Stage::Far => {
            if abs_diff(w_last.lo(), xt) >= abs_diff(w_last.hi(), xt) {
                w_last.lo().clone()
            } else {
                w_last.hi().clone()
            }
        }
    };
    let mut t_next = *t_last;
    for (t, _, w) in way.iter().rev().skip(1) {
        z = m.preimage_iter(t_next - t, &z, w)?;
        t_next = *t;
    }
    m.preimage_iter(t_next, &z, region)
}

/// One point in each interval of `parts` whose `t0`-th image is `target`.
pub fn collapse_onto(m: &PLMap, parts: &[Interval], t0: usize, target: &Rational) -> Option<CompactSet> {
    let pts = parts.iter().map(|u| m.preimage_iter(t0, target, u)).collect::<Option<Vec<_>>>()?;
    CompactSet::points(&pts).ok()
}
