//! Piecewise-linear self-maps of `[0, 1]` with exact forward and backward
//! dynamics.

use std::collections::HashMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::error::{domain, Error, Result};
use crate::hyperspace::CompactSet;
use crate::interval::Interval;
use crate::rational::{fmt_rational, int, one, rat, zero, Rational};

/// A continuous map of `[0, 1]` that interpolates linearly between nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMap {
    nodes: Vec<(Rational, Rational)>,
}

/// Which solution to take when a preimage is not unique.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl PLMap {
    /// Validates the node list and reports the first violated invariant.
    pub fn new(nodes: Vec<(Rational, Rational)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidMap { index: nodes.len(), reason: "at least two nodes are required".into() });
        }
        for (i, (x, y)) in nodes.iter().enumerate() {
            if i == 0 && !x.is_zero() {
                return Err(Error::InvalidMap {
                    index: i,
                    reason: format!("first x must be 0, got {}", fmt_rational(x)),
                });
            }
            if i > 0 && x <= &nodes[i - 1].0 {
                return Err(Error::InvalidMap { index: i, reason: "x-coordinates must be strictly increasing".into() });
            }
            if x > &one() {
                return Err(Error::InvalidMap { index: i, reason: format!("x = {} exceeds 1", fmt_rational(x)) });
            }
            if y < &zero() || y > &one() {
                return Err(Error::InvalidMap { index: i, reason: format!("y = {} outside [0, 1]", fmt_rational(y)) });
            }
        }
        let last = nodes.len() - 1;
        if nodes[last].0 != one() {
            return Err(Error::InvalidMap {
                index: last,
                reason: format!("last x must be 1, got {}", fmt_rational(&nodes[last].0)),
            });
        }
        Ok(PLMap { nodes })
    }

    pub fn nodes(&self) -> &[(Rational, Rational)] {
        &self.nodes
    }

    pub fn tent() -> Self {
        PLMap { nodes: vec![(zero(), zero()), (rat(1, 2), one()), (one(), zero())] }
    }

    pub fn identity() -> Self {
        PLMap { nodes: vec![(zero(), zero()), (one(), one())] }
    }

    /// `x ↦ 1 - x`.
    pub fn flip() -> Self {
        PLMap { nodes: vec![(zero(), one()), (one(), zero())] }
    }

    /// The truncated Snoha map `f_depth`.
    ///
    /// For `i = 0..=depth` the map is linear on `[a_i, b_i]`, `[b_i, c_i]`,
    /// `[c_i, a_{i+1}]` with `f(a_i) = a_i`, `f(b_i) = 1`, `f(c_i) = a_i`, where
    /// `a_i = 1 - 3^-i`, `b_i = 1 - 1/(4·3^(i-1))`, `c_i = 1 - 1/(2·3^i)`.
    /// On `[a_{depth+1}, 1]` it is the identity.
    pub fn snoha(depth: u32) -> Self {
        let pow3 = |i: u32| int(3).pow(i as i32);
        let a = |i: u32| one() - one() / pow3(i);
        let b = |i: u32| one() - int(3) / (int(4) * pow3(i));
        let c = |i: u32| one() - one() / (int(2) * pow3(i));
        let mut nodes = Vec::with_capacity(3 * depth as usize + 5);
        for i in 0..=depth {
            nodes.push((a(i), a(i)));
            nodes.push((b(i), one()));
            nodes.push((c(i), a(i)));
        }
        let tail = a(depth + 1);
        nodes.push((tail.clone(), tail));
        nodes.push((one(), one()));
        PLMap { nodes }
    }

    /// Index `i` of the segment `[x_i, x_{i+1}]` containing `x`.
    fn segment_of(&self, x: &Rational) -> usize {
        let last = self.nodes.len() - 2;
        match self.nodes.binary_search_by(|(nx, _)| nx.cmp(x)) {
            Ok(i) => i.min(last),
            Err(i) => (i - 1).min(last),
        }
    }

    fn eval_on_segment(&self, i: usize, x: &Rational) -> Rational {
        let (x0, y0) = &self.nodes[i];
        let (x1, y1) = &self.nodes[i + 1];
        if x == x0 {
            return y0.clone();
        }
        if x == x1 {
            return y1.clone();
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    pub fn eval(&self, x: &Rational) -> Result<Rational> {
        if x < &zero() || x > &one() {
            return domain(format!("x = {} outside [0, 1]", fmt_rational(x)));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &Rational) -> Rational {
        self.eval_on_segment(self.segment_of(x), x)
    }

    /// The exact image `f(J)`.
    pub fn image_interval(&self, j: &Interval) -> Interval {
        let lo_v = self.eval_unchecked(j.lo());
        if j.is_degenerate() {
            return Interval::new_unchecked(lo_v.clone(), lo_v);
        }
        let hi_v = self.eval_unchecked(j.hi());
        let (mut lo, mut hi) = if lo_v <= hi_v { (lo_v, hi_v) } else { (hi_v, lo_v) };
        let start = self.nodes.partition_point(|(x, _)| x <= j.lo());
        for (x, y) in &self.nodes[start..] {
            if x >= j.hi() {
                break;
            }
            if y < &lo {
                lo = y.clone();
            }
            if y > &hi {
                hi = y.clone();
            }
        }
        Interval::new_unchecked(lo, hi)
    }

    /// `[J, f(J), …, f^n(J)]`.
    pub fn iterate_interval(&self, j: &Interval, n: usize) -> Vec<Interval> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(j.clone());
        for _ in 0..n {
            let next = self.image_interval(out.last().unwrap());
            out.push(next);
        }
        out
    }

    /// Iterates `J` until the interval sequence repeats exactly or `max_steps`
    /// images have been taken.
    pub fn interval_orbit(&self, j: &Interval, max_steps: usize) -> IntervalOrbit {
        let mut seen: HashMap<Interval, usize> = HashMap::new();
        let mut seq = vec![j.clone()];
        seen.insert(j.clone(), 0);
        for n in 1..=max_steps {
            let next = self.image_interval(&seq[n - 1]);
            if let Some(&first) = seen.get(&next) {
                return IntervalOrbit { seq, cycle: Some((first, n - first)) };
            }
            seen.insert(next.clone(), n);
            seq.push(next);
        }
        IntervalOrbit { seq, cycle: None }
    }

    /// `[x, f(x), …, f^n(x)]`. Once a value repeats, the rest is copied from
    /// the cycle.
    pub fn orbit(&self, x: &Rational, n: usize) -> Vec<Rational> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(x.clone());
        let mut seen: HashMap<Rational, usize> = HashMap::new();
        seen.insert(x.clone(), 0);
        while out.len() <= n {
            let next = self.eval_unchecked(out.last().unwrap());
            if let Some(&first) = seen.get(&next) {
                let period = out.len() - first;
                while out.len() <= n {
                    let k = first + (out.len() - first) % period;
                    out.push(out[k].clone());
                }
                break;
            }
            seen.insert(next.clone(), out.len());
            out.push(next);
        }
        out
    }

    /// Full preimage of `y`: points from monotone segments, whole segments
    /// from flat pieces at level `y`. `None` when `y` has no preimage.
    pub fn preimage_point(&self, y: &Rational) -> Option<CompactSet> {
        let mut parts = Vec::new();
        for w in self.nodes.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if y0 == y1 {
                if y0 == y {
                    parts.push(Interval::new_unchecked(x0.clone(), x1.clone()));
                }
                continue;
            }
            let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
            if lo <= y && y <= hi {
                let x = x0 + (y - y0) * (x1 - x0) / (y1 - y0);
                parts.push(Interval::new_unchecked(x.clone(), x));
            }
        }
        CompactSet::from_parts(parts).ok()
    }

    /// Leftmost `p ∈ J` with `f(p) = y`.
    pub fn preimage_in(&self, y: &Rational, j: &Interval) -> Option<Rational> {
        let pre = self.preimage_point(y)?;
        pre.parts().iter().find_map(|p| p.intersection(j).map(|q| q.lo().clone()))
    }

    /// Leftmost `p ∈ J` with `f^n(p) = y`.
    ///
    /// Descends one step at a time: among the monotone pieces of the current
    /// interval, the leftmost piece whose `n`-th image still contains `y` is
    /// kept, and the search continues in its image. The containment test is
    /// exact, so no backtracking is needed.
    pub fn preimage_iter(&self, n: usize, y: &Rational, j: &Interval) -> Option<Rational> {
        if !self.reaches(j, n, y) {
            return None;
        }
        let mut chosen: Vec<(usize, Interval, Side)> = Vec::with_capacity(n);
        let mut current = j.clone();
        let mut side = Side::Left;
        for level in 0..n {
            let remaining = n - level - 1;
            let mut pieces = self.monotone_pieces(&current);
            if side == Side::Right {
                pieces.reverse();
            }
            let mut picked = None;
            for (seg, piece) in pieces {
                let img = self.image_interval(&piece);
                if self.reaches(&img, remaining, y) {
                    picked = Some((seg, piece, img));
                    break;
                }
            }
            let (seg, piece, img) = picked?;
            let slope_sign = self.segment_slope_sign(seg);
            chosen.push((seg, piece, side));
            if slope_sign < 0 {
                side = side.flip();
            }
            current = img;
        }
        let mut q = y.clone();
        for (seg, piece, side) in chosen.into_iter().rev() {
            q = self.invert_on_segment(seg, &piece, &q, side);
        }
        Some(q)
    }

    /// `y ∈ f^n(J)`, stopping early once the interval sequence is stationary.
    fn reaches(&self, j: &Interval, n: usize, y: &Rational) -> bool {
        let mut cur = j.clone();
        for _ in 0..n {
            let next = self.image_interval(&cur);
            if next == cur {
                break;
            }
            cur = next;
        }
        cur.contains(y)
    }

    fn monotone_pieces(&self, j: &Interval) -> Vec<(usize, Interval)> {
        let first = self.segment_of(j.lo());
        if j.is_degenerate() {
            return vec![(first, j.clone())];
        }
        let mut out = Vec::new();
        let mut lo = j.lo().clone();
        let mut seg = first;
        loop {
            let seg_hi = &self.nodes[seg + 1].0;
            if seg_hi >= j.hi() {
                out.push((seg, Interval::new_unchecked(lo, j.hi().clone())));
                break;
            }
            out.push((seg, Interval::new_unchecked(lo, seg_hi.clone())));
            lo = seg_hi.clone();
            seg += 1;
        }
        out
    }

    fn segment_slope_sign(&self, seg: usize) -> i8 {
        let d = &self.nodes[seg + 1].1 - &self.nodes[seg].1;
        if d.is_positive() {
            1
        } else if d.is_negative() {
            -1
        } else {
            0
        }
    }

    fn invert_on_segment(&self, seg: usize, piece: &Interval, y: &Rational, side: Side) -> Rational {
        let (x0, y0) = &self.nodes[seg];
        let (x1, y1) = &self.nodes[seg + 1];
        if y0 == y1 {
            return match side {
                Side::Left => piece.lo().clone(),
                Side::Right => piece.hi().clone(),
            };
        }
        x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    }

    /// `{x : f(x) = x}`; diagonal segments contribute whole intervals.
    pub fn fixed_points(&self) -> CompactSet {
        let mut parts = Vec::new();
        for w in self.nodes.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            let g0 = y0 - x0;
            let g1 = y1 - x1;
            if g0.is_zero() && g1.is_zero() {
                parts.push(Interval::new_unchecked(x0.clone(), x1.clone()));
            } else if g0.is_zero() {
                parts.push(Interval::new_unchecked(x0.clone(), x0.clone()));
            } else if g1.is_zero() {
                parts.push(Interval::new_unchecked(x1.clone(), x1.clone()));
            } else if g0.is_positive() != g1.is_positive() {
                let x = x0 + &g0 * (x1 - x0) / (&g0 - &g1);
                parts.push(Interval::new_unchecked(x.clone(), x));
            }
        }
        CompactSet::from_parts(parts).expect("a continuous self-map of [0, 1] has a fixed point")
    }

    /// `self ∘ inner`, with collinear nodes removed.
    pub fn compose(&self, inner: &PLMap) -> PLMap {
        let mut xs: Vec<Rational> = inner.nodes.iter().map(|(x, _)| x.clone()).collect();
        for (x, _) in &self.nodes {
            if let Some(pre) = inner.preimage_point(x) {
                for p in pre.parts() {
                    xs.push(p.lo().clone());
                    xs.push(p.hi().clone());
                }
            }
        }
        xs.sort();
        xs.dedup();
        let nodes = xs
            .into_iter()
            .map(|x| {
                let y = self.eval_unchecked(&inner.eval_unchecked(&x));
                (x, y)
            })
            .collect();
        PLMap { nodes: simplify(nodes) }
    }

    pub fn square(&self) -> PLMap {
        self.compose(self)
    }

    /// Lipschitz constant: the largest absolute slope.
    pub fn max_abs_slope(&self) -> Rational {
        self.nodes.windows(2).map(|w| ((&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0)).abs()).max().unwrap_or_else(zero)
    }
}

fn simplify(nodes: Vec<(Rational, Rational)>) -> Vec<(Rational, Rational)> {
    let mut out: Vec<(Rational, Rational)> = Vec::with_capacity(nodes.len());
    for node in nodes {
        if out.len() >= 2 {
            let (xa, ya) = &out[out.len() - 2];
            let (xb, yb) = &out[out.len() - 1];
            let collinear = (yb - ya) * (&node.0 - xb) == (&node.1 - yb) * (xb - xa);
            if collinear {
                out.pop();
            }
        }
        out.push(node);
    }
    out
}

impl fmt::Display for PLMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.nodes.iter().map(|(x, y)| format!("({}, {})", fmt_rational(x), fmt_rational(y))).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The exact interval sequence `J, f(J), …` up to the first repeat.
#[derive(Clone, Debug)]
pub struct IntervalOrbit {
    pub seq: Vec<Interval>,
    /// `(start, period)` once `seq[start..]` is known to repeat forever.
    pub cycle: Option<(usize, usize)>,
}

impl IntervalOrbit {
    pub fn cycle_members(&self) -> Option<&[Interval]> {
        self.cycle.map(|(s, p)| &self.seq[s..s + p])
    }

    /// `f^n(J)` for any `n`, using the cycle when the stored prefix is too short.
    pub fn at(&self, n: usize) -> Option<&Interval> {
        if n < self.seq.len() {
            return self.seq.get(n);
        }
        let (s, p) = self.cycle?;
        Some(&self.seq[s + (n - s) % p])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::dyadic;

    fn iv(a: Rational, b: Rational) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn points(set: &CompactSet) -> Vec<Rational> {
        set.parts().iter().map(|p| p.lo().clone()).collect()
    }

    #[test]
    fn new_reports_first_violation() {
        let err = PLMap::new(vec![(zero(), zero()), (rat(1, 2), rat(3, 2)), (one(), zero())]).unwrap_err();
        assert_eq!(err, Error::InvalidMap { index: 1, reason: "y = 3/2 outside [0, 1]".into() });
        let err =
            PLMap::new(vec![(zero(), zero()), (rat(1, 2), one()), (rat(1, 2), zero()), (one(), one())]).unwrap_err();
        assert!(matches!(err, Error::InvalidMap { index: 2, .. }));
        let err = PLMap::new(vec![(rat(1, 4), zero()), (one(), one())]).unwrap_err();
        assert!(matches!(err, Error::InvalidMap { index: 0, .. }));
        let err = PLMap::new(vec![(zero(), zero()), (rat(3, 4), one())]).unwrap_err();
        assert!(matches!(err, Error::InvalidMap { index: 1, .. }));
    }

    #[test]
    fn eval_examples() {
        let s = PLMap::snoha(1);
        assert_eq!(s.eval(&rat(1, 4)).unwrap(), one());
        assert_eq!(s.eval(&zero()).unwrap(), zero());
        assert_eq!(s.eval(&rat(1, 8)).unwrap(), rat(1, 2));
        assert!(s.eval(&rat(3, 2)).is_err());
        assert!(s.eval(&rat(-1, 2)).is_err());
        assert_eq!(PLMap::tent().eval(&rat(1, 2)).unwrap(), one());
        assert_eq!(PLMap::identity().eval(&rat(1, 3)).unwrap(), rat(1, 3));
    }

    #[test]
    fn image_examples() {
        let t = PLMap::tent();
        assert_eq!(t.image_interval(&Interval::unit()), Interval::unit());
        assert_eq!(t.image_interval(&iv(zero(), rat(1, 4))), iv(zero(), rat(1, 2)));
        assert_eq!(t.image_interval(&iv(rat(1, 4), rat(3, 4))), iv(rat(1, 2), one()));
        let p = iv(rat(1, 3), rat(1, 3));
        assert_eq!(t.image_interval(&p), iv(rat(2, 3), rat(2, 3)));
    }

    #[test]
    fn iterate_examples() {
        let t = PLMap::tent();
        let j = iv(zero(), rat(1, 8));
        assert_eq!(t.iterate_interval(&j, 0), vec![j.clone()]);
        assert_eq!(
            t.iterate_interval(&j, 3),
            vec![j.clone(), iv(zero(), rat(1, 4)), iv(zero(), rat(1, 2)), Interval::unit()]
        );
        let id = PLMap::identity();
        let k = iv(rat(1, 5), rat(2, 7));
        assert_eq!(id.iterate_interval(&k, 5), vec![k.clone(); 6]);
    }

    #[test]
    fn preimage_examples() {
        let t = PLMap::tent();
        assert_eq!(points(&t.preimage_point(&rat(1, 2)).unwrap()), vec![rat(1, 4), rat(3, 4)]);
        assert_eq!(points(&t.preimage_point(&one()).unwrap()), vec![rat(1, 2)]);
        assert_eq!(points(&PLMap::identity().preimage_point(&rat(1, 3)).unwrap()), vec![rat(1, 3)]);
        let flat =
            PLMap::new(vec![(zero(), zero()), (rat(1, 4), rat(1, 2)), (rat(3, 4), rat(1, 2)), (one(), one())]).unwrap();
        let pre = flat.preimage_point(&rat(1, 2)).unwrap();
        assert_eq!(pre.parts(), &[iv(rat(1, 4), rat(3, 4))]);
        assert!(flat.preimage_point(&zero()).is_some());
        let low = PLMap::new(vec![(zero(), zero()), (one(), rat(1, 2))]).unwrap();
        assert!(low.preimage_point(&one()).is_none());
    }

    #[test]
    fn preimage_in_examples() {
        let t = PLMap::tent();
        assert_eq!(t.preimage_in(&rat(1, 2), &iv(rat(1, 2), one())), Some(rat(3, 4)));
        assert_eq!(t.preimage_in(&rat(1, 2), &Interval::unit()), Some(rat(1, 4)));
        assert_eq!(t.preimage_in(&one(), &iv(zero(), rat(1, 4))), None);
    }

    #[test]
    fn preimage_iter_is_leftmost() {
        let t = PLMap::tent();
        // f^2(x) = 1/2 has solutions 1/8, 3/8, 5/8, 7/8.
        assert_eq!(t.preimage_iter(2, &rat(1, 2), &Interval::unit()), Some(rat(1, 8)));
        assert_eq!(t.preimage_iter(2, &rat(1, 2), &iv(rat(1, 4), one())), Some(rat(3, 8)));
        assert_eq!(t.preimage_iter(2, &rat(1, 2), &iv(rat(2, 5), one())), Some(rat(5, 8)));
        assert_eq!(t.preimage_iter(0, &rat(1, 3), &iv(zero(), rat(1, 2))), Some(rat(1, 3)));
        assert_eq!(t.preimage_iter(3, &rat(1, 2), &iv(zero(), dyadic(6))), None);
        let p = t.preimage_iter(40, &rat(1, 3), &iv(rat(1, 5), rat(1, 4))).unwrap();
        assert!(iv(rat(1, 5), rat(1, 4)).contains(&p));
        assert_eq!(t.orbit(&p, 40)[40], rat(1, 3));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(points(&PLMap::tent().fixed_points()), vec![zero(), rat(2, 3)]);
        assert_eq!(PLMap::identity().fixed_points().parts(), &[Interval::unit()]);
        // Each decreasing lap [b_i, c_i] crosses the diagonal at (1 + 4 b_i) / 5.
        let fp = PLMap::snoha(2).fixed_points();
        let expect = vec![
            iv(zero(), zero()),
            iv(rat(2, 5), rat(2, 5)),
            iv(rat(2, 3), rat(2, 3)),
            iv(rat(4, 5), rat(4, 5)),
            iv(rat(8, 9), rat(8, 9)),
            iv(rat(14, 15), rat(14, 15)),
            iv(rat(26, 27), one()),
        ];
        assert_eq!(fp.parts(), expect.as_slice());
    }

    #[test]
    fn snoha_nodes() {
        let s0 = PLMap::snoha(0);
        assert_eq!(
            s0.nodes(),
            &[(zero(), zero()), (rat(1, 4), one()), (rat(1, 2), zero()), (rat(2, 3), rat(2, 3)), (one(), one())]
        );
        assert_eq!(s0.eval(&rat(1, 2)).unwrap(), zero());
        let s1 = PLMap::snoha(1);
        for node in [(rat(2, 3), rat(2, 3)), (rat(3, 4), one()), (rat(5, 6), rat(2, 3)), (rat(8, 9), rat(8, 9))] {
            assert!(s1.nodes().contains(&node));
        }
        assert_eq!(s1.eval(&rat(17, 18)).unwrap(), rat(17, 18));
    }

    #[test]
    fn compose_and_square() {
        let sq = PLMap::flip().square();
        assert_eq!(sq, PLMap::identity());
        let t2 = PLMap::tent().square();
        assert_eq!(t2.nodes().len(), 5);
        assert_eq!(t2.eval(&rat(1, 4)).unwrap(), one());
        assert_eq!(t2.eval(&rat(1, 2)).unwrap(), zero());
        for k in 0..=16 {
            let x = rat(k, 16);
            assert_eq!(t2.eval(&x).unwrap(), PLMap::tent().orbit(&x, 2)[2]);
        }
    }

    #[test]
    fn interval_orbit_detects_cycles() {
        let o = PLMap::flip().interval_orbit(&iv(zero(), rat(1, 4)), 10);
        assert_eq!(o.cycle, Some((0, 2)));
        assert_eq!(o.at(7), Some(&iv(rat(3, 4), one())));
        let o = PLMap::tent().interval_orbit(&iv(zero(), rat(1, 8)), 10);
        assert_eq!(o.cycle, Some((3, 1)));
    }

    #[test]
    fn slopes() {
        assert_eq!(PLMap::tent().max_abs_slope(), rat(2, 1));
        assert_eq!(PLMap::snoha(3).max_abs_slope(), rat(4, 1));
    }
}
