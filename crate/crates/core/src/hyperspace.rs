//! Non-empty compact subsets of `[0, 1]` represented as finite unions of
//! closed rational intervals.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::interval::Interval;
use crate::pair_class::OrbitStats;
use crate::pl_map::PLMap;
use crate::rational::{fmt_rational, max_of, min_of, one, parse_rational, zero, Rational};

/// Canonical form: sorted, pairwise disjoint, touching parts merged.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompactSet {
    parts: Vec<Interval>,
}

impl CompactSet {
    pub fn from_parts(mut parts: Vec<Interval>) -> Result<Self> {
        if parts.is_empty() {
            return domain("a compact set must be non-empty");
        }
        parts.sort();
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for p in parts {
            match merged.last_mut() {
                Some(last) if p.lo() <= last.hi() => {
                    if p.hi() > last.hi() {
                        *last = Interval::new_unchecked(last.lo().clone(), p.hi().clone());
                    }
                }
                _ => merged.push(p),
            }
        }
        Ok(CompactSet { parts: merged })
    }

    pub fn interval(j: Interval) -> Self {
        CompactSet { parts: vec![j] }
    }

    pub fn point(x: Rational) -> Result<Self> {
        Ok(CompactSet::interval(Interval::point(x)?))
    }

    pub fn points(xs: &[Rational]) -> Result<Self> {
        let parts = xs.iter().map(|x| Interval::point(x.clone())).collect::<Result<Vec<_>>>()?;
        CompactSet::from_parts(parts)
    }

    pub fn unit() -> Self {
        CompactSet::interval(Interval::unit())
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn min(&self) -> &Rational {
        self.parts[0].lo()
    }

    pub fn max(&self) -> &Rational {
        self.parts[self.parts.len() - 1].hi()
    }

    pub fn hull(&self) -> Interval {
        Interval::new_unchecked(self.min().clone(), self.max().clone())
    }

    pub fn diameter(&self) -> Rational {
        self.max() - self.min()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let i = self.parts.partition_point(|p| p.hi() < x);
        i < self.parts.len() && self.parts[i].contains(x)
    }

    /// `other ⊆ self`.
    pub fn contains_set(&self, other: &CompactSet) -> bool {
        other.parts.iter().all(|q| self.parts.iter().any(|p| p.contains_interval(q)))
    }

    pub fn union(&self, other: &CompactSet) -> CompactSet {
        let mut parts = self.parts.clone();
        parts.extend(other.parts.iter().cloned());
        CompactSet::from_parts(parts).expect("union of non-empty sets")
    }

    /// `dist(x, self)`.
    pub fn distance_to_point(&self, x: &Rational) -> Rational {
        let i = self.parts.partition_point(|p| p.hi() < x);
        let mut best: Option<Rational> = None;
        for j in [i.checked_sub(1), Some(i)].into_iter().flatten() {
            if let Some(p) = self.parts.get(j) {
                let d = p.distance_to_point(x);
                best = Some(match best {
                    Some(b) if b <= d => b,
                    _ => d,
                });
            }
        }
        best.expect("non-empty set")
    }

    /// Open gaps between consecutive parts.
    pub fn gaps(&self) -> impl Iterator<Item = (&Rational, &Rational)> {
        self.parts.windows(2).map(|w| (w[0].hi(), w[1].lo()))
    }
}

impl fmt::Display for CompactSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for CompactSet {
    type Err = Error;

    /// Semicolon-separated `p/q..r/s` intervals and `p/q` points.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(Interval::from_str)
            .collect::<Result<Vec<_>>>()?;
        if parts.is_empty() {
            return Err(Error::Parse(format!("empty compact set {s:?}")));
        }
        CompactSet::from_parts(parts)
    }
}

impl Serialize for CompactSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An open interval `(lo, hi)` of the line, read inside `[0, 1]`. Endpoints
/// beyond `[0, 1]` give half-open sets at `0` or `1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpenInterval {
    lo: Rational,
    hi: Rational,
}

impl OpenInterval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo >= hi {
            return domain(format!("empty open interval ({}, {})", fmt_rational(&lo), fmt_rational(&hi)));
        }
        if lo >= one() || hi <= zero() {
            return domain(format!("open interval ({}, {}) misses [0, 1]", fmt_rational(&lo), fmt_rational(&hi)));
        }
        Ok(OpenInterval { lo, hi })
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// Contains the closed interval `j`.
    pub fn covers(&self, j: &Interval) -> bool {
        &self.lo < j.lo() && j.hi() < &self.hi
    }

    pub fn meets(&self, j: &Interval) -> bool {
        j.lo() < &self.hi && &self.lo < j.hi()
    }

    /// The trace on `[0, 1]` as a closed hull, shrunk by `frac` of its width on
    /// each side so that it lies strictly inside the open set.
    pub fn inner(&self, frac: &Rational) -> Interval {
        let lo = max_of(&self.lo, &zero()).clone();
        let hi = min_of(&self.hi, &one()).clone();
        let w = (&hi - &lo) * frac;
        Interval::new_unchecked(lo + &w, hi - w)
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", fmt_rational(&self.lo), fmt_rational(&self.hi))
    }
}

/// A basic open set `⟨U_1, …, U_n⟩` of the Vietoris topology.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VietorisBox {
    opens: Vec<OpenInterval>,
}

impl VietorisBox {
    pub fn new(opens: Vec<OpenInterval>) -> Result<Self> {
        if opens.is_empty() {
            return domain("a Vietoris box needs at least one open set");
        }
        Ok(VietorisBox { opens })
    }

    pub fn opens(&self) -> &[OpenInterval] {
        &self.opens
    }

    /// Connected components of the union of the opens, as open intervals.
    fn union_components(&self) -> Vec<(Rational, Rational)> {
        let mut sorted: Vec<&OpenInterval> = self.opens.iter().collect();
        sorted.sort_by(|a, b| a.lo.cmp(&b.lo));
        let mut out: Vec<(Rational, Rational)> = Vec::new();
        for o in sorted {
            match out.last_mut() {
                Some((_, hi)) if &o.lo < hi => {
                    if &o.hi > hi {
                        *hi = o.hi.clone();
                    }
                }
                _ => out.push((o.lo.clone(), o.hi.clone())),
            }
        }
        out
    }
}

impl fmt::Display for VietorisBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.opens.iter().map(|o| o.to_string()).collect();
        write!(f, "{}", parts.join(";"))
    }
}

impl FromStr for VietorisBox {
    type Err = Error;

    /// `(lo,hi);(lo,hi);…`
    fn from_str(s: &str) -> Result<Self> {
        let mut opens = Vec::new();
        for tok in s.split(';').map(str::trim).filter(|t| !t.is_empty()) {
            let inner = tok
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("expected (lo,hi), got {tok:?}")))?;
            let (a, b) = inner.split_once(',').ok_or_else(|| Error::Parse(format!("expected (lo,hi), got {tok:?}")))?;
            opens.push(OpenInterval::new(parse_rational(a)?, parse_rational(b)?)?);
        }
        VietorisBox::new(opens)
    }
}

impl Serialize for VietorisBox {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `sup_{x ∈ a} dist(x, b)`.
///
/// `dist(·, b)` is piecewise linear with local maxima only at the midpoints of
/// the gaps of `b`, so its maximum over a part of `a` is attained at an
/// endpoint or at a gap midpoint lying inside the part.
pub fn directed_distance(a: &CompactSet, b: &CompactSet) -> Rational {
    let mids: Vec<Rational> = b.gaps().map(|(l, h)| crate::rational::midpoint(l, h)).collect();
    let mut best = zero();
    let mut consider = |x: &Rational| {
        let d = b.distance_to_point(x);
        if d > best {
            best = d;
        }
    };
    for p in a.parts() {
        consider(p.lo());
        consider(p.hi());
        let start = mids.partition_point(|m| m < p.lo());
        for m in mids[start..].iter().take_while(|m| *m <= p.hi()) {
            consider(m);
        }
    }
    best
}

pub fn hausdorff_distance(a: &CompactSet, b: &CompactSet) -> Rational {
    if a == b {
        return zero();
    }
    let ab = directed_distance(a, b);
    let ba = directed_distance(b, a);
    if ab >= ba {
        ab
    } else {
        ba
    }
}

/// Closure of `N(a, eps)` inside `[0, 1]`.
pub fn eps_neighborhood(a: &CompactSet, eps: &Rational) -> Result<CompactSet> {
    if eps <= &zero() {
        return domain(format!("neighbourhood radius must be positive, got {}", fmt_rational(eps)));
    }
    let parts = a
        .parts()
        .iter()
        .map(|p| {
            let lo = p.lo() - eps;
            let hi = p.hi() + eps;
            Interval::new_unchecked(max_of(&lo, &zero()).clone(), min_of(&hi, &one()).clone())
        })
        .collect();
    CompactSet::from_parts(parts)
}

/// `f̄(a) = f(a)`.
pub fn induced_image(m: &PLMap, a: &CompactSet) -> CompactSet {
    let parts = a.parts().iter().map(|p| m.image_interval(p)).collect();
    CompactSet::from_parts(parts).expect("image of a non-empty set")
}

/// `[a, f̄(a), …, f̄^n(a)]`.
pub fn induced_orbit(m: &PLMap, a: &CompactSet, n: usize) -> Vec<CompactSet> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(a.clone());
    for _ in 0..n {
        let next = induced_image(m, out.last().unwrap());
        out.push(next);
    }
    out
}

/// `a ∈ ⟨U_1, …, U_n⟩`: `a` lies in the union and meets every `U_i`.
pub fn vietoris_member(a: &CompactSet, b: &VietorisBox) -> bool {
    let comps = b.union_components();
    let covered = a.parts().iter().all(|p| comps.iter().any(|(lo, hi)| lo < p.lo() && p.hi() < hi));
    covered && b.opens().iter().all(|o| a.parts().iter().any(|p| o.meets(p)))
}

/// `d_H(f̄^n(a), f̄^n(b))` for `n = 0..=horizon`, tail from `horizon / 2`.
pub fn hausdorff_orbit_stats(m: &PLMap, a: &CompactSet, b: &CompactSet, horizon: usize) -> Result<OrbitStats> {
    hausdorff_orbit_stats_from(m, a, b, horizon, horizon / 2)
}

pub fn hausdorff_orbit_stats_from(
    m: &PLMap,
    a: &CompactSet,
    b: &CompactSet,
    horizon: usize,
    tail_start: usize,
) -> Result<OrbitStats> {
    if horizon == 0 {
        return domain("horizon must be at least 1");
    }
    let mut x = a.clone();
    let mut y = b.clone();
    let mut distances = Vec::with_capacity(horizon + 1);
    distances.push(hausdorff_distance(&x, &y));
    for _ in 0..horizon {
        x = induced_image(m, &x);
        y = induced_image(m, &y);
        distances.push(hausdorff_distance(&x, &y));
    }
    OrbitStats::new(distances, tail_start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn cs(s: &str) -> CompactSet {
        s.parse().unwrap()
    }

    fn vb(s: &str) -> VietorisBox {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form() {
        let a = cs("1/2..3/4;0..1/4;1/4..1/3;1");
        assert_eq!(a.to_string(), "0/1..1/3;1/2..3/4;1/1");
        assert!("".parse::<CompactSet>().is_err());
        assert!(CompactSet::from_parts(vec![]).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff_distance(&cs("0..1"), &cs("0..1")), zero());
        assert_eq!(hausdorff_distance(&cs("0"), &cs("1")), one());
        assert_eq!(hausdorff_distance(&cs("0..1/2"), &cs("1/4..3/4")), rat(1, 4));
        // The midpoint of the gap (0, 1) of b is the farthest point of a.
        assert_eq!(hausdorff_distance(&cs("0..1"), &cs("0;1")), rat(1, 2));
    }

    #[test]
    fn neighborhood_examples() {
        assert_eq!(eps_neighborhood(&cs("1/2"), &rat(1, 4)).unwrap(), cs("1/4..3/4"));
        assert_eq!(eps_neighborhood(&cs("0..1"), &rat(3, 1)).unwrap(), cs("0..1"));
        assert_eq!(eps_neighborhood(&cs("0;1"), &rat(1, 8)).unwrap(), cs("0..1/8;7/8..1"));
        assert!(eps_neighborhood(&cs("0"), &zero()).is_err());
    }

    #[test]
    fn induced_examples() {
        let t = PLMap::tent();
        let a = cs("0..1/4;1");
        assert_eq!(induced_image(&PLMap::identity(), &a), a);
        assert_eq!(induced_image(&t, &a), cs("0..1/2"));
        assert_eq!(induced_image(&t, &cs("1/4;3/4")), cs("1/2"));
        let orbit = induced_orbit(&t, &cs("1/8"), 3);
        assert_eq!(orbit, vec![cs("1/8"), cs("1/4"), cs("1/2"), cs("1")]);
        assert_eq!(induced_orbit(&t, &a, 0), vec![a.clone()]);
        assert_eq!(induced_orbit(&PLMap::identity(), &a, 4), vec![a; 5]);
    }

    #[test]
    fn vietoris_examples() {
        let b = vb("(-1/10,1/2);(1/2,11/10)");
        assert!(vietoris_member(&cs("0;1"), &b));
        assert!(!vietoris_member(&cs("0"), &b));
        assert!(!vietoris_member(&cs("0;1/2;1"), &b));
        let c = vb("(0,1/2);(1/4,1)");
        assert!(vietoris_member(&cs("3/8"), &c));
        assert!(!vietoris_member(&cs("1/2"), &c));
        assert!(!vietoris_member(&cs("0..1/8"), &c));
        assert!("(1/2,1/4)".parse::<VietorisBox>().is_err());
        assert!("(1,2)".parse::<VietorisBox>().is_err());
    }

    #[test]
    fn orbit_stats_examples() {
        let t = PLMap::tent();
        let a = cs("0..1/3;1/2");
        let same = hausdorff_orbit_stats(&t, &a, &a, 8).unwrap();
        assert!(same.distances.iter().all(|d| d == &zero()));
        let id = hausdorff_orbit_stats(&PLMap::identity(), &cs("0"), &cs("1"), 8).unwrap();
        assert!(id.distances.iter().all(|d| d == &one()));
        let s = hausdorff_orbit_stats(&t, &cs("1/4"), &cs("3/4"), 3).unwrap();
        assert_eq!(s.distances, vec![rat(1, 2), zero(), zero(), zero()]);
        assert!(hausdorff_orbit_stats(&t, &a, &a, 0).is_err());
    }
}
