use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::rational::{fmt_rational, max_of, min_of, one, parse_rational, zero, Rational};

/// A closed interval `[lo, hi] ⊆ [0, 1]` with rational endpoints.
///
/// Degenerate intervals (`lo == hi`) stand for points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        if lo > hi {
            return domain(format!("interval endpoints out of order: {} > {}", fmt_rational(&lo), fmt_rational(&hi)));
        }
        if lo < zero() || hi > one() {
            return domain(format!("interval [{}, {}] leaves [0, 1]", fmt_rational(&lo), fmt_rational(&hi)));
        }
        Ok(Interval { lo, hi })
    }

    /// Caller guarantees `0 <= lo <= hi <= 1`.
    pub(crate) fn new_unchecked(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi && lo >= zero() && hi <= one());
        Interval { lo, hi }
    }

    pub fn point(x: Rational) -> Result<Self> {
        Interval::new(x.clone(), x)
    }

    pub fn unit() -> Self {
        Interval { lo: zero(), hi: one() }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn diameter(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Rational {
        crate::rational::midpoint(&self.lo, &self.hi)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Meets the open interior of `self`. Always false for a degenerate `self`.
    pub fn meets_interior_of(&self, t: &Interval) -> bool {
        !t.is_degenerate() && self.lo < t.hi && self.hi > t.lo
    }

    pub fn intersection(&self, other: &Interval) -> Option<Interval> {
        let lo = max_of(&self.lo, &other.lo).clone();
        let hi = min_of(&self.hi, &other.hi).clone();
        (lo <= hi).then(|| Interval::new_unchecked(lo, hi))
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new_unchecked(min_of(&self.lo, &other.lo).clone(), max_of(&self.hi, &other.hi).clone())
    }

    /// Gap between the two intervals; zero when they overlap.
    pub fn distance(&self, other: &Interval) -> Rational {
        let a = &other.lo - &self.hi;
        let b = &self.lo - &other.hi;
        let d = max_of(&a, &b).clone();
        if d > zero() {
            d
        } else {
            zero()
        }
    }

    pub fn distance_to_point(&self, x: &Rational) -> Rational {
        if x < &self.lo {
            &self.lo - x
        } else if x > &self.hi {
            x - &self.hi
        } else {
            zero()
        }
    }

    /// Nearest point of the interval to `x`.
    pub fn clamp(&self, x: &Rational) -> Rational {
        if x < &self.lo {
            self.lo.clone()
        } else if x > &self.hi {
            self.hi.clone()
        } else {
            x.clone()
        }
    }

    /// The point `lo + t * (hi - lo)`.
    pub fn at_fraction(&self, t: &Rational) -> Rational {
        &self.lo + t * self.diameter()
    }

    /// `[lo + f*w, hi - f*w]` for a fraction `0 <= f <= 1/2`.
    pub fn shrink(&self, f: &Rational) -> Interval {
        let w = self.diameter() * f;
        Interval::new_unchecked(&self.lo + &w, &self.hi - &w)
    }

    /// Splits into `n` closed pieces of equal width.
    pub fn subdivide(&self, n: usize) -> Vec<Interval> {
        let n_r = crate::rational::int(n as i64);
        let w = self.diameter() / &n_r;
        (0..n)
            .map(|i| {
                let lo = &self.lo + &w * crate::rational::int(i as i64);
                let hi = if i + 1 == n { self.hi.clone() } else { &lo + &w };
                Interval::new_unchecked(lo, hi)
            })
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_degenerate() {
            write!(f, "{}", fmt_rational(&self.lo))
        } else {
            write!(f, "{}..{}", fmt_rational(&self.lo), fmt_rational(&self.hi))
        }
    }
}

impl std::str::FromStr for Interval {
    type Err = crate::error::Error;

    /// `p/q..r/s` or a single point `p/q`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once("..") {
            Some((a, b)) => Interval::new(parse_rational(a)?, parse_rational(b)?),
            None => Interval::point(parse_rational(s)?),
        }
    }
}

impl Serialize for Interval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
