//! Eventually-one binary sequences under the shift, with the metric
//! `d(x, y) = max{1/i : x_i ≠ y_i}`.
//!
//! Only sequences with finitely many zeros are represented, stored by their
//! zero positions (1-based). The subsystem `A` of sequences with at most one
//! zero is asymptotic pairwise, yet `{1^∞}` and the set `N` of
//! `1^{n_i} 0 1^∞` with `n_0 = 0`, `n_{i+1} = n_i + i + 2` are kept apart by
//! the induced map infinitely often.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{domain, Result};
use crate::rational::{int, one, rat, serde_rat, zero, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySeq {
    zeros: Vec<u64>,
}

impl BinarySeq {
    pub fn ones() -> Self {
        BinarySeq { zeros: Vec::new() }
    }

    /// Positions must be positive and strictly increasing.
    pub fn from_zeros(zeros: Vec<u64>) -> Result<Self> {
        if zeros.first() == Some(&0) {
            return domain("zero positions start at 1");
        }
        if zeros.windows(2).any(|w| w[0] >= w[1]) {
            return domain("zero positions must be strictly increasing");
        }
        Ok(BinarySeq { zeros })
    }

    /// `1^n 0 1^∞`.
    pub fn single_zero_after(n: u64) -> Self {
        BinarySeq { zeros: vec![n + 1] }
    }

    pub fn zeros(&self) -> &[u64] {
        &self.zeros
    }

    /// Member of `A`: at most one zero.
    pub fn in_a(&self) -> bool {
        self.zeros.len() <= 1
    }

    /// Symbol at 1-based index `i`.
    pub fn symbol(&self, i: u64) -> u8 {
        if self.zeros.binary_search(&i).is_ok() {
            0
        } else {
            1
        }
    }

    pub fn shift(&self) -> Self {
        BinarySeq { zeros: self.zeros.iter().filter(|&&p| p > 1).map(|p| p - 1).collect() }
    }

    pub fn shift_by(&self, t: u64) -> Self {
        BinarySeq { zeros: self.zeros.iter().filter(|&&p| p > t).map(|p| p - t).collect() }
    }

    /// Smallest index where the sequences differ.
    pub fn first_difference(&self, other: &BinarySeq) -> Option<u64> {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.zeros.get(i), other.zeros.get(j)) {
                (None, None) => return None,
                (Some(&a), None) => return Some(a),
                (None, Some(&b)) => return Some(b),
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) => return Some(a.min(b)),
            }
        }
    }
}

pub fn seq_distance(x: &BinarySeq, y: &BinarySeq) -> Rational {
    match x.first_difference(y) {
        None => zero(),
        Some(i) => rat(1, i as i64),
    }
}

impl fmt::Display for BinarySeq {
    /// Tokens such as `1^2 0 1^∞`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut prev = 0;
        let mut toks = Vec::new();
        for &p in &self.zeros {
            let run = p - prev - 1;
            if run > 0 {
                toks.push(format!("1^{run}"));
            }
            toks.push("0".to_string());
            prev = p;
        }
        toks.push("1^∞".to_string());
        write!(f, "{}", toks.join(" "))
    }
}

impl Serialize for BinarySeq {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A non-empty finite set of sequences in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeqSet {
    elements: BTreeSet<BinarySeq>,
}

impl SeqSet {
    pub fn new(elements: impl IntoIterator<Item = BinarySeq>) -> Result<Self> {
        let elements: BTreeSet<BinarySeq> = elements.into_iter().collect();
        if elements.is_empty() {
            return domain("a sequence set must be non-empty");
        }
        Ok(SeqSet { elements })
    }

    pub fn elements(&self) -> impl Iterator<Item = &BinarySeq> {
        self.elements.iter()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn shift(&self) -> Self {
        SeqSet { elements: self.elements.iter().map(BinarySeq::shift).collect() }
    }

    pub fn shift_by(&self, t: u64) -> Self {
        SeqSet { elements: self.elements.iter().map(|x| x.shift_by(t)).collect() }
    }
}

fn directed(a: &SeqSet, b: &SeqSet) -> Rational {
    a.elements().map(|x| b.elements().map(|y| seq_distance(x, y)).min().unwrap()).max().unwrap()
}

pub fn hausdorff_seq(a: &SeqSet, b: &SeqSet) -> Rational {
    let ab = directed(a, b);
    let ba = directed(b, a);
    if ab >= ba {
        ab
    } else {
        ba
    }
}

/// `n_0, …, n_{k-1}` with `n_0 = 0`, `n_{i+1} = n_i + i + 2`.
pub fn n_values(k: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(k);
    let mut n = 0;
    for i in 0..k as u64 {
        out.push(n);
        n += i + 2;
    }
    out
}

/// `{1^{n_i} 0 1^∞ : 0 <= i < k}`.
pub fn build_example_n(k: usize) -> Result<SeqSet> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    SeqSet::new(n_values(k).into_iter().map(BinarySeq::single_zero_after))
}

pub fn build_example_m() -> SeqSet {
    SeqSet::new([BinarySeq::ones()]).unwrap()
}

/// `d_H(σ̄^t M, σ̄^t N)` for the untruncated `N`: `1` at `t = 0`, and
/// `1 / (n_{i+1} + 1 - t)` when `n_i < t <= n_{i+1}`.
pub fn closed_form(t: u64) -> Rational {
    let mut n = 0;
    let mut i = 0;
    while n < t {
        n += i + 2;
        i += 1;
    }
    rat(1, (n + 1 - t) as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftReport {
    pub k: usize,
    pub horizon: u64,
    pub n_values: Vec<u64>,
    #[serde(serialize_with = "serde_rat::vec::serialize")]
    pub series: Vec<Rational>,
    #[serde(serialize_with = "serde_rat::vec::serialize")]
    pub closed_form: Vec<Rational>,
    pub series_matches: bool,
    pub census_size: usize,
    pub census_all_asymptotic: bool,
    #[serde(with = "serde_rat")]
    pub limsup_proxy: Rational,
    /// Values at `t = n_i + 1` inside the window.
    #[serde(serialize_with = "serde_rat::vec::serialize")]
    pub dips: Vec<Rational>,
    pub dips_decreasing: bool,
    pub pass: bool,
}

/// `1^∞` and every single-zero sequence with its zero at position `<= max_pos`.
pub fn census(max_pos: u64) -> Vec<BinarySeq> {
    let mut out = vec![BinarySeq::ones()];
    out.extend((1..=max_pos).map(|p| BinarySeq { zeros: vec![p] }));
    out
}

/// Exact asymptoticity of a pair in `A`: the distance is `0` from the time the
/// last zero has been shifted off.
pub fn census_pair_asymptotic(x: &BinarySeq, y: &BinarySeq) -> bool {
    let last = x.zeros.iter().chain(&y.zeros).copied().max().unwrap_or(0);
    (last..=last + 2).all(|t| seq_distance(&x.shift_by(t), &y.shift_by(t)) == zero())
}

/// Checks the example on the window `0..=horizon`, which must satisfy
/// `horizon <= n_{k-1}`: beyond that the truncated `N` has lost the element
/// that keeps it away from `M`.
pub fn verify_example(k: usize, horizon: u64) -> Result<ShiftReport> {
    if k == 0 {
        return domain("k must be at least 1");
    }
    let ns = n_values(k);
    let last = *ns.last().unwrap();
    if horizon > last {
        return domain(format!(
            "horizon {horizon} exceeds n_{} = {last}; the truncated set would look asymptotic to M",
            k - 1
        ));
    }
    let m = build_example_m();
    let n = build_example_n(k)?;
    let mut series = Vec::with_capacity(horizon as usize + 1);
    let (mut sm, mut sn) = (m, n);
    for t in 0..=horizon {
        if t > 0 {
            sm = sm.shift();
            sn = sn.shift();
        }
        series.push(hausdorff_seq(&sm, &sn));
    }
    let closed: Vec<Rational> = (0..=horizon).map(closed_form).collect();
    let series_matches = series == closed;

    let pool = census(horizon.max(1));
    let census_all_asymptotic = pool.iter().all(|x| pool.iter().all(|y| census_pair_asymptotic(x, y)));

    let limsup_proxy = series.iter().max().unwrap().clone();
    let dips: Vec<Rational> =
        ns.iter().map(|n| n + 1).filter(|&t| t <= horizon).map(|t| series[t as usize].clone()).collect();
    let dips_decreasing = dips.windows(2).all(|w| w[1] < w[0]);
    let pass = series_matches && census_all_asymptotic && limsup_proxy == one() && dips_decreasing;
    Ok(ShiftReport {
        k,
        horizon,
        n_values: ns,
        series,
        closed_form: closed,
        series_matches,
        census_size: pool.len(),
        census_all_asymptotic,
        limsup_proxy,
        dips,
        dips_decreasing,
        pass,
    })
}

/// `1/(i+2)` for the dip after `n_i`.
pub fn dip_value(i: usize) -> Rational {
    one() / int(i as i64 + 2)
}
