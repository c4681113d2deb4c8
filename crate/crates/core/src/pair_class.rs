//! Finite-horizon classification of point pairs and set pairs, and grid scans
//! estimating how densely Li-Yorke pairs occur.
//!
//! `liminf` and `limsup` of the orbit distance are replaced by the minimum and
//! maximum over the tail window `[tail_start, horizon]`. Every verdict carries
//! the numbers it was decided from.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::hyperspace::{hausdorff_orbit_stats_from, vietoris_member, CompactSet, VietorisBox};
use crate::interval::Interval;
use crate::partner::{build_partner, collapse_onto, PartnerWindow};
use crate::pl_map::PLMap;
use crate::rational::{abs_diff, dyadic, fmt_rational, int, rat, serde_rat, to_f64, Rational};

pub const DEFAULT_HORIZON: usize = 512;

/// `2^-20`.
pub fn default_tol_low() -> Rational {
    dyadic(20)
}

/// A distance sequence with its tail extremes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrbitStats {
    #[serde(serialize_with = "serde_rat::vec::serialize")]
    pub distances: Vec<Rational>,
    pub tail_start: usize,
    #[serde(with = "serde_rat")]
    pub tail_min: Rational,
    #[serde(with = "serde_rat")]
    pub tail_max: Rational,
}

impl OrbitStats {
    /// Needs `tail_start < horizon = distances.len() - 1`.
    pub fn new(distances: Vec<Rational>, tail_start: usize) -> Result<Self> {
        if distances.len() < 2 {
            return domain("a distance sequence needs horizon >= 1");
        }
        if tail_start >= distances.len() - 1 {
            return domain(format!("tail_start {tail_start} must be below the horizon {}", distances.len() - 1));
        }
        let tail = &distances[tail_start..];
        let tail_min = tail.iter().min().unwrap().clone();
        let tail_max = tail.iter().max().unwrap().clone();
        Ok(OrbitStats { distances, tail_start, tail_min, tail_max })
    }

    pub fn horizon(&self) -> usize {
        self.distances.len() - 1
    }

    pub fn tail(&self) -> &[Rational] {
        &self.distances[self.tail_start..]
    }
}

/// Horizon, thresholds and tail window shared by every pair test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairParams {
    pub horizon: usize,
    #[serde(with = "serde_rat")]
    pub tol_low: Rational,
    #[serde(with = "serde_rat")]
    pub eps: Rational,
    pub tail_start: usize,
}

impl PairParams {
    /// Requires `horizon >= 1` and `0 < tol_low < eps`; the tail starts at
    /// `horizon / 2`.
    pub fn new(horizon: usize, tol_low: Rational, eps: Rational) -> Result<Self> {
        if horizon == 0 {
            return domain("horizon must be at least 1");
        }
        if tol_low <= int(0) || tol_low >= eps {
            return domain(format!(
                "need 0 < tol_low < eps, got tol_low = {}, eps = {}",
                fmt_rational(&tol_low),
                fmt_rational(&eps)
            ));
        }
        Ok(PairParams { horizon, tol_low, eps, tail_start: horizon / 2 })
    }

    /// Default horizon and `tol_low`; `eps` has no default.
    pub fn with_eps(eps: Rational) -> Result<Self> {
        PairParams::new(DEFAULT_HORIZON, default_tol_low(), eps)
    }

    pub fn with_tail_start(mut self, tail_start: usize) -> Result<Self> {
        if tail_start >= self.horizon {
            return domain(format!("tail_start {tail_start} must be below the horizon {}", self.horizon));
        }
        self.tail_start = tail_start;
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum PairClass {
    Ly,
    EpsLy {
        #[serde(with = "serde_rat")]
        eps: Rational,
    },
    Asymptotic,
    DeltaAsymptotic {
        #[serde(with = "serde_rat")]
        delta: Rational,
    },
    Distal,
    Undetermined,
}

impl PairClass {
    pub fn is_ly(&self) -> bool {
        matches!(self, PairClass::Ly | PairClass::EpsLy { .. })
    }

    pub fn is_eps_ly(&self) -> bool {
        matches!(self, PairClass::EpsLy { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PairClass::Ly => "ly",
            PairClass::EpsLy { .. } => "eps_ly",
            PairClass::Asymptotic => "asymptotic",
            PairClass::DeltaAsymptotic { .. } => "delta_asymptotic",
            PairClass::Distal => "distal",
            PairClass::Undetermined => "undetermined",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            PairClass::EpsLy { .. } => 5,
            PairClass::Ly => 4,
            PairClass::Undetermined => 3,
            PairClass::DeltaAsymptotic { .. } => 2,
            PairClass::Distal => 1,
            PairClass::Asymptotic => 0,
        }
    }
}

impl fmt::Display for PairClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairClass::EpsLy { eps } => write!(f, "eps_ly({})", fmt_rational(eps)),
            PairClass::DeltaAsymptotic { delta } => write!(f, "delta_asymptotic({})", fmt_rational(delta)),
            other => f.write_str(other.name()),
        }
    }
}

/// The class as a pure function of the tail extremes.
pub fn classify_stats(stats: &OrbitStats, tol_low: &Rational, eps: &Rational) -> PairClass {
    let near = &stats.tail_min <= tol_low;
    if near && &stats.tail_max > eps {
        PairClass::EpsLy { eps: eps.clone() }
    } else if near && &stats.tail_max > tol_low {
        PairClass::Ly
    } else if &stats.tail_max <= tol_low {
        PairClass::Asymptotic
    } else if &stats.tail_min > tol_low {
        PairClass::Distal
    } else {
        PairClass::Undetermined
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairVerdict {
    #[serde(flatten)]
    pub class: PairClass,
    pub stats: OrbitStats,
    pub params: PairParams,
}

impl PairVerdict {
    fn from_stats(stats: OrbitStats, params: &PairParams) -> Self {
        let class = classify_stats(&stats, &params.tol_low, &params.eps);
        PairVerdict { class, stats, params: params.clone() }
    }

    /// Relabels a pair whose tail never reaches `delta` as `delta`-asymptotic.
    /// Pairs already asymptotic at `tol_low` keep that finer label.
    pub fn refine_delta(mut self, delta: &Rational) -> Self {
        if self.class != PairClass::Asymptotic && &self.stats.tail_max < delta {
            self.class = PairClass::DeltaAsymptotic { delta: delta.clone() };
        }
        self
    }
}

fn check_point(x: &Rational) -> Result<()> {
    if x < &int(0) || x > &int(1) {
        return domain(format!("point {} outside [0, 1]", fmt_rational(x)));
    }
    Ok(())
}

pub fn point_orbit_stats(
    m: &PLMap,
    x: &Rational,
    y: &Rational,
    horizon: usize,
    tail_start: usize,
) -> Result<OrbitStats> {
    check_point(x)?;
    check_point(y)?;
    let xs = m.orbit(x, horizon);
    let ys = m.orbit(y, horizon);
    let distances = xs.iter().zip(&ys).map(|(a, b)| abs_diff(a, b)).collect();
    OrbitStats::new(distances, tail_start)
}

pub fn classify_point_pair(m: &PLMap, x: &Rational, y: &Rational, params: &PairParams) -> Result<PairVerdict> {
    let stats = point_orbit_stats(m, x, y, params.horizon, params.tail_start)?;
    Ok(PairVerdict::from_stats(stats, params))
}

pub fn classify_set_pair(m: &PLMap, a: &CompactSet, b: &CompactSet, params: &PairParams) -> Result<PairVerdict> {
    let stats = hausdorff_orbit_stats_from(m, a, b, params.horizon, params.tail_start)?;
    Ok(PairVerdict::from_stats(stats, params))
}

/// One classified sample of a scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sample {
    pub left: CompactSet,
    pub right: CompactSet,
    pub origin: &'static str,
    #[serde(flatten)]
    pub class: PairClass,
    #[serde(with = "serde_rat")]
    pub tail_min: Rational,
    #[serde(with = "serde_rat")]
    pub tail_max: Rational,
}

impl Sample {
    fn new(left: CompactSet, right: CompactSet, origin: &'static str, v: &PairVerdict) -> Self {
        Sample {
            left,
            right,
            origin,
            class: v.class.clone(),
            tail_min: v.stats.tail_min.clone(),
            tail_max: v.stats.tail_max.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellReport {
    pub i: usize,
    pub j: usize,
    pub best: Sample,
    pub counts: BTreeMap<&'static str, usize>,
    pub has_ly: bool,
    pub has_eps_ly: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub params: PairParams,
    pub cells: Vec<CellReport>,
    pub class_counts: BTreeMap<&'static str, usize>,
    pub ly_cells: usize,
    pub eps_ly_cells: usize,
    #[serde(with = "serde_rat")]
    pub ly_fraction: Rational,
    #[serde(with = "serde_rat")]
    pub eps_ly_fraction: Rational,
    /// Cells where every sample was asymptotic, distal or undetermined.
    pub no_ly_cells: Vec<(usize, usize)>,
    pub no_eps_ly_cells: Vec<(usize, usize)>,
    /// Samples that could not be produced, with the reason.
    pub infeasible: Vec<String>,
}

impl DensityReport {
    fn assemble(params: &PairParams, cells: Vec<CellReport>, infeasible: Vec<String>) -> Self {
        let mut class_counts = BTreeMap::new();
        for c in &cells {
            for (k, v) in &c.counts {
                *class_counts.entry(*k).or_insert(0) += v;
            }
        }
        let ly_cells = cells.iter().filter(|c| c.has_ly).count();
        let eps_ly_cells = cells.iter().filter(|c| c.has_eps_ly).count();
        let total = cells.len().max(1) as i64;
        DensityReport {
            params: params.clone(),
            ly_fraction: rat(ly_cells as i64, total),
            eps_ly_fraction: rat(eps_ly_cells as i64, total),
            no_ly_cells: cells.iter().filter(|c| !c.has_ly).map(|c| (c.i, c.j)).collect(),
            no_eps_ly_cells: cells.iter().filter(|c| !c.has_eps_ly).map(|c| (c.i, c.j)).collect(),
            class_counts,
            ly_cells,
            eps_ly_cells,
            cells,
            infeasible,
        }
    }

    pub fn all_cells_ly(&self) -> bool {
        !self.cells.is_empty() && self.ly_cells == self.cells.len()
    }

    pub fn all_cells_eps_ly(&self) -> bool {
        !self.cells.is_empty() && self.eps_ly_cells == self.cells.len()
    }

    /// The largest `tail_max` over every best sample.
    pub fn max_best_tail_max(&self) -> Option<&Rational> {
        self.cells.iter().map(|c| &c.best.tail_max).max()
    }

    /// One row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,left,right,origin,class,tail_min,tail_max,tail_min_f64,tail_max_f64\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:e},{:e}\n",
                c.i,
                c.j,
                c.best.left,
                c.best.right,
                c.best.origin,
                c.best.class,
                fmt_rational(&c.best.tail_min),
                fmt_rational(&c.best.tail_max),
                to_f64(&c.best.tail_min),
                to_f64(&c.best.tail_max),
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

fn summarise(i: usize, j: usize, samples: Vec<Sample>) -> CellReport {
    let mut counts = BTreeMap::new();
    for s in &samples {
        *counts.entry(s.class.name()).or_insert(0) += 1;
    }
    let has_ly = samples.iter().any(|s| s.class.is_ly());
    let has_eps_ly = samples.iter().any(|s| s.class.is_eps_ly());
    let mut best = 0;
    for (k, s) in samples.iter().enumerate() {
        if s.class.rank() > samples[best].class.rank() {
            best = k;
        }
    }
    CellReport { i, j, best: samples[best].clone(), counts, has_ly, has_eps_ly }
}

fn singleton(x: &Rational) -> CompactSet {
    CompactSet::point(x.clone()).expect("sample points lie in [0, 1]")
}

/// Classifies the samples of one cell `X × Y`: the centre pair, the four
/// quarter pairs, and a partner of the centre `x` built inside `Y`.
pub fn sample_cell(m: &PLMap, cx: &Interval, cy: &Interval, params: &PairParams) -> Result<Vec<Sample>> {
    let mut pts: Vec<(Rational, Rational, &'static str)> = vec![(cx.midpoint(), cy.midpoint(), "centre")];
    for (fx, fy) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
        pts.push((cx.at_fraction(&rat(fx, 4)), cy.at_fraction(&rat(fy, 4)), "quarter"));
    }
    let window = PartnerWindow::from_params(params);
    if let Some(y) = build_partner(m, &cx.midpoint(), cy, &window) {
        pts.push((cx.midpoint(), y, "partner"));
    }
    pts.into_iter()
        .map(|(x, y, origin)| {
            let v = classify_point_pair(m, &x, &y, params)?;
            Ok(Sample::new(singleton(&x), singleton(&y), origin, &v))
        })
        .collect()
}

/// Scans `grid × grid` cells of `region`, in parallel, assembled in index
/// order.
pub fn scan_pairs(
    m: &PLMap,
    region: (&Interval, &Interval),
    grid: usize,
    params: &PairParams,
) -> Result<DensityReport> {
    if grid == 0 {
        return domain("grid must be at least 1");
    }
    if region.0.is_degenerate() || region.1.is_degenerate() {
        return domain("scan region intervals must be nondegenerate");
    }
    let xs = region.0.subdivide(grid);
    let ys = region.1.subdivide(grid);
    let cells = (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / grid, k % grid);
            let samples = sample_cell(m, &xs[i], &ys[j], params)?;
            Ok(summarise(i, j, samples))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityReport::assemble(params, cells, Vec::new()))
}

/// Van der Corput radical inverse in base 2: `1/2, 1/4, 3/4, 1/8, …` for
/// `n = 1, 2, 3, …`.
pub fn van_der_corput(n: u64) -> Rational {
    let mut n = n;
    let mut num: i64 = 0;
    let mut den: i64 = 1;
    while n > 0 {
        num = 2 * num + (n & 1) as i64;
        den *= 2;
        n >>= 1;
    }
    rat(num, den)
}

/// Fraction by which each open is shrunk before sampling, so sample sets
/// stay strictly inside it.
pub fn sampling_margin() -> Rational {
    rat(1, 16)
}

fn box_sample(b: &VietorisBox, index: u64, flip: bool) -> CompactSet {
    let k = b.opens().len() as u64;
    let pts: Vec<Rational> = b
        .opens()
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let mut t = van_der_corput(index * k + i as u64 + 1);
            if flip {
                t = int(1) - t;
            }
            o.inner(&sampling_margin()).at_fraction(&t)
        })
        .collect();
    CompactSet::points(&pts).expect("sample points lie in [0, 1]")
}

/// Enumerates finite member sets of both boxes and classifies their pairs.
///
/// Row `s` pairs the `s`-th sample of the first box with every sample of the
/// second, plus one collapsed candidate: sets whose points all reach one
/// orbit after finitely many steps, the second built around a partner of the
/// first.
pub fn scan_hyper_pairs(
    m: &PLMap,
    boxes: (&VietorisBox, &VietorisBox),
    samples: usize,
    params: &PairParams,
) -> Result<DensityReport> {
    if samples == 0 {
        return domain("samples must be at least 1");
    }
    let lefts: Vec<CompactSet> = (0..samples as u64).map(|s| box_sample(boxes.0, s, false)).collect();
    let rights: Vec<CompactSet> = (0..samples as u64).map(|s| box_sample(boxes.1, s, true)).collect();
    let rows = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut out = Vec::with_capacity(samples + 1);
            let mut notes = Vec::new();
            for b in &rights {
                let v = classify_set_pair(m, &lefts[s], b, params)?;
                out.push(Sample::new(lefts[s].clone(), b.clone(), "grid", &v));
            }
            match collapsed_candidate(m, boxes, s as u64, params) {
                Ok((a, b)) => {
                    let v = classify_set_pair(m, &a, &b, params)?;
                    out.push(Sample::new(a, b, "collapsed", &v));
                }
                Err(reason) => notes.push(format!("row {s}: {reason}")),
            }
            Ok((summarise(s, 0, out), notes))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cells = Vec::with_capacity(samples);
    let mut infeasible = Vec::new();
    for (c, n) in rows {
        cells.push(c);
        infeasible.extend(n);
    }
    for (name, b, sets) in [("first", boxes.0, &lefts), ("second", boxes.1, &rights)] {
        if let Some(bad) = sets.iter().find(|a| !vietoris_member(a, b)) {
            infeasible.push(format!("{name} box: sample {bad} is not a member"));
        }
    }
    Ok(DensityReport::assemble(params, cells, infeasible))
}

fn collapsed_candidate(
    m: &PLMap,
    boxes: (&VietorisBox, &VietorisBox),
    index: u64,
    params: &PairParams,
) -> std::result::Result<(CompactSet, CompactSet), String> {
    let margin = sampling_margin();
    let us: Vec<Interval> = boxes.0.opens().iter().map(|o| o.inner(&margin)).collect();
    let vs: Vec<Interval> = boxes.1.opens().iter().map(|o| o.inner(&margin)).collect();
    let seed = us[0].at_fraction(&van_der_corput(index + 1));
    let limit = params.tail_start.min(params.horizon / 4);
    for t0 in 0..=limit {
        let target = m.orbit(&seed, t0).pop().unwrap();
        let u_images: Vec<Interval> = us.iter().map(|u| m.iterate_interval(u, t0).pop().unwrap()).collect();
        if !u_images.iter().all(|img| img.contains(&target)) {
            continue;
        }
        let Some(common) = vs
            .iter()
            .map(|v| m.iterate_interval(v, t0).pop().unwrap())
            .try_fold(Interval::unit(), |acc, img| acc.intersection(&img))
        else {
            continue;
        };
        if common.is_degenerate() {
            continue;
        }
        let window = PartnerWindow::from_params(params).shifted(t0);
        let Some(partner) = build_partner(m, &target, &common, &window) else {
            continue;
        };
        let a = collapse_onto(m, &us, t0, &target).ok_or("pullback of the first set failed")?;
        let b = collapse_onto(m, &vs, t0, &partner).ok_or("pullback of the second set failed")?;
        return Ok((a, b));
    }
    Err(format!("no collapse time up to {limit}"))
}

/// Scans a point region and a pair of boxes under the same parameters, so
/// that density of LY pairs of `f` and of `f̄` can be compared side by side.
/// This reports observations only; no implication between the two is assumed.
#[derive(Clone, Debug, Serialize)]
pub struct TransmissionProbe {
    pub points: DensityReport,
    pub sets: DensityReport,
}

pub fn dense_transmission_probe(
    m: &PLMap,
    region: (&Interval, &Interval),
    grid: usize,
    boxes: (&VietorisBox, &VietorisBox),
    samples: usize,
    params: &PairParams,
) -> Result<TransmissionProbe> {
    Ok(TransmissionProbe {
        points: scan_pairs(m, region, grid, params)?,
        sets: scan_hyper_pairs(m, boxes, samples, params)?,
    })
}
