use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::conditions::{
    affine_on, check_diam_growth, check_f1, check_g1, find_traps, fixed_anchors, trap_at_most, Trap,
};
use super::transitive::{find_invariant_transitive_intervals, TransitiveIntervalReport};
use super::{Basis, Status, TriState};
use crate::error::{domain, Result};
use crate::interval::Interval;
use crate::pair_class::{default_tol_low, sample_cell, scan_pairs, PairParams, DEFAULT_HORIZON};
use crate::pl_map::PLMap;
use crate::rational::{dyadic, fmt_rational, one, serde_rat, zero, Rational};

/// Knobs of [`classify_chaos`]. Grids are given as dyadic exponents except
/// `scan_grid`, which counts cells per side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChaosParams {
    pub horizon: usize,
    #[serde(with = "serde_rat")]
    pub tol_low: Rational,
    #[serde(with = "serde_rat")]
    pub eps: Rational,
    /// Intervals of width `2^-interval_grid` for the interval conditions.
    pub interval_grid: u32,
    pub scan_grid: usize,
    /// Neighbourhoods of the fixed point of radius `2^-k`, `k = 1..=nbhd_levels`.
    pub nbhd_levels: u32,
    pub covering_grid: u32,
    pub covering_horizon: usize,
}

impl ChaosParams {
    /// Defaults around a user-supplied `eps`.
    pub fn new(eps: Rational) -> Result<Self> {
        let p = ChaosParams {
            horizon: DEFAULT_HORIZON,
            tol_low: default_tol_low(),
            eps,
            interval_grid: 4,
            scan_grid: 8,
            nbhd_levels: 10,
            covering_grid: 5,
            covering_horizon: 64,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.pair_params()?;
        if self.interval_grid == 0 || self.interval_grid > 12 {
            return domain(format!("interval_grid must be in 1..=12, got {}", self.interval_grid));
        }
        if self.scan_grid == 0 {
            return domain("scan_grid must be at least 1");
        }
        if self.covering_horizon < 2 {
            return domain("covering_horizon must be at least 2");
        }
        Ok(())
    }

    pub fn pair_params(&self) -> Result<PairParams> {
        PairParams::new(self.horizon, self.tol_low.clone(), self.eps.clone())
    }
}

/// A tri-state verdict, with the `ε` it refers to for the ε-variants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub state: TriState,
    #[serde(serialize_with = "serde_rat::opt::serialize")]
    pub eps: Option<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub status: Status,
    pub basis: Basis,
    pub witness: Value,
    pub params: Value,
}

impl Evidence {
    fn new(state: TriState, witness: Value, params: Value) -> Self {
        Evidence { status: state.status, basis: state.basis, witness, params }
    }

    pub fn state(&self) -> TriState {
        TriState { status: self.status, basis: self.basis }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChaosVerdict {
    pub generic: Verdict,
    pub generic_eps: Verdict,
    pub dense: Verdict,
    pub dense_eps: Verdict,
    /// Largest `2^-k`, `k <= 10`, below every sampled `limsup diam f^n(J)`;
    /// absent unless (f-2) passes.
    #[serde(serialize_with = "serde_rat::opt::serialize")]
    pub eps_estimate: Option<Rational>,
    pub evidence: BTreeMap<String, Evidence>,
    /// Adjustments made to keep the four verdicts logically consistent.
    pub wiring: Vec<String>,
    pub notes: Vec<String>,
    pub params: ChaosParams,
}

impl ChaosVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serialises")
    }

    pub fn evidence_state(&self, name: &str) -> Option<TriState> {
        self.evidence.get(name).map(Evidence::state)
    }
}

fn rat_json(r: &Rational) -> Value {
    Value::String(fmt_rational(r))
}

/// `true` when every member of the exact interval cycle of `j` is a piece on
/// which the map is affine. Subintervals of `j` then never grow by more than a
/// bounded factor, so no uniform lower bound on `diam f^n(J)` exists.
fn affine_cycle(m: &PLMap, j: &Interval, horizon: usize) -> Option<(usize, usize)> {
    let o = m.interval_orbit(j, horizon);
    let members = o.cycle_members()?;
    members.iter().all(|k| affine_on(m, k)).then(|| o.cycle.unwrap())
}

struct IntervalFacts {
    j: Interval,
    tail_min: Rational,
    tail_max: Rational,
    /// Exact cycle of the interval sequence.
    cycle: Option<(usize, usize)>,
    min_cycle_diam: Option<Rational>,
    affine_cycle: bool,
}

fn interval_facts(m: &PLMap, grid: &[Interval], horizon: usize) -> Result<Vec<IntervalFacts>> {
    grid.par_iter()
        .map(|j| {
            let s = check_diam_growth(m, j, horizon, horizon / 2)?;
            let o = m.interval_orbit(j, horizon);
            let min_cycle_diam = o.cycle_members().map(|c| c.iter().map(Interval::diameter).min().unwrap());
            Ok(IntervalFacts {
                j: j.clone(),
                tail_min: s.tail_min,
                tail_max: s.tail_max,
                cycle: o.cycle,
                min_cycle_diam,
                affine_cycle: affine_cycle(m, j, horizon).is_some(),
            })
        })
        .collect()
}

fn largest_dyadic_below(v: &Rational) -> Option<(u32, Rational)> {
    (0..=10).map(|k| (k, dyadic(k))).find(|(_, e)| v > e)
}

/// Runs the interval conditions, the transitive-interval search and the
/// neighbourhood scans, then aggregates them into the four chaos verdicts.
///
/// Every grid-based pass is reported as sampled. Failures come from exact
/// certificates (interval cycles, invariant traps) where possible.
pub fn classify_chaos(m: &PLMap, params: &ChaosParams) -> Result<ChaosVerdict> {
    params.validate()?;
    let pp = params.pair_params()?;
    let grid = Interval::unit().subdivide(1usize << params.interval_grid);
    let gridp = json!({ "interval_width": rat_json(&dyadic(params.interval_grid)), "horizon": params.horizon,
        "tol_low": rat_json(&params.tol_low) });
    let mut evidence: BTreeMap<String, Evidence> = BTreeMap::new();
    let mut notes = Vec::new();

    // (f-1) over unordered pairs of grid intervals.
    let pairs: Vec<(usize, usize)> = (0..grid.len()).flat_map(|a| (a + 1..grid.len()).map(move |b| (a, b))).collect();
    let f1_results = pairs
        .par_iter()
        .map(|&(a, b)| check_f1(m, &grid[a], &grid[b], params.horizon, &params.tol_low).map(|r| (a, b, r)))
        .collect::<Result<Vec<_>>>()?;
    let f1 = f1_results.iter().fold(TriState::sampled_pass(), |acc, (_, _, r)| acc.and(r.state));
    let f1_witness = match f1_results.iter().find(|(_, _, r)| !r.state.is_pass()) {
        Some((a, b, r)) => json!({ "j1": grid[*a].to_string(), "j2": grid[*b].to_string(), "result": r }),
        None => json!({
            "pairs": f1_results.len(),
            "max_witness_n": f1_results.iter().filter_map(|(_, _, r)| r.witness_n).max(),
        }),
    };
    evidence.insert("f-1".into(), Evidence::new(f1, f1_witness, gridp.clone()));

    // (f-2), (g-2) and the per-interval liminf condition share the diameters.
    let facts = interval_facts(m, &grid, params.horizon)?;
    let affine = facts.iter().find(|f| f.affine_cycle);
    let min_tail_max = facts.iter().map(|f| f.tail_max.clone()).min().unwrap();
    let min_tail_min = facts.iter().map(|f| f.tail_min.clone()).min().unwrap();
    let eps_estimate = largest_dyadic_below(&min_tail_max);
    let (f2, f2_witness) = match (affine, &eps_estimate) {
        (Some(f), _) => (
            TriState::certified_fail(),
            json!({ "interval": f.j.to_string(), "cycle": f.cycle,
                "reason": "the map is affine on every member of the interval cycle, so small subintervals stay small" }),
        ),
        (None, Some((k, a))) => {
            (TriState::sampled_pass(), json!({ "a": rat_json(a), "k": k, "min_tail_max": rat_json(&min_tail_max) }))
        }
        (None, None) => (TriState::inconclusive(), json!({ "min_tail_max": rat_json(&min_tail_max) })),
    };
    let eps_estimate = if f2.is_pass() { eps_estimate } else { None };
    evidence.insert("f-2".into(), Evidence::new(f2, f2_witness, gridp.clone()));

    let degenerate = facts.iter().find(|f| f.min_cycle_diam.as_ref().is_some_and(|d| d == &zero()));
    let (g2, g2_witness) = match (affine.or(degenerate), largest_dyadic_below(&min_tail_min)) {
        (Some(f), _) => (TriState::certified_fail(), json!({ "interval": f.j.to_string(), "cycle": f.cycle })),
        (None, Some((k, b))) => {
            (TriState::sampled_pass(), json!({ "b": rat_json(&b), "k": k, "min_tail_min": rat_json(&min_tail_min) }))
        }
        (None, None) => (TriState::inconclusive(), json!({ "min_tail_min": rat_json(&min_tail_min) })),
    };
    evidence.insert("g-2".into(), Evidence::new(g2, g2_witness, gridp.clone()));

    // Per-interval liminf of the diameter.
    let diam_each: Vec<TriState> = facts
        .iter()
        .map(|f| match &f.min_cycle_diam {
            Some(d) if d > &zero() => TriState::proved_pass(),
            Some(_) => TriState::certified_fail(),
            None if f.tail_min > params.tol_low => TriState::sampled_pass(),
            None => TriState::inconclusive(),
        })
        .collect();
    let diam_floor = diam_each.iter().fold(TriState::proved_pass(), |acc, s| acc.and(*s)).and(TriState::sampled_pass());
    let diam_witness = match diam_each.iter().position(|s| !s.is_pass()) {
        Some(i) => json!({ "interval": grid[i].to_string(), "tail_min": rat_json(&facts[i].tail_min) }),
        None => json!({ "min_tail_min": rat_json(&min_tail_min) }),
    };
    evidence.insert("diam-floor".into(), Evidence::new(diam_floor, diam_witness, gridp.clone()));

    // (g-1), also the first dense condition: some fixed anchor attracts every grid interval.
    let anchors = fixed_anchors(m);
    let mut g1 = TriState::certified_fail();
    let mut x0: Option<Rational> = None;
    let mut g1_tried = Vec::new();
    for a in &anchors {
        let per = grid
            .par_iter()
            .map(|j| check_g1(m, a, j, params.horizon, &params.tol_low).map(|r| (j.clone(), r)))
            .collect::<Result<Vec<_>>>()?;
        let state = per.iter().fold(TriState::sampled_pass(), |acc, (_, r)| acc.and(r.state));
        let bad = per.iter().find(|(_, r)| !r.state.is_pass());
        g1_tried.push(json!({
            "x0": rat_json(a),
            "state": state.to_string(),
            "first_bad": bad.map(|(j, r)| json!({ "interval": j.to_string(), "tail_max_distance": rat_json(&r.tail_max_distance) })),
        }));
        if state.is_pass() {
            g1 = state;
            x0 = Some(a.clone());
            break;
        }
        if !state.is_certified_fail() {
            g1 = TriState::inconclusive();
        }
    }
    if anchors.is_empty() {
        g1 = TriState::inconclusive();
    }
    let g1_witness = json!({ "x0": x0.as_ref().map(rat_json), "tried": g1_tried });
    evidence.insert("g-1".into(), Evidence::new(g1, g1_witness.clone(), gridp.clone()));
    evidence.insert("attracting-point".into(), Evidence::new(g1, g1_witness, gridp.clone()));

    // (h-1), (h-2).
    let transitive: TransitiveIntervalReport = find_invariant_transitive_intervals(
        m,
        params.interval_grid,
        params.horizon,
        params.covering_grid,
        params.covering_horizon,
    );
    let tparams = json!({ "covering_grid": params.covering_grid, "covering_horizon": params.covering_horizon });
    evidence.insert(
        "h-1".into(),
        Evidence::new(
            transitive.h1,
            json!({ "intervals": transitive.intervals, "rejected": transitive.rejected, "undecided": transitive.undecided }),
            tparams.clone(),
        ),
    );
    let h2_bad = transitive.h2.iter().find(|(_, s)| !s.is_pass()).map(|(j, _)| j.to_string());
    evidence.insert(
        "h-2".into(),
        Evidence::new(
            transitive.h2_all,
            json!({ "first_unreached": h2_bad, "intervals": transitive.h2.len() }),
            gridp.clone(),
        ),
    );

    // LY pairs in every one-sided punctured neighbourhood of x0.
    let (nbhd_ly, nbhd_witness) = match &x0 {
        Some(x0) => neighbourhood_scans(m, x0, params, &pp)?,
        None => (TriState::inconclusive(), json!({ "reason": "no fixed point satisfies (g-1)" })),
    };
    evidence.insert(
        "nbhd-ly".into(),
        Evidence::new(
            nbhd_ly,
            nbhd_witness,
            json!({ "levels": params.nbhd_levels, "grid": 2, "horizon": params.horizon }),
        ),
    );

    // Traps: invariant intervals too small to host ε-LY pairs.
    let traps = find_traps(m, params.interval_grid, params.horizon);
    let ladder: Vec<(u32, Option<Trap>)> = (0..=10).map(|k| (k, trap_at_most(&traps, &dyadic(k)))).collect();
    let ladder_all = ladder.iter().all(|(_, t)| t.is_some());
    evidence.insert(
        "trap-ladder".into(),
        Evidence::new(
            if ladder_all { TriState::certified_fail() } else { TriState::inconclusive() },
            json!(ladder.iter().map(|(k, t)| json!({ "eps": rat_json(&dyadic(*k)), "trap": t })).collect::<Vec<_>>()),
            json!({ "ladder": "2^-k, k = 0..=10" }),
        ),
    );
    let grid_width = dyadic(params.interval_grid);
    let narrow: Vec<String> = m
        .fixed_points()
        .parts()
        .iter()
        .filter(|p| !p.is_degenerate() && p.diameter() < grid_width)
        .map(|p| p.to_string())
        .collect();
    if !narrow.is_empty() {
        notes.push(format!(
            "fixed segments narrower than the interval grid ({}): {}; the grid conditions do not resolve them",
            fmt_rational(&grid_width),
            narrow.join(", ")
        ));
    }

    // Dense ε-chaos at the requested ε.
    let (dense_eps, de_witness) = match trap_at_most(&traps, &params.eps) {
        Some(trap) => {
            let w = trap_witness(m, &trap, params, &pp)?;
            (TriState::certified_fail(), w)
        }
        None => {
            let region = Interval::unit();
            let report = scan_pairs(m, (&region, &region), params.scan_grid, &pp)?;
            let state = if report.all_cells_eps_ly() { TriState::sampled_pass() } else { TriState::inconclusive() };
            (
                state,
                json!({ "region": "[0,1]^2", "eps_ly_cells": report.eps_ly_cells, "cells": report.cells.len(),
                    "no_eps_ly_cells": report.no_eps_ly_cells }),
            )
        }
    };
    evidence.insert(
        "dense-eps-scan".into(),
        Evidence::new(dense_eps, de_witness, json!({ "eps": rat_json(&params.eps), "grid": params.scan_grid })),
    );

    let cond_f = f1.and(f2);
    let cond_g = g1.and(g2);
    let cond_h = transitive.h1.and(transitive.h2_all);
    let dense = g1.and(diam_floor).and(nbhd_ly);

    let generic = if ladder_all || [cond_f, cond_g, cond_h].iter().any(|s| s.is_certified_fail()) {
        TriState::certified_fail()
    } else if dense_eps.is_pass() || [cond_f, cond_g, cond_h].iter().all(|s| s.is_pass()) {
        TriState::sampled_pass()
    } else if [cond_f, cond_g, cond_h].iter().any(|s| s.is_fail()) {
        TriState::observed_fail()
    } else {
        TriState::inconclusive()
    };

    // Same ε on both sides: generic ε-chaos and dense ε-chaos are equivalent.
    let mut v = [generic, dense_eps, dense, dense_eps];
    let wiring = wire(&mut v);
    let [generic, generic_eps, dense, dense_eps] = v;
    let eps = Some(params.eps.clone());
    Ok(ChaosVerdict {
        generic: Verdict { state: generic, eps: None },
        generic_eps: Verdict { state: generic_eps, eps: eps.clone() },
        dense: Verdict { state: dense, eps: None },
        dense_eps: Verdict { state: dense_eps, eps },
        eps_estimate: eps_estimate.map(|(_, e)| e),
        evidence,
        wiring,
        notes,
        params: params.clone(),
    })
}

const NAMES: [&str; 4] = ["generic", "generic_eps", "dense", "dense_eps"];

/// Enforces `generic_eps => generic`, `generic_eps <=> dense_eps`,
/// `dense_eps => dense` and `generic => dense` on `[G, GE, D, DE]`. Failures
/// propagate backwards first and are never overridden by passes.
fn wire(v: &mut [TriState; 4]) -> Vec<String> {
    const IMPLIES: [(usize, usize); 5] = [(1, 0), (1, 3), (3, 1), (3, 2), (0, 2)];
    let mut notes = Vec::new();
    loop {
        let mut changed = false;
        for (a, b) in IMPLIES {
            if v[b].is_fail() && !v[a].is_fail() {
                if v[a].is_pass() {
                    notes.push(format!("{} overridden: {} fails", NAMES[a], NAMES[b]));
                } else {
                    notes.push(format!("{} fails because {} fails", NAMES[a], NAMES[b]));
                }
                v[a] = TriState { status: Status::Fail, basis: v[b].basis };
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    loop {
        let mut changed = false;
        for (a, b) in IMPLIES {
            if v[a].is_pass() && v[b].status == Status::Inconclusive {
                notes.push(format!("{} passes because {} passes", NAMES[b], NAMES[a]));
                v[b] = TriState::sampled_pass();
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    notes
}

/// Scans `[x0 - r, x0]²`, `[x0, x0 + r]²` and, for interior `x0`,
/// `[x0 - r, x0] × [x0, x0 + r]`, for `r = 2^-k`, `k = 1..=levels`. Each
/// region must contain an LY pair.
fn neighbourhood_scans(m: &PLMap, x0: &Rational, params: &ChaosParams, pp: &PairParams) -> Result<(TriState, Value)> {
    let mut rows = Vec::new();
    let mut state = TriState::sampled_pass();
    for k in 1..=params.nbhd_levels {
        let r = dyadic(k);
        let left = (x0 > &zero()).then(|| Interval::new_unchecked((x0 - &r).max(zero()), x0.clone()));
        let right = (x0 < &one()).then(|| Interval::new_unchecked(x0.clone(), (x0 + &r).min(one())));
        let mut regions = Vec::new();
        if let Some(l) = &left {
            regions.push(("left", l.clone(), l.clone()));
        }
        if let Some(rr) = &right {
            regions.push(("right", rr.clone(), rr.clone()));
        }
        if let (Some(l), Some(rr)) = (&left, &right) {
            regions.push(("two-sided", l.clone(), rr.clone()));
        }
        for (side, a, b) in regions {
            let report = scan_pairs(m, (&a, &b), 2, pp)?;
            let found = report.cells.iter().find(|c| c.has_ly);
            if found.is_none() {
                state = TriState::inconclusive();
            }
            rows.push(json!({
                "radius": rat_json(&r),
                "side": side,
                "ly_cells": report.ly_cells,
                "pair": found.map(|c| json!({ "x": c.best.left.to_string(), "y": c.best.right.to_string(),
                    "tail_min": rat_json(&c.best.tail_min), "tail_max": rat_json(&c.best.tail_max) })),
            }));
        }
    }
    Ok((state, json!({ "x0": rat_json(x0), "regions": rows })))
}

/// Samples the box `T × T` on the scan grid and records the largest tail
/// maximum seen; every pair in it stays within `diam T`.
fn trap_witness(m: &PLMap, trap: &Trap, params: &ChaosParams, pp: &PairParams) -> Result<Value> {
    let t = &trap.interval;
    let cells = t.subdivide(params.scan_grid);
    let n = cells.len();
    let samples = (0..n * n)
        .into_par_iter()
        .map(|k| sample_cell(m, &cells[k / n], &cells[k % n], pp))
        .collect::<Result<Vec<_>>>()?;
    let all: Vec<_> = samples.into_iter().flatten().collect();
    let max_tail = all.iter().map(|s| s.tail_max.clone()).max().unwrap_or_else(zero);
    let eps_ly = all.iter().filter(|s| s.class.is_eps_ly()).count();
    Ok(json!({
        "box": format!("{t} x {t}"),
        "source": trap.source,
        "diameter": rat_json(&t.diameter()),
        "samples": all.len(),
        "eps_ly_samples": eps_ly,
        "max_tail_max": rat_json(&max_tail),
    }))
}
