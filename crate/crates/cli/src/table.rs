//! Plain-text reports.

use hyperchaos::criteria::{ChaosVerdict, Verdict};
use hyperchaos::pair_class::DensityReport;
use hyperchaos::rational::fmt_rational;
use hyperchaos::shift_space::ShiftReport;

fn verdict_cell(v: &Verdict) -> String {
    match &v.eps {
        Some(e) => format!("{} at eps = {}", v.state, fmt_rational(e)),
        None => v.state.to_string(),
    }
}

pub fn verdict_table(map: &str, v: &ChaosVerdict) -> String {
    let mut s = format!("map {map}, horizon {}, eps {}\n\n", v.params.horizon, fmt_rational(&v.params.eps));
    for (name, verdict) in
        [("generic", &v.generic), ("generic-eps", &v.generic_eps), ("dense", &v.dense), ("dense-eps", &v.dense_eps)]
    {
        s += &format!("{name:<12} {}\n", verdict_cell(verdict));
    }
    match &v.eps_estimate {
        Some(e) => s += &format!("{:<12} {}\n", "eps estimate", fmt_rational(e)),
        None => s += &format!("{:<12} none\n", "eps estimate"),
    }
    s += "\ncondition        result\n";
    for (name, e) in &v.evidence {
        s += &format!("{name:<16} {}\n", e.state());
    }
    if !v.wiring.is_empty() {
        s += "\nwiring:\n";
        for w in &v.wiring {
            s += &format!("  {w}\n");
        }
    }
    if !v.notes.is_empty() {
        s += "\nnotes:\n";
        for n in &v.notes {
            s += &format!("  {n}\n");
        }
    }
    s
}

pub fn scan_summary(r: &DensityReport) -> String {
    let mut s = format!(
        "cells {}, with LY pair {} ({}), with eps-LY pair {} ({})\n",
        r.cells.len(),
        r.ly_cells,
        fmt_rational(&r.ly_fraction),
        r.eps_ly_cells,
        fmt_rational(&r.eps_ly_fraction)
    );
    for (class, n) in &r.class_counts {
        s += &format!("  {class:<18} {n}\n");
    }
    for why in &r.infeasible {
        s += &format!("infeasible: {why}\n");
    }
    s
}

pub fn shift_summary(r: &ShiftReport) -> String {
    let mut s = format!("k = {}, horizon = {}, n = {:?}\n", r.k, r.horizon, r.n_values);
    s += "t,d_H,closed_form\n";
    for (t, (d, c)) in r.series.iter().zip(&r.closed_form).enumerate() {
        s += &format!("{t},{},{}\n", fmt_rational(d), fmt_rational(c));
    }
    let dips: Vec<String> = r.dips.iter().map(fmt_rational).collect();
    s += &format!(
        "series matches closed form: {}\ncensus of {} sequences all asymptotic: {}\nlimsup proxy: {}\ndips: [{}] decreasing: {}\n{}\n",
        r.series_matches,
        r.census_size,
        r.census_all_asymptotic,
        fmt_rational(&r.limsup_proxy),
        dips.join(", "),
        r.dips_decreasing,
        if r.pass { "pass" } else { "fail" }
    );
    s
}
