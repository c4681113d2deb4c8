//! Acceptance run: one line per criterion with its measured numbers and
//! runtime. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hyperchaos::criteria::{
    check_covering_transitivity, classify_chaos, construct_hyper_eps_ly_pair, ChaosParams, ConstructParams, Status,
};
use hyperchaos::hyperspace::{hausdorff_distance, induced_orbit, vietoris_member};
use hyperchaos::pair_class::{default_tol_low, scan_pairs};
use hyperchaos::rational::{dyadic, one, rat, to_f64, zero};
use hyperchaos::shift_space::{build_example_m, build_example_n, n_values, verify_example, BinarySeq, SeqSet};
use hyperchaos::{CompactSet, Interval, PLMap, PairParams, Rational, VietorisBox};

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn run(id: u32, name: &'static str, budget_s: u64, f: impl FnOnce() -> (bool, String)) -> Line {
    let start = Instant::now();
    let (pass, detail) = f();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_s);
    Line { id, name, pass: pass && elapsed < budget, detail, elapsed, budget }
}

fn random_map(rng: &mut ChaCha8Rng) -> PLMap {
    let n = rng.gen_range(2..=12);
    let den = 64;
    let mut xs: Vec<i64> = (1..den).collect();
    for i in (1..xs.len()).rev() {
        xs.swap(i, rng.gen_range(0..=i));
    }
    let mut inner: Vec<i64> = xs[..n - 2].to_vec();
    inner.sort();
    let mut nodes = vec![(zero(), rat(rng.gen_range(0..=den), den))];
    for x in inner {
        nodes.push((rat(x, den), rat(rng.gen_range(0..=den), den)));
    }
    nodes.push((one(), rat(rng.gen_range(0..=den), den)));
    PLMap::new(nodes).unwrap()
}

fn random_interval(rng: &mut ChaCha8Rng, den: i64) -> Interval {
    let a = rng.gen_range(0..=den);
    let b = rng.gen_range(0..=den);
    Interval::new(rat(a.min(b), den), rat(a.max(b), den)).unwrap()
}

fn random_set(rng: &mut ChaCha8Rng) -> CompactSet {
    let parts = (0..rng.gen_range(1..=4))
        .map(|_| {
            if rng.gen_bool(0.3) {
                Interval::point(rat(rng.gen_range(0..=97), 97)).unwrap()
            } else {
                random_interval(rng, 97)
            }
        })
        .collect();
    CompactSet::from_parts(parts).unwrap()
}

fn criterion_1() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checks = 0;
    for _ in 0..100 {
        let m = random_map(&mut rng);
        let j = random_interval(&mut rng, 32);
        let a = rng.gen_range(0..=32);
        let b = rng.gen_range(0..=32);
        let whole = m.iterate_interval(&j, a + b);
        let first = m.iterate_interval(&j, a);
        let then = m.iterate_interval(&first[a], b);
        if whole[a + b] != then[b] {
            return (false, format!("iterate_interval semigroup broken for {m:?}"));
        }
        // Oracle: the image under the composed map f∘f∘f.
        let f3 = m.compose(&m).compose(&m);
        if whole.len() > 3 && f3.image_interval(&j) != whole[3] {
            return (false, format!("composed-map oracle disagrees for {m:?}"));
        }
        let s = random_set(&mut rng);
        let (a, b) = (a.min(16), b.min(16));
        let whole = induced_orbit(&m, &s, a + b);
        let first = induced_orbit(&m, &s, a);
        let then = induced_orbit(&m, &first[a], b);
        if whole[a + b] != then[b] {
            return (false, format!("induced_orbit semigroup broken for {m:?}"));
        }
        checks += 3;
    }
    (true, format!("{checks} exact equalities on 100 maps"))
}

/// Grid points of step `2^-12` inside `a`, plus the part endpoints.
fn grid_samples(a: &CompactSet) -> Vec<f64> {
    let step = 1.0 / 4096.0;
    let mut out = Vec::new();
    for p in a.parts() {
        let (lo, hi) = (to_f64(p.lo()), to_f64(p.hi()));
        out.push(lo);
        let mut k = (lo / step).ceil() as i64;
        while (k as f64) * step <= hi {
            out.push(k as f64 * step);
            k += 1;
        }
        out.push(hi);
    }
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

fn nearest(sorted: &[f64], x: f64) -> f64 {
    let i = sorted.partition_point(|&y| y < x);
    let mut best = f64::INFINITY;
    for k in [i.saturating_sub(1), i.min(sorted.len() - 1)] {
        best = best.min((sorted[k] - x).abs());
    }
    best
}

fn grid_hausdorff(a: &CompactSet, b: &CompactSet) -> f64 {
    let (sa, sb) = (grid_samples(a), grid_samples(b));
    let ab = sa.iter().map(|&x| nearest(&sb, x)).fold(0.0, f64::max);
    let ba = sb.iter().map(|&x| nearest(&sa, x)).fold(0.0, f64::max);
    ab.max(ba)
}

fn criterion_2() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (a, b) = (random_set(&mut rng), random_set(&mut rng));
        let exact = to_f64(&hausdorff_distance(&a, &b));
        worst = worst.max((exact - grid_hausdorff(&a, &b)).abs());
    }
    (worst <= 1.0 / 4096.0, format!("max |exact - grid| = {worst:.3e} (tolerance 2^-12)"))
}

fn tent_report() -> (bool, String, String) {
    let m = PLMap::tent();
    let v = classify_chaos(&m, &ChaosParams::new(rat(1, 2)).unwrap()).unwrap();
    let sampled = |s: &hyperchaos::criteria::TriState| s.status == Status::Pass;
    let all = [&v.generic, &v.generic_eps, &v.dense, &v.dense_eps].iter().all(|x| sampled(&x.state));
    let est = v.eps_estimate.clone().unwrap_or_else(zero);
    let cov = check_covering_transitivity(&m, &Interval::unit(), 5, 64).unwrap();
    let pass = all && est >= rat(1, 2) && cov.state.is_pass();
    let detail = format!(
        "generic {}, generic-eps {}, dense {}, dense-eps {}, eps estimate {}, covering {} (N <= {})",
        v.generic.state, v.generic_eps.state, v.dense.state, v.dense_eps.state, est, cov.state, cov.max_n
    );
    (pass, detail, v.to_json())
}

fn snoha_report() -> (bool, String, String) {
    let m = PLMap::snoha(6);
    let mut p = ChaosParams::new(rat(1, 9)).unwrap();
    p.interval_grid = 6;
    let v = classify_chaos(&m, &p).unwrap();
    let a = v.evidence_state("attracting-point").unwrap();
    let b = v.evidence_state("diam-floor").unwrap();
    let w = &v.evidence["dense-eps-scan"].witness;
    let a2 = rat(8, 9);
    let t = Interval::new(a2, one()).unwrap();
    let box_ok = w["box"] == format!("{t} x {t}");
    let max_tail: Rational = w["max_tail_max"].as_str().unwrap().parse().unwrap();
    let pass = a.is_pass()
        && b.is_pass()
        && v.dense.state.is_pass()
        && v.dense_eps.state.is_fail()
        && box_ok
        && max_tail < rat(1, 9)
        && v.generic.state.is_fail()
        && v.generic_eps.state.is_fail();
    let detail = format!(
        "attracting point {a}, diameter floor {b}, dense {}, dense-eps(1/9) {} with box {} (max sampled tail_max {}), generic {}, generic-eps {}",
        v.dense.state, v.dense_eps.state, w["box"], max_tail, v.generic.state, v.generic_eps.state
    );
    (pass, detail, v.to_json())
}

const BOXES: [(&str, &str); 5] = [
    ("(0,1/4)", "(3/4,1)"),
    ("(0,1)", "(0,1)"),
    ("(0,1/8);(1/2,5/8)", "(1/4,3/8)"),
    ("(1/3,2/3)", "(-1/10,1/10);(9/10,11/10)"),
    ("(1/16,1/8);(3/4,7/8);(15/16,1)", "(1/5,2/5);(3/5,4/5)"),
];

fn construct_report() -> (bool, String, String) {
    let m = PLMap::tent();
    let params = ConstructParams::new(PairParams::with_eps(rat(1, 2)).unwrap());
    let floor = rat(1, 2) - dyadic(10);
    let mut pass = true;
    let mut lines = Vec::new();
    let mut json = Vec::new();
    for (bu, bv) in BOXES {
        let (bu, bv): (VietorisBox, VietorisBox) = (bu.parse().unwrap(), bv.parse().unwrap());
        match construct_hyper_eps_ly_pair(&m, &bu, &bv, &params) {
            Ok(c) => {
                let s = &c.verdict.stats;
                let ok = s.tail_min <= default_tol_low()
                    && s.tail_max > floor
                    && vietoris_member(&c.u, &bu)
                    && vietoris_member(&c.v, &bv);
                pass &= ok;
                lines.push(format!("{}:{}", c.branch, if ok { "ok" } else { "BAD" }));
                json.push(serde_json::to_string(&c).unwrap());
            }
            Err(e) => {
                pass = false;
                lines.push(e.to_string());
            }
        }
    }
    (pass, format!("5 box pairs: {}", lines.join(", ")), json.join("\n"))
}

/// `d_H` by brute force over explicit symbol strings of length `len`.
fn brute_series(k: usize, horizon: u64) -> Vec<Rational> {
    let len = (n_values(k).last().unwrap() + horizon + 4) as usize;
    let word = |z: Option<u64>| (1..=len as u64).map(|i| u8::from(Some(i) != z)).collect::<Vec<u8>>();
    let n_words: Vec<Vec<u8>> = n_values(k).iter().map(|n| word(Some(n + 1))).collect();
    let ones = word(None);
    let dist = |x: &[u8], y: &[u8]| match x.iter().zip(y).position(|(a, b)| a != b) {
        Some(i) => rat(1, i as i64 + 1),
        None => zero(),
    };
    (0..=horizon as usize)
        .map(|t| {
            // M = {1^∞} is a single point, so d_H is the largest distance from it.
            n_words.iter().map(|w| dist(&ones[t..], &w[t..])).max().unwrap()
        })
        .collect()
}

fn shift_report() -> (bool, String, String) {
    let r = verify_example(6, 19).unwrap();
    let oracle = brute_series(6, 19);
    let ones_at: Vec<u64> = (0..=19).filter(|&t| r.series[t as usize] == one()).collect();
    let dips_ok = n_values(6)
        .iter()
        .enumerate()
        .filter(|(_, n)| **n < 19)
        .all(|(i, n)| r.series[*n as usize + 1] == rat(1, i as i64 + 2));
    let m = build_example_m();
    let n = build_example_n(6).unwrap();
    let t0 = hyperchaos::shift_space::hausdorff_seq(&m, &n);
    let single = SeqSet::new([BinarySeq::single_zero_after(0)]).unwrap();
    let pass = r.pass
        && r.series == oracle
        && ones_at == vec![0, 2, 5, 9, 14]
        && dips_ok
        && t0 == one()
        && hyperchaos::shift_space::hausdorff_seq(&m, &single) == one();
    let detail = format!(
        "series = brute force: {}, ones at {:?}, dips {:?}, census {} sequences all asymptotic: {}",
        r.series == oracle,
        ones_at,
        r.dips.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        r.census_size,
        r.census_all_asymptotic
    );
    (pass, detail, serde_json::to_string(&r).unwrap())
}

fn sanity_report() -> (bool, String, String) {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut json = Vec::new();
    for (name, m) in [("identity", PLMap::identity()), ("1-x", PLMap::flip())] {
        let mut p = ChaosParams::new(rat(1, 2)).unwrap();
        p.horizon = 256;
        let v = classify_chaos(&m, &p).unwrap();
        let all_fail = [&v.generic, &v.generic_eps, &v.dense, &v.dense_eps].iter().all(|x| x.state.is_fail());
        let pp = PairParams::new(256, default_tol_low(), rat(1, 2)).unwrap();
        let unit = Interval::unit();
        let scan = scan_pairs(&m, (&unit, &unit), 16, &pp).unwrap();
        let ly = scan.ly_cells
            + scan.class_counts.get("ly").copied().unwrap_or(0)
            + scan.class_counts.get("eps_ly").copied().unwrap_or(0);
        pass &= all_fail && ly == 0 && scan.cells.len() == 256;
        parts.push(format!("{name}: all fail {all_fail}, LY pairs {ly} in {} cells", scan.cells.len()));
        json.push(v.to_json());
        json.push(scan.to_csv());
    }
    (pass, parts.join("; "), json.join("\n"))
}

type Report = fn() -> (bool, String, String);

fn main() {
    let mut lines = Vec::new();
    lines.push(run(1, "exactness suite", 5, criterion_1));
    lines.push(run(2, "Hausdorff oracle", 10, criterion_2));
    let mut outputs = Vec::new();
    let reports: [(u32, &'static str, u64, Report); 5] = [
        (3, "tent classification", 30, tent_report),
        (4, "Snoha example, depth 6", 60, snoha_report),
        (5, "constructive transmission", 30, construct_report),
        (6, "shift example", 1, shift_report),
        (7, "non-chaotic sanity", 10, sanity_report),
    ];
    for (id, name, budget, f) in reports {
        let mut out = String::new();
        lines.push(run(id, name, budget, || {
            let (p, d, o) = f();
            out = o;
            (p, d)
        }));
        outputs.push(out);
    }
    let again: Vec<String> = reports.iter().map(|(_, _, _, f)| f().2).collect();
    let same = outputs == again;
    lines.push(Line {
        id: 8,
        name: "determinism",
        pass: same,
        detail: format!("criteria 3-7 rerun byte-identical: {same}"),
        elapsed: Duration::ZERO,
        budget: Duration::ZERO,
    });

    let mut failed = 0;
    for l in &lines {
        if !l.pass {
            failed += 1;
        }
        let timing = if l.budget.is_zero() {
            String::new()
        } else {
            format!(" [{:.2}s / {}s]", l.elapsed.as_secs_f64(), l.budget.as_secs())
        };
        println!("criterion {}: {} {}{}: {}", l.id, if l.pass { "PASS" } else { "FAIL" }, l.name, timing, l.detail);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
