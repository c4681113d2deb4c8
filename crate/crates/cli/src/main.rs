use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hyperchaos::criteria::{
    classify_chaos, construct_hyper_eps_ly_pair, construct_hyper_ly_pair, ChaosParams, ConstructParams, Construction,
};
use hyperchaos::hyperspace::{hausdorff_distance, induced_orbit};
use hyperchaos::mapfile::{dump_map_json, parse_map_json};
use hyperchaos::pair_class::{classify_point_pair, classify_set_pair, default_tol_low, scan_pairs, DEFAULT_HORIZON};
use hyperchaos::plot::render_svg;
use hyperchaos::rational::{fmt_rational, one, parse_rational, to_f64};
use hyperchaos::shift_space::{n_values, verify_example};
use hyperchaos::{CompactSet, Interval, PLMap, PairParams, PairVerdict, Rational, VietorisBox};

mod table;

/// Exact dynamics of piecewise-linear interval maps and their hyperspace maps.
#[derive(Parser, Debug)]
#[command(name = "hyperchaos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// tent, identity, flip (alias 1-x), snoha:DEPTH, or a JSON map file.
    #[arg(long, global = true, default_value = "tent")]
    map: String,
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Threshold below which a distance counts as zero (default 1/1048576).
    #[arg(long, global = true, value_parser = parse_rat)]
    tol: Option<Rational>,
    #[arg(long, global = true, value_parser = parse_rat)]
    eps: Option<Rational>,
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// `a..b` for both axes, or `a..b x c..d`.
    #[arg(long, global = true)]
    region: Option<String>,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The four chaos verdicts with per-condition evidence.
    Classify,
    /// Classify a pair of points (`p/q`) or compact sets (`a..b;c..d`).
    Pair { a: String, b: String },
    /// Build a Li-Yorke pair of the induced map in two Vietoris boxes;
    /// with --eps an ε-Li-Yorke pair.
    Construct {
        /// Opens of the first box, e.g. `(0,1/4);(1/2,3/4)`.
        #[arg(long = "box-u")]
        box_u: String,
        #[arg(long = "box-v")]
        box_v: String,
    },
    /// Grid scan of point pairs over a region of the square.
    Scan,
    /// SVG graph of the map.
    Plot,
    /// The shift-space example with a truncated set of k sequences.
    ShiftDemo {
        #[arg(long, default_value_t = 6)]
        k: usize,
    },
    /// Hausdorff distance of two compact sets.
    Hausdorff { a: String, b: String },
    /// Orbit of a point or of a compact set.
    Orbit { x: String },
    /// The map as a JSON map file.
    DumpMap,
}

fn parse_rat(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn load_map(source: &str) -> Result<PLMap> {
    Ok(match source {
        "tent" => PLMap::tent(),
        "identity" => PLMap::identity(),
        "flip" | "1-x" => PLMap::flip(),
        _ => match source.strip_prefix("snoha:") {
            Some(d) => {
                let depth: u32 = d.parse().with_context(|| format!("bad snoha depth {d:?}"))?;
                if depth > 40 {
                    bail!("snoha depth must be at most 40, got {depth}");
                }
                PLMap::snoha(depth)
            }
            None => {
                let text = fs::read_to_string(source).with_context(|| format!("cannot read map file {source}"))?;
                parse_map_json(&text).with_context(|| format!("map file {source}"))?
            }
        },
    })
}

enum Operand {
    Point(Rational),
    Set(CompactSet),
}

fn parse_operand(s: &str) -> Result<Operand> {
    if let Ok(x) = parse_rational(s) {
        return Ok(Operand::Point(x));
    }
    Ok(Operand::Set(s.parse().with_context(|| format!("not a point or compact set: {s:?}"))?))
}

fn parse_set(s: &str) -> Result<CompactSet> {
    s.parse().with_context(|| format!("not a compact set: {s:?}"))
}

fn parse_region(s: Option<&str>) -> Result<(Interval, Interval)> {
    let Some(s) = s else {
        return Ok((Interval::unit(), Interval::unit()));
    };
    let (a, b) = s.split_once(" x ").unwrap_or((s, s));
    let a: Interval = a.trim().parse().with_context(|| format!("bad region {s:?}"))?;
    let b: Interval = b.trim().parse().with_context(|| format!("bad region {s:?}"))?;
    Ok((a, b))
}

impl Common {
    fn horizon(&self) -> usize {
        self.horizon.unwrap_or(DEFAULT_HORIZON)
    }

    fn tol(&self) -> Rational {
        self.tol.clone().unwrap_or_else(default_tol_low)
    }

    /// Without `--eps` the threshold is 1, which no distance exceeds, so only
    /// the plain Li-Yorke test applies.
    fn pair_params(&self) -> Result<PairParams> {
        let eps = self.eps.clone().unwrap_or_else(one);
        Ok(PairParams::new(self.horizon(), self.tol(), eps)?)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialises") + "\n"
}

fn series_csv(distances: &[Rational]) -> String {
    let mut s = String::from("n,distance,distance_f64\n");
    for (n, d) in distances.iter().enumerate() {
        s += &format!("{n},{},{}\n", fmt_rational(d), to_f64(d));
    }
    s
}

fn pair_text(v: &PairVerdict, c: &Common) -> String {
    if c.json {
        return to_json(v);
    }
    if c.csv {
        return series_csv(&v.stats.distances);
    }
    format!(
        "class: {}\ntail from n = {}: min {} max {}\n{}",
        v.class,
        v.stats.tail_start,
        fmt_rational(&v.stats.tail_min),
        fmt_rational(&v.stats.tail_max),
        series_csv(&v.stats.distances)
    )
}

fn construction_text(c: &Construction) -> String {
    let mut s = format!("U = {}\nV = {}\nbranch: {}\ncase: {}\nk = {}, l = {}\n", c.u, c.v, c.branch, c.case, c.k, c.l);
    if let Some(x0) = &c.x0 {
        s += &format!("x0 = {}\n", fmt_rational(x0));
    }
    s += &format!("in boxes: {} / {}\n", c.membership.0, c.membership.1);
    s += &format!(
        "verified: {} (tail from n = {}: min {} max {})\ntrace:\n",
        c.verdict.class,
        c.verdict.stats.tail_start,
        fmt_rational(&c.verdict.stats.tail_min),
        fmt_rational(&c.verdict.stats.tail_max)
    );
    for t in &c.trace {
        s += &format!("  {}: {}\n", t.stage, t.detail);
    }
    s
}

/// `Ok(false)` means the command ran but found nothing to report.
fn run(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    let m = load_map(&c.map)?;
    match &cli.command {
        Command::Classify => {
            let Some(eps) = c.eps.clone() else {
                bail!("classify needs --eps: the ε-verdicts refer to it");
            };
            let mut p = ChaosParams::new(eps)?;
            p.horizon = c.horizon();
            p.tol_low = c.tol();
            if let Some(g) = c.grid {
                p.scan_grid = g;
            }
            let v = classify_chaos(&m, &p)?;
            if c.json {
                c.emit(&to_json(&v))?;
            } else {
                let t = table::verdict_table(&c.map, &v);
                match &c.out {
                    Some(path) => {
                        fs::write(path, to_json(&v)).with_context(|| format!("cannot write {}", path.display()))?;
                        print!("{t}");
                    }
                    None => print!("{t}"),
                }
            }
        }
        Command::Pair { a, b } => {
            let p = c.pair_params()?;
            let v = match (parse_operand(a)?, parse_operand(b)?) {
                (Operand::Point(x), Operand::Point(y)) => classify_point_pair(&m, &x, &y, &p)?,
                (a, b) => {
                    let set = |o: Operand| match o {
                        Operand::Point(x) => CompactSet::point(x),
                        Operand::Set(s) => Ok(s),
                    };
                    classify_set_pair(&m, &set(a)?, &set(b)?, &p)?
                }
            };
            c.emit(&pair_text(&v, c))?;
        }
        Command::Construct { box_u, box_v } => {
            let bu: VietorisBox = box_u.parse().with_context(|| format!("bad box {box_u:?}"))?;
            let bv: VietorisBox = box_v.parse().with_context(|| format!("bad box {box_v:?}"))?;
            let params = ConstructParams::new(c.pair_params()?);
            let got = if c.eps.is_some() {
                construct_hyper_eps_ly_pair(&m, &bu, &bv, &params)
            } else {
                construct_hyper_ly_pair(&m, &bu, &bv, &params)
            };
            match got {
                Ok(k) => c.emit(&if c.json { to_json(&k) } else { construction_text(&k) })?,
                Err(nf) => {
                    eprintln!("{nf}");
                    for t in &nf.trace {
                        eprintln!("  {}: {}", t.stage, t.detail);
                    }
                    if c.json {
                        c.emit(&to_json(&nf))?;
                    }
                    return Ok(false);
                }
            }
        }
        Command::Scan => {
            let (rx, ry) = parse_region(c.region.as_deref())?;
            let grid = c.grid.unwrap_or(8);
            if grid == 0 {
                bail!("--grid must be at least 1");
            }
            let r = scan_pairs(&m, (&rx, &ry), grid, &c.pair_params()?)?;
            let text = if c.csv {
                r.to_csv()
            } else if c.json {
                r.to_json() + "\n"
            } else {
                table::scan_summary(&r)
            };
            c.emit(&text)?;
        }
        Command::Plot => c.emit(&render_svg(&m))?,
        Command::ShiftDemo { k } => {
            if *k == 0 {
                bail!("k must be at least 1");
            }
            let last = *n_values(*k).last().unwrap();
            let horizon = c.horizon.map(|h| h as u64).unwrap_or(last.saturating_sub(1));
            let r = verify_example(*k, horizon)?;
            let text = if c.json {
                to_json(&r)
            } else if c.csv {
                series_csv(&r.series)
            } else {
                table::shift_summary(&r)
            };
            c.emit(&text)?;
        }
        Command::Hausdorff { a, b } => {
            let d = hausdorff_distance(&parse_set(a)?, &parse_set(b)?);
            let text = if c.json {
                to_json(&serde_json::json!({ "distance": fmt_rational(&d), "distance_f64": to_f64(&d) }))
            } else {
                format!("{}\n", fmt_rational(&d))
            };
            c.emit(&text)?;
        }
        Command::Orbit { x } => {
            let n = c.horizon.unwrap_or(16);
            let rows: Vec<String> = match parse_operand(x)? {
                Operand::Point(p) => m.orbit(&p, n).iter().map(fmt_rational).collect(),
                Operand::Set(s) => induced_orbit(&m, &s, n).iter().map(|a| a.to_string()).collect(),
            };
            let text = if c.json {
                to_json(&rows)
            } else {
                let mut s = String::from("n,value\n");
                for (i, r) in rows.iter().enumerate() {
                    s += &format!("{i},{r}\n");
                }
                s
            };
            c.emit(&text)?;
        }
        Command::DumpMap => c.emit(&(dump_map_json(&m) + "\n"))?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
