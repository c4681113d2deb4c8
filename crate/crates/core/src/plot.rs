//! Static SVG rendering of a map graph over the unit square.

use std::fmt::Write;

use crate::pl_map::PLMap;
use crate::rational::to_f64;

const SIZE: f64 = 480.0;
const PAD: f64 = 24.0;

fn sx(x: f64) -> f64 {
    PAD + x * SIZE
}

fn sy(y: f64) -> f64 {
    PAD + (1.0 - y) * SIZE
}

/// The graph of `m` as a polyline through its nodes, with the diagonal
/// dashed and the nodes marked. Coordinates are printed with 4 decimals, so
/// equal maps give byte-identical output.
pub fn render_svg(m: &PLMap) -> String {
    let side = SIZE + 2.0 * PAD;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#
    );
    let _ = writeln!(out, r##"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="none" stroke="#888"/>"##);
    let _ = writeln!(
        out,
        r##"<line x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="{:.4}" stroke="#888" stroke-dasharray="4 4"/>"##,
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(1.0)
    );
    let pts: Vec<String> =
        m.nodes().iter().map(|(x, y)| format!("{:.4},{:.4}", sx(to_f64(x)), sy(to_f64(y)))).collect();
    let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#, pts.join(" "));
    for (x, y) in m.nodes() {
        let _ = writeln!(out, r#"<circle cx="{:.4}" cy="{:.4}" r="1.5"/>"#, sx(to_f64(x)), sy(to_f64(y)));
    }
    out.push_str("</svg>\n");
    out
}
