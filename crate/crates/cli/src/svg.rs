//! Minimal SVG rendering of edge flows: arrows along edges, pointing in the
//! direction of positive flow, shaded by magnitude.

use std::fmt::Write;

use hodgelets::{Cochain, Geometry, SimplicialComplex};

const SIZE: f64 = 800.0;
const MARGIN: f64 = 20.0;

pub fn render_flow(complex: &SimplicialComplex, geometry: &Geometry, flow: &Cochain) -> String {
    let (lo, hi) = geometry.bounding_box().unwrap_or(([0.0, 0.0], [1.0, 1.0]));
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    // y grows upward in field coordinates
    let map = |p: [f64; 2]| {
        [MARGIN + (p[0] - lo[0]) * scale, SIZE - MARGIN - (p[1] - lo[1]) * scale]
    };
    let peak = flow.values.amax();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    out.push_str(
        r#"<defs><marker id="head" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" markerHeight="5" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="context-stroke"/></marker></defs>"#,
    );
    out.push('\n');
    out.push_str(r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    out.push('\n');

    for t in complex.triangles() {
        let pts: Vec<String> = t
            .iter()
            .map(|&v| {
                let p = map(geometry.positions[v]);
                format!("{:.2},{:.2}", p[0], p[1])
            })
            .collect();
        let _ = writeln!(out, r##"<polygon points="{}" fill="#eef2f7"/>"##, pts.join(" "));
    }
    for (e, &[i, j]) in complex.edges().iter().enumerate() {
        let v = flow.values[e];
        let (a, b) = if v >= 0.0 { (i, j) } else { (j, i) };
        let (p, q) = (map(geometry.positions[a]), map(geometry.positions[b]));
        if v == 0.0 || peak == 0.0 {
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#c8c8c8" stroke-width="0.6"/>"##,
                p[0], p[1], q[0], q[1]
            );
            continue;
        }
        let t = v.abs() / peak;
        let shade = (200.0 * (1.0 - t)).round() as u8;
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="rgb(220,{shade},{shade})" stroke-width="{:.2}" marker-end="url(#head)"/>"##,
            p[0],
            p[1],
            q[0],
            q[1],
            0.8 + 2.2 * t
        );
    }
    for &p in &geometry.positions {
        let p = map(p);
        let _ = writeln!(out, r##"<circle cx="{:.2}" cy="{:.2}" r="1.8" fill="#333333"/>"##, p[0], p[1]);
    }
    out.push_str("</svg>\n");
    out
}
