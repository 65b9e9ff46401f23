//! Static SVG: count charts and the annotated implication diagram.

use std::fmt::Write;

use gluedyn::entropy::EntropyEstimate;
use gluedyn::properties::Verdict;

use crate::demo::{DemoResult, EDGES};

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn colour(v: Verdict) -> &'static str {
    match v {
        Verdict::HoldsAtScale => "#4c9f70",
        Verdict::FailsWithWitness => "#c8553d",
        Verdict::Inconclusive => "#b0b0b0",
    }
}

/// `ln s(n)` against `n`, with the fitted slope in the caption.
pub fn count_chart(title: &str, e: &EntropyEstimate) -> String {
    let (w, h, pad) = (640.0, 360.0, 48.0);
    let logs: Vec<f64> = e.counts.iter().map(|&c| (c.max(1) as f64).ln()).collect();
    let n_max = *e.n.last().unwrap_or(&1) as f64;
    let y_max = logs.iter().copied().fold(1e-9, f64::max);
    let x = |n: usize| pad + (n as f64 / n_max) * (w - 2.0 * pad);
    let y = |v: f64| h - pad - (v / y_max) * (h - 2.0 * pad);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{pad}" y="20">{}</text>"#, esc(title));
    let _ = writeln!(
        s,
        r#"<line x1="{pad}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/><line x1="{pad}" y1="{pad}" x2="{pad}" y2="{b}" stroke="black"/>"#,
        b = h - pad,
        r = w - pad
    );
    let pts: Vec<String> = e.n.iter().zip(&logs).map(|(&n, &v)| format!("{:.2},{:.2}", x(n), y(v))).collect();
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#3b6ea5" stroke-width="2" points="{}"/>"##, pts.join(" "));
    let _ = writeln!(s, r#"<text x="{}" y="{}">n = {}</text>"#, w - pad - 40.0, h - pad + 20.0, n_max);
    let _ = writeln!(s, r#"<text x="4" y="{}">{:.2}</text>"#, pad + 4.0, y_max);
    let _ = writeln!(
        s,
        r#"<text x="{pad}" y="{}">slope {:.6}, endpoint {:.6}, {}</text>"#,
        h - 8.0,
        e.slope,
        e.endpoint,
        if e.exact { "exact counts" } else { "greedy counts" }
    );
    s.push_str("</svg>\n");
    s
}

/// One panel per system: nodes (1)..(5) coloured by verdict, arrows of the
/// diagram, broken arrows dashed red, and the gluing verdict underneath.
pub fn implication_diagram(res: &DemoResult) -> String {
    let (pw, ph) = (300.0, 230.0);
    let pos = |i: u8| -> (f64, f64) { match i {
        1 => (50.0, 60.0),
        2 => (150.0, 60.0),
        5 => (250.0, 60.0),
        4 => (50.0, 150.0),
        _ => (150.0, 150.0),
    } };
    let w = pw * res.systems.len().max(1) as f64;
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{ph}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(
        s,
        "<defs><marker id=\"a\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0L10,5L0,10z\"/></marker></defs>"
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{ph}" fill="white"/>"#);
    for (k, sys) in res.systems.iter().enumerate() {
        let ox = k as f64 * pw;
        let _ = writeln!(s, r#"<g transform="translate({ox},0)"><text x="10" y="20" font-weight="bold">{}</text>"#, esc(&sys.key));
        for &(a, b) in &EDGES {
            let ((x1, y1), (x2, y2)) = (pos(a), pos(b));
            let (dx, dy) = (x2 - x1, y2 - y1);
            let len = (dx * dx + dy * dy).sqrt();
            let (ux, uy) = (dx / len, dy / len);
            // opposite arrows between (1) and (2) are offset sideways
            let off = if (a, b) == (1, 2) { -5.0 } else if (a, b) == (2, 1) { 5.0 } else { 0.0 };
            let broken = sys.broken_edges.contains(&(a, b));
            let _ = writeln!(
                s,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{}" stroke-width="1.5" {} marker-end="url(#a)"/>"#,
                x1 + 18.0 * ux - off * uy,
                y1 + 18.0 * uy + off * ux,
                x2 - 18.0 * ux - off * uy,
                y2 - 18.0 * uy + off * ux,
                if broken { "#c8553d" } else { "#333" },
                if broken { r#"stroke-dasharray="4 3""# } else { "" }
            );
        }
        for (i, row) in sys.analysis.rows.iter().enumerate() {
            let (x, y) = pos(i as u8 + 1);
            let _ = writeln!(
                s,
                r#"<circle cx="{x}" cy="{y}" r="16" fill="{}"/><text x="{x}" y="{}" text-anchor="middle" fill="white">({})</text>"#,
                colour(row.verdict),
                y + 4.0,
                i + 1
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="10" y="195">gluing: {}</text><text x="10" y="212" font-size="10">{}</text></g>"#,
            sys.gluing.verdict,
            esc(&sys.gluing.detail)
        );
    }
    s.push_str("</svg>\n");
    s
}
