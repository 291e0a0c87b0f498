//! SVG heatmaps over the (θ, φ) grid: φ on x, θ on y, origin bottom-left.

use std::fmt::Write as _;

use qvf_core::analysis::{classify, Class, Heatmap};
use qvf_core::inject::{PHI_POINTS, THETA_POINTS};

const CELL: usize = 24;
const LEFT: usize = 64;
const TOP: usize = 40;
const BOTTOM: usize = 56;
const LEGEND: usize = 140;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SvgOptions {
    pub title: String,
    /// Outline the cells where the injected U equals T, S, Z or X.
    pub markers: bool,
}

fn lerp(a: [u8; 3], b: [u8; 3], t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let c: Vec<u8> = (0..3).map(|i| (a[i] as f64 + (b[i] as f64 - a[i] as f64) * t).round() as u8).collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Fill for a QVF value: deep green at 0 fading to pale at the green
/// boundary, white band, pale red deepening to 1.
pub fn color(qvf: f64) -> String {
    match classify(qvf.clamp(0.0, 1.0)).unwrap_or(Class::White) {
        Class::Green => lerp([0x1a, 0x98, 0x50], [0xd9, 0xf0, 0xd3], qvf / 0.45),
        Class::White => "#ffffff".into(),
        Class::Red => lerp([0xfd, 0xdb, 0xc7], [0xb2, 0x18, 0x2b], (qvf - 0.55) / 0.45),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn cell_origin(theta_index: usize, phi_index: usize) -> (usize, usize) {
    (LEFT + phi_index * CELL, TOP + (THETA_POINTS - 1 - theta_index) * CELL)
}

/// Renders `map`. Cells without records are hatched.
pub fn render_heatmap(map: &Heatmap, opts: &SvgOptions) -> String {
    let grid_w = PHI_POINTS * CELL;
    let grid_h = THETA_POINTS * CELL;
    let width = LEFT + grid_w + LEGEND;
    let height = TOP + grid_h + BOTTOM;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    s.push_str(concat!(
        "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\" patternTransform=\"rotate(45)\">",
        "<rect width=\"6\" height=\"6\" fill=\"#f4f4f4\"/><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#b0b0b0\" stroke-width=\"2\"/>",
        "</pattern></defs>\n"
    ));
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + grid_w / 2, escape(&opts.title));
    s.push_str("<g class=\"cells\">\n");
    for ti in 0..THETA_POINTS {
        for pj in 0..PHI_POINTS {
            let (x, y) = cell_origin(ti, pj);
            let (deg_t, deg_p) = (ti * 15, pj * 15);
            match map.mean(ti, pj) {
                Some(q) => {
                    let class = classify(q.clamp(0.0, 1.0)).map_or("white", |c| c.as_str());
                    let _ = writeln!(
                        s,
                        r#"<rect class="cell {class}" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="{}"><title>θ={deg_t}° φ={deg_p}° QVF={q:.4} n={}</title></rect>"#,
                        color(q),
                        map.count(ti, pj)
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        r#"<rect class="cell absent" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="url(#hatch)"><title>θ={deg_t}° φ={deg_p}° no data</title></rect>"#
                    );
                }
            }
        }
    }
    s.push_str("</g>\n");
    let _ = writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{grid_w}" height="{grid_h}" fill="none" stroke="#333"/>"##);
    if opts.markers {
        s.push_str("<g class=\"markers\">\n");
        for (label, ti, pj) in [("T", 0, 3), ("S", 0, 6), ("Z", 0, 12), ("X", 12, 12)] {
            let (x, y) = cell_origin(ti, pj);
            let _ = writeln!(
                s,
                r##"<rect class="marker" x="{x}" y="{y}" width="{CELL}" height="{CELL}" fill="none" stroke="#000" stroke-width="2"/><text class="marker-label" x="{}" y="{}" text-anchor="middle" font-weight="bold">{label}</text>"##,
                x + CELL / 2,
                y + CELL / 2 + 4
            );
        }
        s.push_str("</g>\n");
    }
    // Axes: φ ticks every 90°, θ ticks every 45°, at cell centers.
    let bottom = TOP + grid_h;
    for (pj, label) in [(0, "0"), (6, "π/2"), (12, "π"), (18, "3π/2")] {
        let x = LEFT + pj * CELL + CELL / 2;
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{label}</text>"#, bottom + 16);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">φ</text>"#, LEFT + grid_w / 2, bottom + 40);
    for (ti, label) in [(0, "0"), (3, "π/4"), (6, "π/2"), (9, "3π/4"), (12, "π")] {
        let y = cell_origin(ti, 0).1 + CELL / 2 + 4;
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{label}</text>"#, LEFT - 6);
    }
    let _ = writeln!(s, r#"<text x="16" y="{}" text-anchor="middle">θ</text>"#, TOP + grid_h / 2);
    // Legend: a vertical ramp from 0 (bottom) to 1 (top).
    let lx = LEFT + grid_w + 24;
    let steps = 20;
    let step_h = grid_h / steps;
    for k in 0..steps {
        let q = (k as f64 + 0.5) / steps as f64;
        let y = TOP + grid_h - (k + 1) * step_h;
        let _ = writeln!(s, r#"<rect class="legend" x="{lx}" y="{y}" width="16" height="{step_h}" fill="{}"/>"#, color(q));
    }
    for (q, label) in [(0.0, "0"), (0.45, "0.45"), (0.55, "0.55"), (1.0, "1")] {
        let y = TOP + grid_h - (q * (steps * step_h) as f64).round() as usize;
        let _ = writeln!(s, r#"<text x="{}" y="{}">{label}</text>"#, lx + 22, y + 4);
    }
    let _ = writeln!(s, r#"<text x="{lx}" y="{}">QVF</text>"#, TOP - 8);
    s.push_str("</svg>\n");
    s
}
