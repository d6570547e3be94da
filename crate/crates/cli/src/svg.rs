//! SVG drawings of assembly modes: one panel per mode on a grid, all panels
//! sharing the same world-to-pixel mapping.

use std::fmt::Write;

use rpr3_core::{Geometry, RootKind};

use crate::report::SolutionEntry;

const PANEL: f64 = 320.0;
const MARGIN: f64 = 0.1;

struct Frame {
    min_x: f64,
    max_y: f64,
    scale: f64,
}

impl Frame {
    fn new(points: &[(f64, f64)]) -> Self {
        let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in points {
            lo_x = lo_x.min(x);
            hi_x = hi_x.max(x);
            lo_y = lo_y.min(y);
            hi_y = hi_y.max(y);
        }
        let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-9);
        let pad = MARGIN * span;
        let (cx, cy) = (0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y));
        let half = 0.5 * span + pad;
        Frame { min_x: cx - half, max_y: cy + half, scale: PANEL / (2.0 * half) }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.min_x) * self.scale, (self.max_y - y) * self.scale)
    }
}

fn polygon(out: &mut String, frame: &Frame, pts: &[(f64, f64)], class: &str) {
    let coords: Vec<String> = pts
        .iter()
        .map(|&p| {
            let (x, y) = frame.map(p);
            format!("{x:.3},{y:.3}")
        })
        .collect();
    let _ = writeln!(out, r#"    <polygon class="{class}" points="{}"/>"#, coords.join(" "));
}

fn line(out: &mut String, frame: &Frame, a: (f64, f64), b: (f64, f64)) {
    let (x1, y1) = frame.map(a);
    let (x2, y2) = frame.map(b);
    let _ = writeln!(out, r#"    <line class="leg" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}"/>"#);
}

pub fn render(g: &Geometry, solutions: &[SolutionEntry]) -> String {
    let base: Vec<(f64, f64)> = g.anchors().iter().map(|p| (p.x, p.y)).collect();
    let platforms: Vec<Vec<(f64, f64)>> =
        solutions.iter().map(|s| g.platform_points(&s.pose()).iter().map(|p| (p.x, p.y)).collect()).collect();
    let all: Vec<(f64, f64)> = base.iter().chain(platforms.iter().flatten()).copied().collect();
    let frame = Frame::new(&all);

    let panels = solutions.len().max(1);
    let cols = (panels as f64).sqrt().ceil() as usize;
    let rows = panels.div_ceil(cols);
    let (width, height) = (cols as f64 * PANEL, rows as f64 * PANEL);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    out.push_str(concat!(
        "  <style>\n",
        "    .base { fill: #ddd; stroke: #333; stroke-width: 1.5 }\n",
        "    .platform { fill: #9cf; stroke: #036; stroke-width: 1.5; fill-opacity: 0.7 }\n",
        "    .degenerate .platform { fill: #fc9; stroke: #930 }\n",
        "    .leg { stroke: #c00; stroke-width: 2 }\n",
        "    text { font: 12px sans-serif }\n",
        "  </style>\n",
    ));

    if solutions.is_empty() {
        out.push_str("  <g class=\"base-only\">\n");
        polygon(&mut out, &frame, &base, "base");
        let _ = writeln!(out, r#"    <text x="6" y="16">no assembly mode</text>"#);
        out.push_str("  </g>\n");
    }
    for (i, (s, platform)) in solutions.iter().zip(&platforms).enumerate() {
        let (ox, oy) = ((i % cols) as f64 * PANEL, (i / cols) as f64 * PANEL);
        let class = match s.kind {
            RootKind::GenericRoot => "assembly-mode",
            RootKind::DegenerateRoot => "assembly-mode degenerate",
        };
        let _ = writeln!(out, r#"  <g class="{class}" transform="translate({ox},{oy})">"#);
        let _ = writeln!(out, r##"    <rect width="{PANEL}" height="{PANEL}" fill="none" stroke="#999"/>"##);
        polygon(&mut out, &frame, &base, "base");
        polygon(&mut out, &frame, platform, "platform");
        for (a, b) in base.iter().zip(platform) {
            line(&mut out, &frame, *a, *b);
        }
        let _ = writeln!(
            out,
            r#"    <text x="6" y="16">{}: phi = {:.4} deg, x = {:.4}, y = {:.4}</text>"#,
            i + 1,
            s.phi_deg,
            s.x,
            s.y
        );
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    out
}
