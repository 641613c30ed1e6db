//! SVG pictures in the strip style: the equator is a horizontal line cut
//! open at `∞` (shown at both ends), the northern hemisphere above it and
//! the southern one below, every chord a half circle.

use std::fmt::Write as _;

use crate::code::Code;
use crate::error::Result;
use crate::intersect::realize;
use crate::surface::{MarkedSurface, PointKind};
use crate::tree::TreeEmbedding;

const UNIT: f64 = 14.0;
const MARGIN: f64 = 30.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

struct Frame {
    width: f64,
    height: f64,
    axis: f64,
}

impl Frame {
    fn new(s: &MarkedSurface, rise: f64) -> Self {
        let width = 2.0 * MARGIN + s.circle_len() as f64 * UNIT;
        let half = (rise + 40.0).max(80.0);
        Frame { width, height: 2.0 * half, axis: half }
    }

    fn x(&self, pos: u32) -> f64 {
        MARGIN + pos as f64 * UNIT
    }
}

fn header(out: &mut String, f: &Frame, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        f.width, f.height, f.width, f.height
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);
    let _ = writeln!(
        out,
        r##"<line class="equator" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="#000000" stroke-width="1"/>"##,
        MARGIN,
        f.axis,
        f.width - MARGIN,
        f.axis
    );
    for x in [MARGIN, f.width - MARGIN] {
        let _ = writeln!(
            out,
            r#"<text class="infinity" x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">∞</text>"#,
            x,
            f.axis - 6.0
        );
    }
}

fn points(out: &mut String, s: &MarkedSurface, f: &Frame) {
    for (i, p) in s.points().iter().enumerate() {
        let x = f.x(2 * i as u32);
        match &p.kind {
            PointKind::Infinity => {}
            PointKind::Chunk { level, .. } => {
                let _ = writeln!(
                    out,
                    r##"<circle class="chunk" data-level="{level}" data-id="{}" cx="{x:.1}" cy="{:.1}" r="2.5" fill="#000000"/>"##,
                    p.id, f.axis
                );
            }
            PointKind::VertexAnchor { address } => {
                let _ = writeln!(
                    out,
                    r##"<rect class="vertex" data-address="{address}" x="{:.1}" y="{:.1}" width="5" height="5" fill="#d62728"/>"##,
                    x - 2.5,
                    f.axis - 2.5
                );
            }
        }
    }
}

/// The equator with its marked points, and each disk `D_k` drawn as a bar
/// under the part of the equator it covers.
pub fn surface_svg(s: &MarkedSurface) -> String {
    let f = Frame::new(s, 10.0 * s.truncation() as f64);
    let mut out = String::new();
    header(&mut out, &f, "marked surface");
    points(&mut out, s, &f);
    for d in s.disks() {
        let idx: Vec<usize> = d.members.iter().filter_map(|&p| s.point_index(p)).collect();
        let y = f.axis + 10.0 * d.level as f64;
        // a disk is a run through ∞: an initial and a final stretch of the strip
        let n = s.num_points();
        let first_gap = (1..n).find(|i| !idx.contains(i)).unwrap_or(n);
        let last_gap = (1..n).rev().find(|i| !idx.contains(i)).unwrap_or(0);
        for (a, b) in [(0, first_gap - 1), (last_gap + 1, n)] {
            if a <= b {
                let _ = writeln!(
                    out,
                    r##"<line class="disk" data-level="{}" x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#888888" stroke-width="3"/>"##,
                    d.level,
                    f.x(2 * a as u32),
                    f.x(2 * b as u32)
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Draws `codes` in minimal position, one `<path class="strand">` per code.
fn strands(out: &mut String, s: &MarkedSurface, f: &Frame, codes: &[(String, &Code)]) -> Result<()> {
    let plain: Vec<Code> = codes.iter().map(|(_, c)| (*c).clone()).collect();
    let r = realize(s, &plain)?;
    let mut slot = std::collections::BTreeMap::new();
    for (&g, events) in &r.gates {
        let n = events.len() as f64;
        for (rank, e) in events.iter().enumerate() {
            let spread = if g == 0 { 0.0 } else { (rank as f64 + 1.0) / (n + 1.0) - 0.5 };
            slot.insert((e.code_index, e.stop), f.x(g) + spread * UNIT * 0.9);
        }
    }
    for (k, (label, code)) in codes.iter().enumerate() {
        let hemis: Vec<bool> = {
            let mut h = code.first;
            (0..=code.crossings.len())
                .map(|_| {
                    let north = h == crate::code::Hemisphere::N;
                    h = h.flip();
                    north
                })
                .collect()
        };
        let stops: Vec<f64> = (0..).map_while(|i| slot.get(&(k, i)).copied()).collect();
        let Some(&start) = stops.first() else { continue };
        let mut d = format!("M {start:.2} {:.2}", f.axis);
        for (i, w) in stops.windows(2).enumerate() {
            let (x1, x2) = (w[0], w[1]);
            let rad = (x2 - x1).abs() / 2.0;
            let north = hemis.get(i).copied().unwrap_or(true);
            let sweep = u8::from(north == (x2 > x1));
            let _ = write!(d, " A {rad:.2} {rad:.2} 0 0 {sweep} {x2:.2} {:.2}", f.axis);
        }
        let _ = writeln!(
            out,
            r#"<path class="strand" data-address="{label}" d="{d}" fill="none" stroke="{}" stroke-width="1.2"/>"#,
            PALETTE[k % PALETTE.len()]
        );
    }
    Ok(())
}

/// One level of the embedded tree: all points, the chunks of that level,
/// its vertices and one strand per branch.
pub fn embedding_svg(e: &TreeEmbedding) -> Result<String> {
    let s = &e.surface;
    let f = Frame::new(s, s.circle_len() as f64 * UNIT / 2.0);
    let mut out = String::new();
    header(&mut out, &f, &format!("level {} of the embedded tree", e.level));
    points(&mut out, s, &f);
    let codes: Vec<(String, &Code)> = e.branches.iter().map(|(a, c)| (a.to_string(), c)).collect();
    strands(&mut out, s, &f, &codes)?;
    out.push_str("</svg>\n");
    Ok(out)
}
