//! Static SVG figures.

use std::collections::BTreeSet;
use std::fmt::Write;

use manymatch_core::separator::{planar_separator, PlanarGraph};
use manymatch_core::{solve_exact, GridPoint, Instance, SolveOptions};

use crate::io::ResultRecord;
use crate::CliError;

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 24.0;

#[derive(Clone, Copy, Debug, Default)]
pub struct Layers {
    pub decomposition: bool,
    pub separator: bool,
}

struct Frame {
    unit: f64,
    delta: i64,
}

impl Frame {
    fn x(&self, p: GridPoint) -> f64 {
        MARGIN + (p.x - 1) as f64 * self.unit
    }

    /// Grid y grows upward.
    fn y(&self, p: GridPoint) -> f64 {
        MARGIN + (self.delta - p.y) as f64 * self.unit
    }
}

fn segment(svg: &mut String, f: &Frame, a: GridPoint, b: GridPoint, attrs: &str) {
    let _ = writeln!(
        svg,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {attrs}/>"#,
        f.x(a),
        f.y(a),
        f.x(b),
        f.y(b)
    );
}

pub fn render(inst: &Instance, result: Option<&ResultRecord>, layers: Layers) -> Result<String, CliError> {
    let delta = inst.delta();
    let unit = if delta > 1 { (CANVAS - 2.0 * MARGIN) / (delta - 1) as f64 } else { 1.0 };
    let f = Frame { unit, delta };
    let r = (unit * 0.18).clamp(1.5, 6.0);
    let thick = (r * 0.8).max(1.5);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    if layers.decomposition || layers.separator {
        let sol = solve_exact(inst, &SolveOptions::default())?;
        let dec = sol.decomposition.expect("exact mode keeps the decomposition");
        if layers.decomposition {
            svg.push_str("<g id=\"decomposition\">\n");
            for piece in &dec.pieces {
                segment(
                    &mut svg,
                    &f,
                    inst.point(piece.p),
                    inst.point(piece.q),
                    r##"stroke="#888" stroke-width="1" stroke-dasharray="4 3""##,
                );
            }
            svg.push_str("</g>\n");
        }
        if layers.separator && !dec.skeleton.is_empty() {
            let index = |v: usize| dec.skeleton.binary_search(&v).expect("piece endpoints are skeleton");
            let edges: BTreeSet<(usize, usize)> = dec
                .pieces
                .iter()
                .map(|p| {
                    let (a, b) = (index(p.p), index(p.q));
                    (a.min(b), a.max(b))
                })
                .collect();
            let edges: Vec<_> = edges.into_iter().collect();
            let g = PlanarGraph::new(dec.skeleton.iter().map(|&v| inst.point(v)).collect(), &edges)?;
            let sep = planar_separator(&g)?;
            svg.push_str("<g id=\"separator\">\n");
            for (set, color) in [(&sep.x, "#3a3"), (&sep.y, "#a3a"), (&sep.s, "#000")] {
                let mut ids: Vec<usize> = set.clone();
                ids.sort_unstable();
                for i in ids {
                    let p = g.point(i);
                    let _ = writeln!(
                        svg,
                        r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                        f.x(p),
                        f.y(p),
                        2.0 * r
                    );
                }
            }
            svg.push_str("</g>\n");
        }
    }

    if let Some(rec) = result {
        svg.push_str("<g id=\"matching\">\n");
        for &[i, j] in &rec.edges {
            let (Some(&a), Some(&b)) = (inst.red().get(i), inst.blue().get(j)) else {
                return Err(CliError::Input(format!("edge [{i}, {j}] out of range")));
            };
            segment(&mut svg, &f, a, b, &format!(r##"stroke="#222" stroke-width="{thick:.2}" stroke-linecap="round""##));
        }
        svg.push_str("</g>\n");
    }

    svg.push_str("<g id=\"red\">\n");
    for &p in inst.red() {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="#d22"/>"##,
            f.x(p) - r,
            f.y(p) - r,
            2.0 * r,
            2.0 * r
        );
    }
    svg.push_str("</g>\n<g id=\"blue\">\n");
    for &p in inst.blue() {
        let _ = writeln!(svg, r##"<circle cx="{:.2}" cy="{:.2}" r="{r:.2}" fill="#22d"/>"##, f.x(p), f.y(p));
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}
