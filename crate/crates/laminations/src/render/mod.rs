//! Chord diagrams of laminations as SVG, and Julia-set rasters.

mod raster;

use std::f64::consts::PI;
use std::fmt::Write;

use crate::circle::{Angle, AngleSet};
use crate::lamination::{FiniteLamination, PuzzleTower};

pub use raster::{julia_raster, write_png, Coloring, Overlay, RasterSpec};

/// Stroke colors by the depth at which a class first appears.
const DEPTH_PALETTE: [&str; 8] =
    ["#1b3a6b", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#117a65", "#6e2c00", "#515a5a"];
const FILL: &str = "#d6e4f0";

/// The hyperbolic geodesic between two boundary points of the unit disk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geodesic {
    /// Endpoints are antipodal.
    Diameter { from: (f64, f64), to: (f64, f64) },
    /// Arc of the circle with this center and radius, orthogonal to the unit circle.
    Arc { from: (f64, f64), to: (f64, f64), center: (f64, f64), radius: f64 },
}

fn boundary_point(turns: f64) -> (f64, f64) {
    let t = 2.0 * PI * turns;
    (t.cos(), t.sin())
}

/// Geodesic between the boundary points at `a` and `b` turns.
pub fn geodesic(a: f64, b: f64) -> Geodesic {
    let from = boundary_point(a);
    let to = boundary_point(b);
    let sep = (b - a).rem_euclid(1.0);
    // Half the angular separation along the shorter arc.
    let half = PI * sep.min(1.0 - sep);
    if (sep - 0.5).abs() < 1e-12 {
        return Geodesic::Diameter { from, to };
    }
    let mid = if sep <= 0.5 { a + sep / 2.0 } else { b + (1.0 - sep) / 2.0 };
    let dist = 1.0 / half.cos();
    let (cx, cy) = boundary_point(mid);
    Geodesic::Arc { from, to, center: (dist * cx, dist * cy), radius: half.tan() }
}

/// Chords, filled polygons and labels of a lamination picture.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiskDiagram {
    /// Non-trivial classes with the depth at which each first appears.
    pub classes: Vec<(AngleSet, usize)>,
    pub labels: Vec<Angle>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    pub size: u32,
    pub stroke_width: f64,
    /// Fill classes of three or more angles.
    pub fill: bool,
    /// Write the angle of every labelled point next to the circle.
    pub labels: bool,
}

impl Default for SvgStyle {
    fn default() -> SvgStyle {
        SvgStyle { size: 512, stroke_width: 1.0, fill: true, labels: false }
    }
}

impl DiskDiagram {
    pub fn from_lamination(lam: &FiniteLamination) -> DiskDiagram {
        DiskDiagram { classes: lam.nontrivial_classes().map(|c| (c.clone(), 0)).collect(), labels: Vec::new() }
    }

    /// Classes of the deepest level, colored by the level where each appears.
    pub fn from_tower(tower: &PuzzleTower) -> DiskDiagram {
        let classes = tower
            .deepest()
            .nontrivial_classes()
            .map(|c| {
                let first = c.first().expect("non-empty");
                let depth = tower.levels().iter().position(|l| l.support().contains(first)).unwrap_or(tower.depth());
                (c.clone(), depth)
            })
            .collect();
        DiskDiagram { classes, labels: Vec::new() }
    }

    /// Labels the given angles.
    pub fn with_labels(mut self, angles: &AngleSet) -> DiskDiagram {
        self.labels = angles.iter().cloned().collect();
        self
    }

    pub fn to_svg(&self, style: &SvgStyle) -> String {
        let s = f64::from(style.size);
        let c = s / 2.0;
        let r = s * 0.45;
        let px = |(x, y): (f64, f64)| (c + r * x, c - r * y);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
            style.size
        );
        let _ = writeln!(out, r#"<rect width="{0}" height="{0}" fill="white"/>"#, style.size);
        let _ = writeln!(
            out,
            r#"<circle cx="{c:.6}" cy="{c:.6}" r="{r:.6}" fill="none" stroke="black" stroke-width="{:.3}"/>"#,
            style.stroke_width
        );
        for (class, depth) in &self.classes {
            let pts: Vec<f64> = class.iter().map(Angle::to_f64).collect();
            let n = pts.len();
            let (x0, y0) = px(boundary_point(pts[0]));
            let mut d = format!("M {x0:.6} {y0:.6}");
            // Two angles give one chord; more give a closed polygon.
            let edges = if n == 2 { 1 } else { n };
            for i in 0..edges {
                let (a, b) = (pts[i], pts[(i + 1) % n]);
                match geodesic(a, b) {
                    Geodesic::Diameter { to, .. } => {
                        let (x, y) = px(to);
                        let _ = write!(d, " L {x:.6} {y:.6}");
                    }
                    Geodesic::Arc { from, to, center, radius } => {
                        let (p, q, k) = (px(from), px(to), px(center));
                        let cross = (p.0 - k.0) * (q.1 - k.1) - (p.1 - k.1) * (q.0 - k.0);
                        let sweep = u8::from(cross > 0.0);
                        let rr = radius * r;
                        let _ = write!(d, " A {rr:.6} {rr:.6} 0 0 {sweep} {:.6} {:.6}", q.0, q.1);
                    }
                }
            }
            let fill = if n > 2 && style.fill { FILL } else { "none" };
            if n > 2 {
                d.push_str(" Z");
            }
            let _ = writeln!(
                out,
                r#"<path d="{d}" fill="{fill}" stroke="{}" stroke-width="{:.3}"/>"#,
                DEPTH_PALETTE[depth % DEPTH_PALETTE.len()],
                style.stroke_width
            );
        }
        if style.labels {
            for a in &self.labels {
                let (x, y) = px(boundary_point(a.to_f64()));
                let (lx, ly) = (c + (x - c) * 1.08, c + (y - c) * 1.08);
                let _ = writeln!(
                    out,
                    r#"<text x="{lx:.3}" y="{ly:.3}" font-size="{:.1}" text-anchor="middle" dominant-baseline="middle">{a}</text>"#,
                    s / 40.0
                );
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

/// SVG chord diagram of a single lamination.
pub fn lamination_svg(lam: &FiniteLamination, style: &SvgStyle) -> String {
    DiskDiagram::from_lamination(lam).to_svg(style)
}

/// SVG chord diagram of a tower's deepest level, colored by depth.
pub fn tower_svg(tower: &PuzzleTower, style: &SvgStyle) -> String {
    DiskDiagram::from_tower(tower).to_svg(style)
}
