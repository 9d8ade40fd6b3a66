use std::path::Path;

use image::{Rgb, RgbImage};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{RayTrace, SchemaPolynomial};
use crate::error::RenderError;

/// Anchor colors of the escape-time palette, cycled every `PALETTE_PERIOD` iterations.
const PALETTE: [[u8; 3]; 6] =
    [[13, 8, 135], [126, 3, 168], [204, 71, 120], [248, 149, 64], [240, 249, 33], [255, 255, 255]];
const PALETTE_PERIOD: f64 = 24.0;
const INTERIOR: [u8; 3] = [0, 0, 0];
const RAY_COLOR: [u8; 3] = [230, 20, 20];
const EQUIPOTENTIAL_COLOR: [u8; 3] = [40, 120, 230];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coloring {
    /// Escape time with a fractional correction, through a fixed palette.
    Smooth,
    /// Escaping points white, the rest black.
    Binary,
}

/// A polyline drawn over one vertex's panel.
#[derive(Clone, Debug, PartialEq)]
pub struct Overlay {
    pub vertex: String,
    pub points: Vec<Complex64>,
    pub color: [u8; 3],
}

impl Overlay {
    pub fn ray(trace: &RayTrace) -> Overlay {
        Overlay { vertex: trace.vertex.clone(), points: trace.points.clone(), color: RAY_COLOR }
    }

    pub fn equipotential(vertex: &str, points: Vec<Complex64>) -> Overlay {
        let mut points = points;
        if let Some(first) = points.first().copied() {
            points.push(first);
        }
        Overlay { vertex: vertex.to_string(), points, color: EQUIPOTENTIAL_COLOR }
    }

    /// Reads a ray export (`potential,re,im` with a header line) as a ray overlay.
    pub fn from_csv(vertex: &str, text: &str) -> Result<Overlay, RenderError> {
        let mut points = Vec::new();
        for (n, line) in text.lines().enumerate().skip(1) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let parse = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
            match fields.as_slice() {
                [_, re, im] => match (parse(re), parse(im)) {
                    (Some(re), Some(im)) => points.push(Complex64::new(re, im)),
                    _ => return Err(RenderError::InvalidSpec(format!("line {}: bad coordinates", n + 1))),
                },
                _ => return Err(RenderError::InvalidSpec(format!("line {}: expected 3 fields", n + 1))),
            }
        }
        Ok(Overlay { vertex: vertex.to_string(), points, color: RAY_COLOR })
    }
}

/// A square viewport rendered once per vertex, panels left to right in
/// vertex order.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterSpec {
    pub center: Complex64,
    pub width: f64,
    /// Side of each panel in pixels.
    pub pixels: u32,
    pub max_iter: usize,
    pub coloring: Coloring,
    pub overlays: Vec<Overlay>,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl RasterSpec {
    pub fn new(center: Complex64, width: f64, pixels: u32) -> RasterSpec {
        RasterSpec {
            center,
            width,
            pixels,
            max_iter: 500,
            coloring: Coloring::Smooth,
            overlays: Vec::new(),
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        let bad = |m: &str| Err(RenderError::InvalidSpec(m.to_string()));
        if self.pixels == 0 {
            return bad("resolution must be positive");
        }
        if !(self.width.is_finite() && self.width > 0.0) {
            return bad("viewport width must be positive and finite");
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return bad("viewport center must be finite");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive");
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive");
        }
        Ok(())
    }

    fn pixel_size(&self) -> f64 {
        self.width / f64::from(self.pixels)
    }

    /// Point at the center of pixel `(i, j)` of a panel.
    fn point(&self, i: u32, j: u32) -> Complex64 {
        let h = self.pixel_size();
        Complex64::new(
            self.center.re - self.width / 2.0 + (f64::from(i) + 0.5) * h,
            self.center.im + self.width / 2.0 - (f64::from(j) + 0.5) * h,
        )
    }

    /// Continuous pixel coordinates of `z` within a panel.
    fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let h = self.pixel_size();
        ((z.re - self.center.re + self.width / 2.0) / h, (self.center.im + self.width / 2.0 - z.im) / h)
    }
}

fn palette(s: f64) -> [u8; 3] {
    let n = PALETTE.len() as f64;
    let pos = (s / PALETTE_PERIOD).rem_euclid(1.0) * n;
    let i = pos.floor() as usize % PALETTE.len();
    let j = (i + 1) % PALETTE.len();
    let t = pos - pos.floor();
    let mut out = [0u8; 3];
    for k in 0..3 {
        let v = f64::from(PALETTE[i][k]) * (1.0 - t) + f64::from(PALETTE[j][k]) * t;
        out[k] = v.round() as u8;
    }
    out
}

fn pixel_color(f: &SchemaPolynomial, vertex: &str, z0: Complex64, spec: &RasterSpec, radius: f64) -> [u8; 3] {
    let schema = f.schema();
    let mut v = vertex;
    let mut z = z0;
    for n in 0..spec.max_iter {
        let r = z.norm();
        if r > radius {
            return match spec.coloring {
                Coloring::Binary => [255, 255, 255],
                Coloring::Smooth => {
                    let delta = f64::from(schema.delta_of(v).max(2));
                    let frac = ((r.ln() / radius.ln()).ln() / delta.ln()).clamp(0.0, 1.0);
                    palette(n as f64 + 1.0 - frac)
                }
            };
        }
        let (w, _) = f.eval_with_derivative(v, z);
        v = schema.sigma_of(v);
        z = w;
    }
    INTERIOR
}

/// Clips the segment `p → q` to the box `[lo, hi]²`.
fn clip(p: (f64, f64), q: (f64, f64), lo: f64, hi: f64) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (q.0 - p.0, q.1 - p.1);
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    for (den, num) in [(-dx, p.0 - lo), (dx, hi - p.0), (-dy, p.1 - lo), (dy, hi - p.1)] {
        if den == 0.0 {
            if num < 0.0 {
                return None;
            }
        } else {
            let t = num / den;
            if den < 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
    }
    (t0 <= t1).then_some(((p.0 + t0 * dx, p.1 + t0 * dy), (p.0 + t1 * dx, p.1 + t1 * dy)))
}

fn draw_overlay(img: &mut RgbImage, spec: &RasterSpec, panel: u32, overlay: &Overlay) {
    let side = f64::from(spec.pixels);
    let offset = panel * spec.pixels;
    let mut plot = |x: f64, y: f64| {
        let (i, j) = (x.floor(), y.floor());
        if i >= 0.0 && j >= 0.0 && i < side && j < side {
            img.put_pixel(offset + i as u32, j as u32, Rgb(overlay.color));
        }
    };
    let finite: Vec<(f64, f64)> =
        overlay.points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()).map(|&z| spec.to_pixel(z)).collect();
    if let [only] = finite.as_slice() {
        plot(only.0, only.1);
    }
    for w in finite.windows(2) {
        let Some((a, b)) = clip(w[0], w[1], -1.0, side + 1.0) else { continue };
        let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()) * 2.0).ceil().max(1.0) as usize;
        for s in 0..=steps {
            let t = s as f64 / steps as f64;
            plot(a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
        }
    }
}

/// Escape-time picture of every fiber of `f`, with overlays drawn on top in
/// the order given. Rows are computed in parallel; pixels do not depend on
/// the number of workers.
pub fn julia_raster(f: &SchemaPolynomial, spec: &RasterSpec) -> Result<RgbImage, RenderError> {
    spec.validate()?;
    let vertices = f.schema().vertices.clone();
    for o in &spec.overlays {
        if !vertices.contains(&o.vertex) {
            return Err(RenderError::InvalidSpec(format!("overlay on unknown vertex {:?}", o.vertex)));
        }
    }
    let side = spec.pixels;
    let panels = u32::try_from(vertices.len()).map_err(|_| RenderError::InvalidSpec("too many panels".into()))?;
    let radius = f.escape_radius().max(2.0) * 1e3;
    let render_rows = || -> Vec<Vec<u8>> {
        (0..side)
            .into_par_iter()
            .map(|j| {
                let mut row = Vec::with_capacity((side * panels * 3) as usize);
                for v in &vertices {
                    for i in 0..side {
                        row.extend_from_slice(&pixel_color(f, v, spec.point(i, j), spec, radius));
                    }
                }
                row
            })
            .collect()
    };
    let rows = match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RenderError::InvalidSpec(e.to_string()))?
            .install(render_rows),
        None => render_rows(),
    };
    let mut img = RgbImage::from_raw(side * panels, side, rows.concat()).expect("buffer matches dimensions");
    for o in &spec.overlays {
        let panel = vertices.iter().position(|v| *v == o.vertex).expect("checked") as u32;
        draw_overlay(&mut img, spec, panel, o);
    }
    Ok(img)
}

pub fn write_png(img: &RgbImage, path: &Path) -> Result<(), RenderError> {
    img.save_with_format(path, image::ImageFormat::Png).map_err(|e| RenderError::Output(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping() {
        assert!(clip((-10.0, -10.0), (-5.0, -5.0), 0.0, 4.0).is_none());
        let (a, b) = clip((-4.0, 2.0), (8.0, 2.0), 0.0, 4.0).unwrap();
        assert_eq!((a.0, b.0), (0.0, 4.0));
    }

    #[test]
    fn overlay_from_ray_export() {
        let o = Overlay::from_csv("v0", "potential,re,im\n1e0,2e0,-5e-1\n5e-1,1.5e0,0e0\n").unwrap();
        assert_eq!(o.points, vec![Complex64::new(2.0, -0.5), Complex64::new(1.5, 0.0)]);
        assert!(Overlay::from_csv("v0", "potential,re,im\n1,2\n").is_err());
    }

    #[test]
    fn degenerate_specs_are_rejected() {
        let f = SchemaPolynomial::quadratic(Complex64::new(0.0, 0.0));
        let mut spec = RasterSpec::new(Complex64::new(0.0, 0.0), 0.0, 8);
        assert!(julia_raster(&f, &spec).is_err());
        spec.width = 1.0;
        spec.pixels = 0;
        assert!(julia_raster(&f, &spec).is_err());
    }
}
