//! External rays and equipotentials by Newton continuation.
//!
//! A point of potential `t` on the ray of angle `θ` from fiber `v` is found by
//! solving `f^n(z) = w`, where `w` has modulus `exp(D_n t) ≥ R0` and argument
//! `2π D_n θ`, with `D_n` the degree product along the first `n` steps of the
//! fiber path. Near infinity the Böttcher map is close to the identity, so
//! this `z` is close to the true ray point. Level `m` covers potentials
//! `T/D_{m+1} < t ≤ T/D_m` with `T = ln R0`.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SchemaPolynomial;
use crate::circle::Angle;
use crate::error::DynamicsError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayParams {
    /// Radius at which the Böttcher map is replaced by the identity.
    pub r0: f64,
    pub steps_per_level: usize,
    pub levels: usize,
    pub newton_tol: f64,
}

impl Default for RayParams {
    fn default() -> RayParams {
        RayParams { r0: 1e8, steps_per_level: 8, levels: 400, newton_tol: 1e-10 }
    }
}

impl RayParams {
    fn validate(&self) -> Result<(), DynamicsError> {
        let ok = self.r0.is_finite()
            && self.r0 > 2.0
            && self.steps_per_level > 0
            && self.levels > 0
            && self.newton_tol.is_finite()
            && self.newton_tol > 0.0;
        if ok {
            Ok(())
        } else {
            Err(DynamicsError::InvalidParameter(format!("{self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayStatus {
    Landed,
    MaxIter,
    EscapedTolerance,
    SuspectedParabolic,
}

impl fmt::Display for RayStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RayStatus::Landed => "landed",
            RayStatus::MaxIter => "max-iter",
            RayStatus::EscapedTolerance => "escaped-tolerance",
            RayStatus::SuspectedParabolic => "suspected-parabolic",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayTrace {
    pub vertex: String,
    pub angle: Angle,
    /// Samples ordered by strictly decreasing potential.
    pub points: Vec<Complex64>,
    pub potentials: Vec<f64>,
    pub landing: Option<Complex64>,
    pub status: RayStatus,
}

impl RayTrace {
    /// `potential,re,im` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("potential,re,im\n");
        for (t, z) in self.potentials.iter().zip(&self.points) {
            out.push_str(&format!("{t:e},{:e},{:e}\n", z.re, z.im));
        }
        out
    }
}

/// How far a continuation step may jump relative to the previous one before
/// the step is subdivided.
const JUMP_FACTOR: f64 = 8.0;
const MAX_SUBDIVISION: u32 = 14;
const MAX_NEWTON: usize = 60;

/// The fiber path from one vertex with exact angles along it.
struct Path<'a> {
    f: &'a SchemaPolynomial,
    vertices: Vec<&'a str>,
    /// `D_n θ` for each `n` computed so far.
    angles: Vec<Angle>,
    degrees: Vec<f64>,
}

impl<'a> Path<'a> {
    fn new(f: &'a SchemaPolynomial, v: &'a str, theta: &Angle) -> Path<'a> {
        Path { f, vertices: vec![v], angles: vec![theta.clone()], degrees: Vec::new() }
    }

    fn extend_to(&mut self, n: usize) {
        while self.vertices.len() <= n {
            let v = *self.vertices.last().expect("non-empty");
            let d = self.f.schema().delta_of(v);
            self.degrees.push(d as f64);
            let next = self.angles.last().expect("non-empty").times(d as u64);
            self.angles.push(next);
            self.vertices.push(self.f.schema().sigma_of(v));
        }
    }

    fn degree(&mut self, m: usize) -> f64 {
        self.extend_to(m + 1);
        self.degrees[m]
    }

    /// `f^n(z)`, its derivative and a running bound on the rounding error
    /// of the computed value.
    fn iterate(&mut self, n: usize, z: Complex64) -> (Complex64, Complex64, f64) {
        self.extend_to(n);
        let mut w = z;
        let mut dw = Complex64::new(1.0, 0.0);
        let mut err = 0.0;
        for (v, d) in self.vertices[..n].iter().zip(&self.degrees) {
            let (p, dp) = self.f.eval_with_derivative(v, w);
            err = err * dp.norm() + 2.0 * d * f64::EPSILON * self.f.magnitude(v, w.norm());
            dw *= dp;
            w = p;
        }
        (w, dw, err)
    }

    /// The target `w` in fiber `n` for log-modulus `log_w`.
    fn target(&mut self, n: usize, log_w: f64) -> Complex64 {
        self.extend_to(n);
        Complex64::from_polar(log_w.exp(), std::f64::consts::TAU * self.angles[n].to_f64())
    }

    /// Damped Newton for `f^n(z) = w` from `z0`.
    fn solve(&mut self, n: usize, w: Complex64, z0: Complex64) -> Option<Complex64> {
        let mut z = z0;
        let (mut fz, mut dfz, mut err) = self.iterate(n, z);
        let mut residual = (fz - w).norm();
        for _ in 0..MAX_NEWTON {
            if dfz.norm() == 0.0 || !dfz.is_finite() {
                return None;
            }
            let mut step = (fz - w) / dfz;
            let mut accepted = false;
            for _ in 0..30 {
                let candidate = z - step;
                let (fc, dfc, ec) = self.iterate(n, candidate);
                let r = (fc - w).norm();
                if r.is_finite() && r < residual.max(f64::MIN_POSITIVE) * (1.0 - 1e-12) {
                    z = candidate;
                    fz = fc;
                    dfz = dfc;
                    err = ec;
                    residual = r;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            let scale = 1.0 + z.norm();
            if !accepted || step.norm() <= 1e-15 * scale {
                // No further progress is possible at double precision.
                break;
            }
        }
        // Either at the rounding floor of f^n or converged in the z-plane.
        let converged = residual <= 16.0 * err || residual <= 1e-12 * (1.0 + z.norm()) * dfz.norm();
        converged.then_some(z)
    }
}

/// One point of the continuation schedule.
#[derive(Clone, Copy)]
struct Node {
    t: f64,
    /// Number of iterates used for the target.
    n: usize,
    log_w: f64,
}

enum StepFailure {
    Newton,
    Jump,
}

struct Continuation<'p, 'a> {
    path: &'p mut Path<'a>,
    z: Complex64,
    node: Node,
    /// Distance moved per unit of `ln t` on the last accepted step.
    last_rate: Option<f64>,
}

impl Continuation<'_, '_> {
    /// Moves from the current node to `to`, subdividing on failure. Pushes
    /// every accepted sample.
    fn advance(&mut self, to: Node, out: &mut Vec<(f64, Complex64)>, depth: u32) -> Result<(), StepFailure> {
        let w = self.path.target(to.n, to.log_w);
        let attempt = self.path.solve(to.n, w, self.z);
        let span = (self.node.t / to.t).ln().abs().max(f64::MIN_POSITIVE);
        let jump_ok = |z: Complex64, from: Complex64, last: Option<f64>| match last {
            Some(rate) => (z - from).norm() <= JUMP_FACTOR * rate * span + 1e-13,
            None => true,
        };
        match attempt {
            Some(z) if jump_ok(z, self.z, self.last_rate) => {
                self.last_rate = Some((z - self.z).norm() / span);
                self.z = z;
                self.node = to;
                out.push((to.t, z));
                Ok(())
            }
            other => {
                if depth >= MAX_SUBDIVISION {
                    return Err(if other.is_none() { StepFailure::Newton } else { StepFailure::Jump });
                }
                let t = (self.node.t * to.t).sqrt();
                let mid = Node { t, n: to.n, log_w: to.log_w * t / to.t };
                self.advance(mid, out, depth + 1)?;
                self.advance(to, out, depth + 1)
            }
        }
    }
}

fn failure_status(e: StepFailure) -> RayStatus {
    match e {
        StepFailure::Newton => RayStatus::MaxIter,
        StepFailure::Jump => RayStatus::EscapedTolerance,
    }
}

/// Seed for the first node of level 0: `f(z) = w` with `|w| = R0^{δ_0}`.
fn seed(path: &mut Path<'_>, t: f64) -> (Node, Complex64) {
    let d0 = path.degree(0);
    let node = Node { t, n: 1, log_w: d0 * t };
    let theta = path.angles[0].to_f64();
    (node, Complex64::from_polar(t.exp(), std::f64::consts::TAU * theta))
}

/// Traces the external ray of angle `theta` from fiber `vertex`.
pub fn trace_ray(
    f: &SchemaPolynomial,
    vertex: &str,
    theta: &Angle,
    params: &RayParams,
) -> Result<RayTrace, DynamicsError> {
    params.validate()?;
    f.check_vertex(vertex)?;
    let mut path = Path::new(f, vertex, theta);
    let t0 = params.r0.ln();
    let (node, z0) = seed(&mut path, t0);
    let mut samples = Vec::new();
    let mut status = RayStatus::MaxIter;
    let mut landing = None;
    let w0 = path.target(node.n, node.log_w);
    let z_start = match path.solve(node.n, w0, z0) {
        Some(z) => z,
        None => {
            return Ok(finish(vertex, theta, samples, None, RayStatus::MaxIter));
        }
    };
    samples.push((node.t, z_start));
    let mut cont = Continuation { path: &mut path, z: z_start, node, last_rate: None };
    let mut level_start = z_start;
    let mut level_steps: Vec<f64> = Vec::new();
    let mut t_level = t0;
    let s = params.steps_per_level;
    'levels: for m in 0..params.levels {
        let d = cont.path.degree(m);
        if d < 2.0 {
            // Degree-one fibers do not lower the potential.
            continue;
        }
        for j in 1..=s {
            let frac = j as f64 / s as f64;
            let to = if j < s {
                Node { t: t_level / d.powf(frac), n: m + 1, log_w: t0 * d.powf(1.0 - frac) }
            } else {
                // Start of the next level, expressed with one more iterate.
                let next_d = cont.path.degree(m + 1);
                Node { t: t_level / d, n: m + 2, log_w: t0 * next_d }
            };
            if let Err(e) = cont.advance(to, &mut samples, 0) {
                status = failure_status(e);
                break 'levels;
            }
        }
        t_level /= d;
        let step = (cont.z - level_start).norm();
        level_steps.push(step);
        level_start = cont.z;
        if step < params.newton_tol {
            status = RayStatus::Landed;
            landing = Some(cont.z);
            break;
        }
        if m + 1 == params.levels {
            status = if decaying(&level_steps) { RayStatus::SuspectedParabolic } else { RayStatus::MaxIter };
        }
    }
    Ok(finish(vertex, theta, samples, landing, status))
}

/// True when level steps still shrink but by a ratio close to one, the
/// signature of slow parabolic convergence rather than a repelling landing
/// point that needs more levels.
fn decaying(steps: &[f64]) -> bool {
    let tail = &steps[steps.len().saturating_sub(9)..];
    if tail.len() < 3 || tail.windows(2).any(|w| w[1] > w[0]) {
        return false;
    }
    let ratio = (tail[tail.len() - 1] / tail[0]).powf(1.0 / (tail.len() - 1) as f64);
    ratio > 0.95
}

fn finish(
    vertex: &str,
    theta: &Angle,
    samples: Vec<(f64, Complex64)>,
    landing: Option<Complex64>,
    status: RayStatus,
) -> RayTrace {
    let (potentials, points) = samples.into_iter().unzip();
    RayTrace { vertex: vertex.to_string(), angle: theta.clone(), points, potentials, landing, status }
}

/// The point of potential `r` on the ray of angle `theta`.
fn equipotential_point(
    f: &SchemaPolynomial,
    vertex: &str,
    theta: &Angle,
    r: f64,
    params: &RayParams,
) -> Option<Complex64> {
    let mut path = Path::new(f, vertex, theta);
    let t0 = params.r0.ln();
    let start = t0.max(r);
    let (node, z0) = seed(&mut path, start);
    let w0 = path.target(node.n, node.log_w);
    let z = path.solve(node.n, w0, z0)?;
    if r >= t0 {
        return Some(z);
    }
    let mut cont = Continuation { path: &mut path, z, node, last_rate: None };
    let mut sink = Vec::new();
    let mut t_level = t0;
    let s = params.steps_per_level;
    for m in 0..params.levels.max(1) * 4 {
        let d = cont.path.degree(m);
        if d < 2.0 {
            continue;
        }
        for j in 1..=s {
            let frac = j as f64 / s as f64;
            let t = t_level / d.powf(frac);
            if t <= r {
                // r lies in this level: solve there with m + 1 iterates.
                let to = Node { t: r, n: m + 1, log_w: r * d * t0 / t_level };
                cont.advance(to, &mut sink, 0).ok()?;
                return Some(cont.z);
            }
            let to = if j < s {
                Node { t, n: m + 1, log_w: t0 * d.powf(1.0 - frac) }
            } else {
                let next_d = cont.path.degree(m + 1);
                Node { t, n: m + 2, log_w: t0 * next_d }
            };
            cont.advance(to, &mut sink, 0).ok()?;
        }
        t_level /= d;
    }
    None
}

/// Closed polyline of `samples` points of potential `r` at equally spaced
/// external angles, starting at angle 0.
pub fn equipotential(
    f: &SchemaPolynomial,
    vertex: &str,
    r: f64,
    samples: usize,
    params: &RayParams,
) -> Result<Vec<Complex64>, DynamicsError> {
    params.validate()?;
    f.check_vertex(vertex)?;
    if !(r.is_finite() && r > 0.0) || samples < 3 {
        return Err(DynamicsError::InvalidParameter(format!("equipotential r={r}, samples={samples}")));
    }
    let points: Vec<Option<Complex64>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let theta = Angle::new(k as u64, samples as u64).expect("nonzero denominator");
            equipotential_point(f, vertex, &theta, r, params)
        })
        .collect();
    let mut out = Vec::with_capacity(samples + 1);
    for (k, p) in points.into_iter().enumerate() {
        out.push(
            p.ok_or_else(|| DynamicsError::InvalidParameter(format!("continuation failed at angle {k}/{samples}")))?,
        );
    }
    out.push(out[0]);
    Ok(out)
}

/// Traces several rays in parallel, in input order.
pub(crate) fn trace_all(
    f: &SchemaPolynomial,
    vertex: &str,
    angles: &[Angle],
    params: &RayParams,
) -> Result<Vec<RayTrace>, DynamicsError> {
    angles.par_iter().map(|a| trace_ray(f, vertex, a, params)).collect()
}
