//! Numerical polynomial maps over mapping schemata.
//!
//! Everything here is double precision. Angles enter as exact [`Angle`]s and
//! are converted to floats only after the exact multiplication by the degree
//! product along a fiber path.

mod rays;
mod sample;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::DynamicsError;
use crate::schema::MappingSchema;

pub use rays::{equipotential, trace_ray, RayParams, RayStatus, RayTrace};
pub use sample::{sample_lamination, SampledLamination};

/// A point `(v, z)` of the disjoint union of fibers.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberPoint {
    pub vertex: String,
    pub z: Complex64,
}

impl FiberPoint {
    pub fn new(vertex: impl Into<String>, z: Complex64) -> FiberPoint {
        FiberPoint { vertex: vertex.into(), z }
    }
}

/// Monic centered polynomials `f_v` of degree `δ(v)`, one per vertex,
/// mapping fiber `v` to fiber `σ(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemaPolynomial {
    schema: MappingSchema,
    /// Per vertex, coefficients of `z^{δ-2}, …, z^0`.
    coefficients: BTreeMap<String, Vec<Complex64>>,
    escape_radius: f64,
}

impl SchemaPolynomial {
    pub fn new(
        schema: MappingSchema,
        coefficients: BTreeMap<String, Vec<Complex64>>,
    ) -> Result<SchemaPolynomial, DynamicsError> {
        schema.validate()?;
        for v in &schema.vertices {
            let expected = schema.delta_of(v).saturating_sub(1) as usize;
            let found = coefficients.get(v).map_or(0, Vec::len);
            if found != expected {
                return Err(DynamicsError::CoefficientCount(v.clone(), found, expected));
            }
        }
        if let Some(v) = coefficients.keys().find(|v| !schema.vertices.contains(v)) {
            return Err(DynamicsError::UnknownVertex(v.clone()));
        }
        if coefficients.values().flatten().any(|c| !c.is_finite()) {
            return Err(DynamicsError::NonFinite);
        }
        let escape_radius =
            coefficients.values().map(|cs| 1.0 + cs.iter().map(|c| c.norm()).sum::<f64>()).fold(2.0, f64::max);
        Ok(SchemaPolynomial { schema, coefficients, escape_radius })
    }

    /// `z^d + c_{d-2} z^{d-2} + … + c_0` on a single self-mapped vertex `v0`.
    pub fn unicritical_like(degree: u32, coefficients: Vec<Complex64>) -> Result<SchemaPolynomial, DynamicsError> {
        let schema = MappingSchema::single(degree);
        SchemaPolynomial::new(schema, BTreeMap::from([("v0".to_string(), coefficients)]))
    }

    /// The quadratic `z^2 + c`.
    pub fn quadratic(c: Complex64) -> SchemaPolynomial {
        SchemaPolynomial::unicritical_like(2, vec![c]).expect("valid quadratic")
    }

    pub fn schema(&self) -> &MappingSchema {
        &self.schema
    }

    pub fn coefficients(&self, v: &str) -> Option<&[Complex64]> {
        self.coefficients.get(v).map(Vec::as_slice)
    }

    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    fn check_vertex(&self, v: &str) -> Result<(), DynamicsError> {
        if self.schema.delta.contains_key(v) {
            Ok(())
        } else {
            Err(DynamicsError::UnknownVertex(v.to_string()))
        }
    }

    /// `f_v(z)` and `f_v'(z)` by Horner's rule.
    pub(crate) fn eval_with_derivative(&self, v: &str, z: Complex64) -> (Complex64, Complex64) {
        let d = self.schema.delta_of(v);
        let cs = &self.coefficients[v];
        if d < 2 {
            return (z, Complex64::new(1.0, 0.0));
        }
        // Leading 1 and a zero z^{d-1} term, then the stored coefficients.
        let mut p = z;
        let mut dp = Complex64::new(1.0, 0.0);
        for c in cs {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `Σ |a_k| |z|^k` over the monomials of `f_v`, which bounds the rounding
    /// error of Horner evaluation up to a factor `δ ε`.
    pub(crate) fn magnitude(&self, v: &str, z: f64) -> f64 {
        let cs = &self.coefficients[v];
        let mut p = if self.schema.delta_of(v) < 2 { return z } else { z };
        for c in cs {
            p = p * z + c.norm();
        }
        p
    }

    pub fn evaluate(&self, point: &FiberPoint) -> Result<FiberPoint, DynamicsError> {
        self.check_vertex(&point.vertex)?;
        if !point.z.is_finite() {
            return Err(DynamicsError::NonFinite);
        }
        let (w, _) = self.eval_with_derivative(&point.vertex, point.z);
        Ok(FiberPoint::new(self.schema.sigma_of(&point.vertex), w))
    }

    /// Green potential `G(v, z)`, zero when the orbit stays within
    /// `escape_radius` for `max_iter` steps.
    pub fn potential(&self, point: &FiberPoint, max_iter: usize, escape_radius: f64) -> Result<f64, DynamicsError> {
        self.check_vertex(&point.vertex)?;
        if !point.z.is_finite() || !escape_radius.is_finite() {
            return Err(DynamicsError::NonFinite);
        }
        // Stop well before z^δ could overflow.
        const BAILOUT_LOG: f64 = 30.0;
        let mut v = point.vertex.as_str();
        let mut z = point.z;
        let mut scale = 1.0f64;
        let mut escaped = false;
        for _ in 0..max_iter {
            let r = z.norm();
            if r > escape_radius {
                escaped = true;
                if r.ln() > BAILOUT_LOG {
                    break;
                }
            }
            let (w, _) = self.eval_with_derivative(v, z);
            scale *= self.schema.delta_of(v) as f64;
            v = self.schema.sigma_of(v);
            z = w;
        }
        if !escaped && z.norm() <= escape_radius {
            return Ok(0.0);
        }
        Ok((z.norm().ln() / scale).max(0.0))
    }

    /// `G` with the default iteration cap and escape radius.
    pub fn green(&self, point: &FiberPoint) -> Result<f64, DynamicsError> {
        self.potential(point, 2000, self.escape_radius)
    }

    /// Critical points of each `f_v` with their forward orbits.
    pub fn critical_data(&self) -> Vec<CriticalOrbit> {
        let mut out = Vec::new();
        for v in &self.schema.vertices {
            for (c, residual) in self.critical_points(v) {
                let (orbit, kind) = self.follow(v, c, 200, 1e-9);
                out.push(CriticalOrbit { vertex: v.clone(), point: c, residual, orbit, kind });
            }
        }
        out
    }

    /// Roots of `f_v'` with their residuals.
    fn critical_points(&self, v: &str) -> Vec<(Complex64, f64)> {
        let d = self.schema.delta_of(v) as usize;
        if d < 2 {
            return Vec::new();
        }
        // f'(z)/d = z^{d-1} + Σ_{k=1}^{d-2} (k/d) c_k z^{k-1}, c_k stored at index d-2-k.
        let cs = &self.coefficients[v];
        let n = d - 1;
        let mut monic = vec![Complex64::new(0.0, 0.0); n];
        for k in 1..=d - 2 {
            monic[k - 1] = cs[d - 2 - k] * (k as f64 / d as f64);
        }
        let roots = if n == 1 {
            vec![-monic[0]]
        } else {
            let mut m = DMatrix::<Complex64>::zeros(n, n);
            for i in 1..n {
                m[(i, i - 1)] = Complex64::new(1.0, 0.0);
            }
            for i in 0..n {
                m[(i, n - 1)] = -monic[i];
            }
            m.schur().eigenvalues().map(|e| e.iter().copied().collect()).unwrap_or_default()
        };
        let deriv = |z: Complex64| {
            let mut p = Complex64::new(1.0, 0.0);
            let mut dp = Complex64::new(0.0, 0.0);
            for i in (0..n).rev() {
                dp = dp * z + p;
                p = p * z + monic[i];
            }
            (p, dp)
        };
        roots
            .into_iter()
            .map(|mut z| {
                for _ in 0..8 {
                    let (p, dp) = deriv(z);
                    if dp.norm() == 0.0 {
                        break;
                    }
                    z -= p / dp;
                }
                (z, deriv(z).0.norm())
            })
            .collect()
    }

    /// Iterates until escape, until the orbit returns within `tol` of an
    /// earlier point in the same fiber, or for `max_iter` steps.
    fn follow(&self, v: &str, z: Complex64, max_iter: usize, tol: f64) -> (Vec<FiberPoint>, OrbitKind) {
        let mut orbit = vec![FiberPoint::new(v, z)];
        for _ in 0..max_iter {
            let last = orbit.last().expect("non-empty");
            if last.z.norm() > self.escape_radius {
                return (orbit, OrbitKind::Escaping);
            }
            let next = self.evaluate(last).expect("finite orbit");
            if !next.z.is_finite() {
                return (orbit, OrbitKind::Escaping);
            }
            if let Some(start) = orbit.iter().position(|p| p.vertex == next.vertex && (p.z - next.z).norm() < tol) {
                let preperiod = start;
                let period = orbit.len() - start;
                orbit.push(next);
                return (orbit, OrbitKind::Cycle { preperiod, period });
            }
            orbit.push(next);
        }
        (orbit, OrbitKind::Bounded)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum OrbitKind {
    Escaping,
    Bounded,
    Cycle { preperiod: usize, period: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalOrbit {
    pub vertex: String,
    pub point: Complex64,
    /// `|f_v'(point)| / δ(v)` after polishing.
    pub residual: f64,
    pub orbit: Vec<FiberPoint>,
    pub kind: OrbitKind,
}

/// An affine change of coordinates `u = (z - shift) / scale`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineChart {
    pub scale: Complex64,
    pub shift: Complex64,
}

impl AffineChart {
    pub fn to_model(&self, z: Complex64) -> Complex64 {
        (z - self.shift) / self.scale
    }

    pub fn from_model(&self, u: Complex64) -> Complex64 {
        u * self.scale + self.shift
    }
}

/// Conjugates `p` (coefficients from the highest degree down) to a monic
/// centered polynomial. Returns the model's lower coefficients in the
/// `z^{d-2}, …, z^0` layout and the chart taking `p`'s plane to the model.
pub fn monic_centered(p: &[Complex64]) -> Result<(Vec<Complex64>, AffineChart), DynamicsError> {
    let d = p
        .len()
        .checked_sub(1)
        .filter(|&d| d >= 2)
        .ok_or_else(|| DynamicsError::InvalidParameter("need a polynomial of degree at least 2".into()))?;
    if p.iter().any(|c| !c.is_finite()) {
        return Err(DynamicsError::NonFinite);
    }
    if p[0].norm() == 0.0 {
        return Err(DynamicsError::InvalidParameter("leading coefficient is zero".into()));
    }
    let scale = (Complex64::new(1.0, 0.0) / p[0]).powf(1.0 / (d as f64 - 1.0));
    let shift = -p[1] / (p[0] * d as f64);
    // g(u) = (p(scale u + shift) - shift) / scale, expanded by repeated synthetic
    // division (Taylor shift), then rescaled.
    let mut taylor: Vec<Complex64> = p.to_vec();
    for i in 0..d {
        for j in 1..=d - i {
            let prev = taylor[j - 1];
            taylor[j] += prev * shift;
        }
    }
    // taylor[j] is now the coefficient of (z-shift)^{d-j}.
    taylor[d] -= shift;
    let mut out = Vec::with_capacity(d - 1);
    for (j, t) in taylor.iter().enumerate().take(d + 1).skip(2) {
        let power = (d - j) as i32;
        out.push(t * scale.powi(power) / scale);
    }
    Ok((out, AffineChart { scale, shift }))
}
