use num_complex::Complex64;
use petgraph::unionfind::UnionFind;

use super::rays::trace_all;
use super::{RayParams, RayStatus, SchemaPolynomial};
use crate::circle::{Angle, AngleSet};
use crate::error::DynamicsError;
use crate::lamination::{FiniteLamination, ValidationReport};

/// A lamination read off from numerically traced rays.
#[derive(Clone, Debug)]
pub struct SampledLamination {
    /// Classes on the angles whose rays landed.
    pub lamination: FiniteLamination,
    pub landings: Vec<(Angle, Complex64)>,
    /// Angles whose rays did not land, with the reason.
    pub unresolved: Vec<(Angle, RayStatus)>,
    /// Unlinkedness check of `lamination`; a violation means `ε` is too
    /// large or a trace went wrong.
    pub report: ValidationReport,
}

/// Traces the rays of `angles` from `vertex` and groups angles whose landing
/// points are chained within `eps`.
pub fn sample_lamination(
    f: &SchemaPolynomial,
    vertex: &str,
    angles: &AngleSet,
    eps: f64,
    params: &RayParams,
) -> Result<SampledLamination, DynamicsError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(DynamicsError::InvalidParameter(format!("clustering threshold {eps}")));
    }
    let traces = trace_all(f, vertex, angles.as_slice(), params)?;
    let mut landings = Vec::new();
    let mut unresolved = Vec::new();
    for t in traces {
        match (t.status, t.landing) {
            (RayStatus::Landed, Some(z)) => landings.push((t.angle, z)),
            (status, _) => unresolved.push((t.angle, status)),
        }
    }
    let support: AngleSet = landings.iter().map(|(a, _)| a.clone()).collect();
    let mut uf = UnionFind::<usize>::new(landings.len());
    for i in 0..landings.len() {
        for j in i + 1..landings.len() {
            if (landings[i].1 - landings[j].1).norm() < eps {
                uf.union(i, j);
            }
        }
    }
    let degree = f.schema().delta_of(vertex);
    let lamination = FiniteLamination::from_union_find(degree, &support, &mut uf);
    let report = lamination.verify();
    Ok(SampledLamination { lamination, landings, unresolved, report })
}
