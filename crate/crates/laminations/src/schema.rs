//! Mapping schemata `(|T|, σ, δ)`: validation, reduction from a tower, the
//! cubic classification and external markings.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circle::{preimages, Angle};
use crate::error::SchemaError;
use crate::lamination::{separation_depth_of, CriticalGap, PuzzleTower, PuzzleView, SeparationHint};

/// A finite set of vertices with a self-map `σ` and degrees `δ ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingSchema {
    pub vertices: Vec<String>,
    pub sigma: BTreeMap<String, String>,
    pub delta: BTreeMap<String, u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub return_times: Option<BTreeMap<String, u32>>,
}

impl MappingSchema {
    pub fn new(
        vertices: Vec<String>,
        sigma: BTreeMap<String, String>,
        delta: BTreeMap<String, u32>,
    ) -> Result<MappingSchema, SchemaError> {
        let schema = MappingSchema { vertices, sigma, delta, return_times: None };
        schema.validate()?;
        Ok(schema)
    }

    /// Builds a schema from `(label, σ-label, δ)` triples.
    pub fn from_triples(triples: &[(&str, &str, u32)]) -> Result<MappingSchema, SchemaError> {
        MappingSchema::new(
            triples.iter().map(|t| t.0.to_string()).collect(),
            triples.iter().map(|t| (t.0.to_string(), t.1.to_string())).collect(),
            triples.iter().map(|t| (t.0.to_string(), t.2)).collect(),
        )
    }

    /// Single vertex of degree `d` mapped to itself.
    pub fn single(d: u32) -> MappingSchema {
        MappingSchema::from_triples(&[("v0", "v0", d)]).expect("valid")
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.vertices.is_empty() {
            return Err(SchemaError::Empty);
        }
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v) {
                return Err(SchemaError::DuplicateVertex(v.clone()));
            }
            let target = self.sigma.get(v).ok_or_else(|| SchemaError::MissingVertex(v.clone(), "sigma"))?;
            if !seen.contains(target) && !self.vertices.contains(target) {
                return Err(SchemaError::MissingVertex(target.clone(), "vertices"));
            }
            match self.delta.get(v) {
                None => return Err(SchemaError::MissingVertex(v.clone(), "delta")),
                Some(0) => return Err(SchemaError::ZeroDegree(v.clone())),
                Some(_) => {}
            }
        }
        for key in self.sigma.keys().chain(self.delta.keys()) {
            if !seen.contains(key) {
                return Err(SchemaError::MissingVertex(key.clone(), "vertices"));
            }
        }
        Ok(())
    }

    pub fn sigma_of(&self, v: &str) -> &str {
        &self.sigma[v]
    }

    pub fn delta_of(&self, v: &str) -> u32 {
        self.delta[v]
    }

    pub fn is_reduced(&self) -> bool {
        self.delta.values().all(|&d| d >= 2)
    }

    /// `Σ (δ(v) - 1)`, the dimension of the space of schema polynomials.
    pub fn model_dimension(&self) -> u32 {
        self.delta.values().map(|d| d - 1).sum()
    }

    /// Vertices lying on a `σ`-cycle.
    pub fn periodic_vertices(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for v in &self.vertices {
            let mut x = v.as_str();
            for _ in 0..self.vertices.len() {
                x = self.sigma_of(x);
            }
            // After |T| steps every orbit is on its cycle.
            out.insert(x.to_string());
            let mut y = self.sigma_of(x);
            while y != x {
                out.insert(y.to_string());
                y = self.sigma_of(y);
            }
        }
        out
    }

    /// Length of the `σ`-cycle each vertex eventually reaches.
    pub fn cycle_length(&self, v: &str) -> usize {
        let mut x = v;
        for _ in 0..self.vertices.len() {
            x = self.sigma_of(x);
        }
        let mut n = 1;
        let mut y = self.sigma_of(x);
        while y != x {
            n += 1;
            y = self.sigma_of(y);
        }
        n
    }

    /// Vertices sorted by (preperiodic, cycle length, δ, label).
    pub fn canonical_order(&self) -> Vec<String> {
        let periodic = self.periodic_vertices();
        let mut v = self.vertices.clone();
        v.sort_by_key(|x| (!periodic.contains(x), self.cycle_length(x), self.delta_of(x), x.clone()));
        v
    }

    /// The same schema with vertices listed in canonical order.
    pub fn canonical(&self) -> MappingSchema {
        MappingSchema { vertices: self.canonical_order(), ..self.clone() }
    }

    /// The `σ`-cycles, each starting at its canonically smallest vertex.
    pub fn cycles(&self) -> Vec<Vec<String>> {
        let periodic = self.periodic_vertices();
        let mut done = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.canonical_order() {
            if !periodic.contains(&v) || done.contains(&v) {
                continue;
            }
            let mut cycle = vec![v.clone()];
            done.insert(v.clone());
            let mut y = self.sigma_of(&v).to_string();
            while y != v {
                done.insert(y.clone());
                cycle.push(y.clone());
                y = self.sigma_of(&y).to_string();
            }
            out.push(cycle);
        }
        out
    }

    pub fn hint(&self) -> SeparationHint {
        SeparationHint { degrees: self.vertices.iter().map(|v| self.delta_of(v)).collect() }
    }
}

impl fmt::Display for MappingSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {} (degree {}", self.sigma_of(v), self.delta_of(v))?;
            if let Some(l) = self.return_times.as_ref().and_then(|r| r.get(v)) {
                write!(f, ", return {l}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// The four reduced cubic schema types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CubicType {
    Adjacent,
    Bitransitive,
    Capture,
    Disjoint,
}

impl fmt::Display for CubicType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CubicType::Adjacent => "adjacent",
            CubicType::Bitransitive => "bitransitive",
            CubicType::Capture => "capture",
            CubicType::Disjoint => "disjoint",
        })
    }
}

pub fn classify_cubic(schema: &MappingSchema) -> Result<CubicType, SchemaError> {
    schema.validate()?;
    if let Some(v) = schema.vertices.iter().find(|v| schema.delta_of(v) < 2) {
        return Err(SchemaError::NotReduced(v.clone()));
    }
    let excess = schema.model_dimension();
    if excess != 2 {
        return Err(SchemaError::NotCubic(excess));
    }
    let vs = &schema.vertices;
    if vs.len() == 1 {
        return Ok(CubicType::Adjacent);
    }
    let (a, b) = (vs[0].as_str(), vs[1].as_str());
    Ok(match (schema.sigma_of(a) == a, schema.sigma_of(b) == b) {
        (true, true) => CubicType::Disjoint,
        (false, false) => CubicType::Bitransitive,
        _ => CubicType::Capture,
    })
}

/// A choice of angle per vertex with `δ(v) θ_v = θ_{σ(v)}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Marking {
    pub angles: BTreeMap<String, Angle>,
}

impl Marking {
    pub fn satisfies(&self, schema: &MappingSchema) -> bool {
        schema.vertices.iter().all(|v| {
            let (Some(a), Some(b)) = (self.angles.get(v), self.angles.get(schema.sigma_of(v))) else {
                return false;
            };
            a.times(schema.delta_of(v) as u64) == *b
        })
    }
}

fn lifts(theta: &Angle, delta: u32) -> Vec<Angle> {
    if delta == 1 {
        vec![theta.clone()]
    } else {
        preimages(theta, delta).expect("degree >= 2").into_vec()
    }
}

/// All external markings, sorted by their angles in canonical vertex order.
pub fn enumerate_markings(schema: &MappingSchema) -> Result<Vec<Marking>, SchemaError> {
    schema.validate()?;
    if let Some(v) = schema.vertices.iter().find(|v| schema.delta_of(v) < 2) {
        return Err(SchemaError::NotReduced(v.clone()));
    }
    let order = schema.canonical_order();
    let periodic = schema.periodic_vertices();
    // Preperiodic vertices in an order where σ(v) is always assigned first.
    let mut tree: Vec<String> = Vec::new();
    let mut placed: BTreeSet<String> = periodic.clone();
    while tree.len() + periodic.len() < order.len() {
        for v in &order {
            if !placed.contains(v) && placed.contains(schema.sigma_of(v)) {
                placed.insert(v.clone());
                tree.push(v.clone());
            }
        }
    }
    let mut partial: Vec<BTreeMap<String, Angle>> = vec![BTreeMap::new()];
    for cycle in schema.cycles() {
        let product: u64 = cycle.iter().map(|v| schema.delta_of(v) as u64).product();
        let mut next = Vec::new();
        for m in &partial {
            for j in 0..product - 1 {
                let mut m = m.clone();
                let mut theta = Angle::new(j, product - 1).expect("nonzero");
                for v in &cycle {
                    m.insert(v.clone(), theta.clone());
                    theta = theta.times(schema.delta_of(v) as u64);
                }
                next.push(m);
            }
        }
        partial = next;
    }
    for v in &tree {
        let mut next = Vec::new();
        for m in &partial {
            for theta in lifts(&m[schema.sigma_of(v)], schema.delta_of(v)) {
                let mut m = m.clone();
                m.insert(v.clone(), theta);
                next.push(m);
            }
        }
        partial = next;
    }
    let mut out: Vec<Marking> = partial.into_iter().map(|angles| Marking { angles }).collect();
    out.sort_by_key(|m| order.iter().map(|v| m.angles[v].clone()).collect::<Vec<_>>());
    Ok(out)
}

/// The reduced schema of a tower together with the critical gaps, labelled
/// `v0, v1, …` in canonical order.
pub(crate) fn reduce_view(view: &PuzzleView) -> Result<(MappingSchema, Vec<CriticalGap>), SchemaError> {
    if separation_depth_of(view, None).is_none() {
        return Err(crate::error::LaminationError::NoSeparation(view.depth()).into());
    }
    let orbits = view.gap_orbits();
    let gaps = view.critical_gaps(&orbits);
    if gaps.is_empty() {
        return Err(SchemaError::Empty);
    }
    let label = |i: usize| format!("v{i}");
    let vertices: Vec<String> = (0..gaps.len()).map(label).collect();
    let sigma = gaps.iter().enumerate().map(|(i, g)| (label(i), label(g.next))).collect();
    let delta = gaps.iter().enumerate().map(|(i, g)| (label(i), g.degree)).collect();
    let returns = gaps.iter().enumerate().map(|(i, g)| (label(i), g.steps() as u32)).collect();
    let schema = MappingSchema { vertices, sigma, delta, return_times: Some(returns) };
    schema.validate()?;
    Ok((schema, gaps))
}

/// The reduced mapping schema of the lamination approximated by `tower`.
pub fn reduce_from_tower(tower: &PuzzleTower) -> Result<MappingSchema, SchemaError> {
    let view = PuzzleView::new(tower)?;
    reduce_view(&view).map(|(s, _)| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adj() -> MappingSchema {
        MappingSchema::single(3)
    }

    fn bit() -> MappingSchema {
        MappingSchema::from_triples(&[("a", "b", 2), ("b", "a", 2)]).unwrap()
    }

    fn dis() -> MappingSchema {
        MappingSchema::from_triples(&[("a", "a", 2), ("b", "b", 2)]).unwrap()
    }

    fn cap() -> MappingSchema {
        MappingSchema::from_triples(&[("v0", "v0", 2), ("v1", "v0", 2)]).unwrap()
    }

    #[test]
    fn cubic_types() {
        assert_eq!(classify_cubic(&adj()).unwrap(), CubicType::Adjacent);
        assert_eq!(classify_cubic(&bit()).unwrap(), CubicType::Bitransitive);
        assert_eq!(classify_cubic(&dis()).unwrap(), CubicType::Disjoint);
        assert_eq!(classify_cubic(&cap()).unwrap(), CubicType::Capture);
        assert!(matches!(classify_cubic(&MappingSchema::single(2)), Err(SchemaError::NotCubic(1))));
    }

    #[test]
    fn dimensions() {
        assert_eq!(adj().model_dimension(), 2);
        assert_eq!(dis().model_dimension(), 2);
        assert_eq!(MappingSchema::single(2).model_dimension(), 1);
    }

    #[test]
    fn marking_counts() {
        let q = MappingSchema::single(4);
        let m = enumerate_markings(&q).unwrap();
        let angles: Vec<String> = m.iter().map(|m| m.angles["v0"].to_string()).collect();
        assert_eq!(angles, vec!["0", "1/3", "2/3"]);
        assert_eq!(enumerate_markings(&adj()).unwrap().len(), 2);
        assert_eq!(enumerate_markings(&bit()).unwrap().len(), 3);
        let d = enumerate_markings(&dis()).unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].angles.values().all(Angle::is_zero));
        assert_eq!(enumerate_markings(&cap()).unwrap().len(), 2);
        for s in [adj(), bit(), dis(), cap(), q] {
            assert!(enumerate_markings(&s).unwrap().iter().all(|m| m.satisfies(&s)));
        }
    }

    #[test]
    fn validation() {
        assert!(MappingSchema::from_triples(&[("a", "b", 2)]).is_err());
        assert!(MappingSchema::from_triples(&[("a", "a", 0)]).is_err());
        let unreduced = MappingSchema::from_triples(&[("a", "b", 2), ("b", "a", 1)]).unwrap();
        assert!(!unreduced.is_reduced());
        assert!(enumerate_markings(&unreduced).is_err());
        let json = r#"{"vertices":["v0","v1"],"sigma":{"v0":"v0","v1":"v0"},"delta":{"v0":2,"v1":2}}"#;
        let parsed: MappingSchema = serde_json::from_str(json).unwrap();
        assert_eq!(parsed, cap());
        assert_eq!(serde_json::to_string(&parsed).unwrap(), json);
    }

    #[test]
    fn canonical_order_puts_cycles_first() {
        let s = MappingSchema::from_triples(&[("z", "y", 2), ("y", "y", 2)]).unwrap();
        assert_eq!(s.canonical_order(), vec!["y", "z"]);
    }
}
