use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::AngleSystem;
use crate::circle::{Angle, AngleSet};
use crate::error::{AngleSystemError, DocumentError};
use crate::io::LaminationDoc;
use crate::lamination::FiniteLamination;
use crate::schema::MappingSchema;

/// One finite lamination per vertex of a mapping schema, of degree `δ(v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaLamination {
    pub schema: MappingSchema,
    pub laminations: BTreeMap<String, FiniteLamination>,
}

/// `{ "schema": <schema>, "laminations": { "v0": <lamination>, ... } }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaLaminationDoc {
    pub schema: MappingSchema,
    pub laminations: BTreeMap<String, LaminationDoc>,
}

fn same_schema(a: &MappingSchema, b: &MappingSchema) -> bool {
    a.vertices == b.vertices && a.sigma == b.sigma && a.delta == b.delta
}

/// Whether consecutive points of `class` map to consecutive points of its image.
fn consecutive(class: &AngleSet, d: u32) -> bool {
    let image = class.image(d);
    let pts = class.as_slice();
    let n = pts.len();
    (0..n).all(|i| {
        let a = pts[i].times(u64::from(d));
        let b = pts[(i + 1) % n].times(u64::from(d));
        let j = image.position(&a).expect("image point");
        image.as_slice()[(j + 1) % image.len()] == b
    })
}

impl SchemaLamination {
    pub fn new(
        schema: MappingSchema,
        laminations: BTreeMap<String, FiniteLamination>,
    ) -> Result<SchemaLamination, AngleSystemError> {
        let out = SchemaLamination { schema, laminations };
        out.check()?;
        Ok(out)
    }

    /// The trivial lamination at every vertex, supported on the root angle 0.
    pub fn trivial(schema: &MappingSchema) -> SchemaLamination {
        let zero: AngleSet = std::iter::once(Angle::zero()).collect();
        let laminations = schema
            .vertices
            .iter()
            .map(|v| {
                let lam = FiniteLamination::with_support(schema.delta_of(v), &zero, vec![]).expect("singleton");
                (v.clone(), lam)
            })
            .collect();
        SchemaLamination { schema: schema.clone(), laminations }
    }

    pub fn lamination(&self, vertex: &str) -> Option<&FiniteLamination> {
        self.laminations.get(vertex)
    }

    /// Checks degrees, unlinkedness, and that each class maps consecutively
    /// onto a class at the next vertex.
    pub fn check(&self) -> Result<(), AngleSystemError> {
        let bad = |msg: String| Err(AngleSystemError::InvalidTarget(msg));
        for v in &self.schema.vertices {
            let Some(lam) = self.laminations.get(v) else {
                return bad(format!("no lamination at vertex {v}"));
            };
            let delta = self.schema.delta_of(v);
            if lam.degree() != delta {
                return bad(format!("vertex {v} has degree {delta}, lamination has degree {}", lam.degree()));
            }
            if let Some(violation) = lam.verify().violations.first() {
                return bad(format!("vertex {v}: {violation}"));
            }
            let next = self.schema.sigma_of(v);
            let target = self
                .laminations
                .get(next)
                .ok_or_else(|| AngleSystemError::InvalidTarget(format!("no lamination at vertex {next}")))?;
            for class in lam.classes() {
                let image = class.image(delta);
                if !target.is_class(&image) {
                    return bad(format!("vertex {v}: image of {class} is not a class at {next}"));
                }
                if !consecutive(class, delta) {
                    return bad(format!("vertex {v}: {class} is not mapped consecutively"));
                }
            }
        }
        if self.laminations.len() != self.schema.vertices.len() {
            return bad("laminations at unknown vertices".into());
        }
        Ok(())
    }

    /// Each lamination restricted to the support of the matching one in `other`.
    pub fn restrict_to(&self, other: &SchemaLamination) -> SchemaLamination {
        let laminations = self
            .laminations
            .iter()
            .map(|(v, lam)| {
                let support = other.laminations.get(v).map(|l| l.support().clone()).unwrap_or_default();
                (v.clone(), lam.restrict(&support))
            })
            .collect();
        SchemaLamination { schema: self.schema.clone(), laminations }
    }

    pub fn to_doc(&self) -> SchemaLaminationDoc {
        SchemaLaminationDoc {
            schema: self.schema.clone(),
            laminations: self.laminations.iter().map(|(v, l)| (v.clone(), LaminationDoc::from_lamination(l))).collect(),
        }
    }

    pub fn from_doc(doc: &SchemaLaminationDoc) -> Result<SchemaLamination, DocumentError> {
        let laminations = doc
            .laminations
            .iter()
            .map(|(v, l)| Ok((v.clone(), l.to_lamination()?)))
            .collect::<Result<_, DocumentError>>()?;
        SchemaLamination::new(doc.schema.clone(), laminations).map_err(|e| DocumentError::Invalid(e.to_string()))
    }
}

/// A tuned lamination together with the generating classes it was built from.
#[derive(Clone, Debug)]
pub struct TuneOutput {
    pub lamination: FiniteLamination,
    /// Base classes, transported target classes and their forward images.
    pub generators: Vec<AngleSet>,
    /// Depth of the base tower that was used.
    pub depth: usize,
}

/// The smallest invariant relation containing the base lamination and the
/// target laminations transported into the critical gaps, on the forward
/// closure of the transported support and the base tower's deepest level.
///
/// When the base tower is too shallow and carries a portrait, it is deepened
/// up to `depth_budget`.
pub fn tune(
    system: &AngleSystem,
    target: &SchemaLamination,
    depth_budget: usize,
) -> Result<TuneOutput, AngleSystemError> {
    let mut deeper: Option<AngleSystem> = None;
    loop {
        let sys = deeper.as_ref().unwrap_or(system);
        match tune_at(sys, target) {
            Err(AngleSystemError::InsufficientDepth { needed, .. })
                if needed <= depth_budget && needed > sys.depth() && sys.tower().portrait().is_some() =>
            {
                let tower = sys.tower().extend_to(needed)?;
                deeper = Some(AngleSystem::from_docs(&tower, &sys.docs())?);
            }
            other => return other,
        }
    }
}

fn tune_at(sys: &AngleSystem, target: &SchemaLamination) -> Result<TuneOutput, AngleSystemError> {
    if !same_schema(sys.schema(), &target.schema) {
        return Err(AngleSystemError::SchemaMismatch(format!("expected {}, got {}", sys.schema(), target.schema)));
    }
    target.check()?;
    let d = sys.degree();
    let mut generators: Vec<AngleSet> = sys.tower().deepest().classes().to_vec();
    let mut seen: BTreeSet<AngleSet> = BTreeSet::new();
    for (v, lam) in &target.laminations {
        let gap = sys.index(v)?;
        let mut transported: BTreeMap<&Angle, AngleSet> = BTreeMap::new();
        for t in lam.support() {
            let x = sys.departure_for(gap, t)?;
            transported.insert(t, sys.class_of(&x)?);
        }
        for class in lam.classes() {
            if class.len() > 1 {
                if let Some(t) = class.iter().find(|t| sys.is_root_preimage(v, t).unwrap_or(false)) {
                    return Err(AngleSystemError::UnsupportedTarget { vertex: v.clone(), t: t.clone() });
                }
            }
            let mut set: AngleSet = class.iter().flat_map(|t| transported[t].iter().cloned()).collect();
            while seen.insert(set.clone()) {
                generators.push(set.clone());
                set = set.image(d);
            }
        }
    }
    let lamination = FiniteLamination::closure(d, &generators);
    Ok(TuneOutput { lamination, generators, depth: sys.depth() })
}

/// Pushes the classes of `lam` meeting each critical gap through the
/// internal angles of that gap.
pub fn straighten_combinatorial(
    system: &AngleSystem,
    lam: &FiniteLamination,
) -> Result<SchemaLamination, AngleSystemError> {
    let base = system.tower().deepest();
    for class in base.classes() {
        let mut owners = class.iter().filter_map(|a| lam.class_index(a));
        if let Some(first) = owners.next() {
            if owners.any(|o| o != first) {
                return Err(AngleSystemError::NotAdmissible(class.clone()));
            }
        }
    }
    let schema = system.schema().clone();
    let mut laminations = BTreeMap::new();
    for v in &schema.vertices {
        let gap = system.index(v)?;
        let mut groups: BTreeMap<usize, BTreeSet<Angle>> = BTreeMap::new();
        for x in lam.support() {
            if system.in_gap(gap, x) {
                let owner = lam.class_index(x).expect("support point");
                groups.entry(owner).or_default().insert(system.boundary_alpha(gap, x));
            }
        }
        let sets: Vec<AngleSet> = groups.into_values().map(|s| s.into_iter().collect()).collect();
        laminations.insert(v.clone(), FiniteLamination::closure(schema.delta_of(v), &sets));
    }
    Ok(SchemaLamination { schema, laminations })
}
