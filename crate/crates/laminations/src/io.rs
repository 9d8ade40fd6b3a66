//! JSON documents for laminations, towers, schemata and polynomials.
//!
//! Angles are always exact `"p/q"` strings. Polynomial coefficients are
//! decimal strings in shortest round-trip form.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::AngleSet;
use crate::dynamics::SchemaPolynomial;
use crate::error::DocumentError;
use crate::lamination::{CriticalPortrait, FiniteLamination, PuzzleTower};
use crate::schema::MappingSchema;

/// `{ "degree": d, "classes": [...], "support": [...] }`. Singleton classes
/// may be omitted; `support` is only needed for singletons.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaminationDoc {
    pub degree: u32,
    pub classes: Vec<AngleSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<AngleSet>,
}

impl LaminationDoc {
    pub fn from_lamination(lam: &FiniteLamination) -> LaminationDoc {
        let classes: Vec<AngleSet> = lam.nontrivial_classes().cloned().collect();
        let covered: usize = classes.iter().map(AngleSet::len).sum();
        let support = (covered != lam.support().len()).then(|| lam.support().clone());
        LaminationDoc { degree: lam.degree(), classes, support }
    }

    pub fn to_lamination(&self) -> Result<FiniteLamination, DocumentError> {
        Ok(match &self.support {
            Some(s) => FiniteLamination::with_support(self.degree, s, self.classes.clone())?,
            None => FiniteLamination::new(self.degree, self.classes.clone())?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelDoc {
    pub classes: Vec<AngleSet>,
}

/// `{ "degree": d, "levels": [ { "classes": [...] }, ... ], "portrait": [...] }`.
/// Level `k+1`'s support is the preimage of level `k`'s support together
/// with any listed angles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerDoc {
    pub degree: u32,
    pub levels: Vec<LevelDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub portrait: Option<Vec<AngleSet>>,
}

impl TowerDoc {
    pub fn from_tower(tower: &PuzzleTower) -> TowerDoc {
        let d = tower.degree();
        let mut levels = Vec::new();
        let mut inferred: Option<AngleSet> = None;
        for lam in tower.levels() {
            let classes = lam
                .classes()
                .iter()
                .filter(|c| c.len() > 1 || inferred.as_ref().is_none_or(|s| !s.contains(c.first().expect("non-empty"))))
                .cloned()
                .collect();
            levels.push(LevelDoc { classes });
            inferred = Some(lam.support().preimage(d));
        }
        let portrait = tower.portrait().map(|p| p.elements().to_vec());
        TowerDoc { degree: d, levels, portrait }
    }

    pub fn to_tower(&self) -> Result<PuzzleTower, DocumentError> {
        if self.levels.is_empty() {
            return Err(DocumentError::Invalid("a tower needs at least one level".into()));
        }
        let tower = PuzzleTower::from_classes(self.degree, self.levels.iter().map(|l| l.classes.clone()).collect())?;
        Ok(match &self.portrait {
            Some(elements) => tower.with_portrait(CriticalPortrait::new(self.degree, elements.clone())?)?,
            None => tower,
        })
    }
}

/// Either kind of lamination document, told apart by its fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LaminationInput {
    Tower(TowerDoc),
    Lamination(LaminationDoc),
}

impl LaminationInput {
    /// A single lamination is read as a depth-0 tower.
    pub fn to_tower(&self) -> Result<PuzzleTower, DocumentError> {
        match self {
            LaminationInput::Tower(t) => t.to_tower(),
            LaminationInput::Lamination(l) => Ok(PuzzleTower::from_level0(l.to_lamination()?)),
        }
    }
}

/// `{ "schema": <schema>, "coefficients": { "v0": [["re","im"], ...] } }`,
/// coefficients listed from `z^{δ-2}` down to `z^0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialDoc {
    pub schema: MappingSchema,
    pub coefficients: BTreeMap<String, Vec<[String; 2]>>,
}

fn parse_float(s: &str) -> Result<f64, DocumentError> {
    let x: f64 = s.trim().parse().map_err(|_| DocumentError::Invalid(format!("not a number: {s:?}")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(DocumentError::Invalid(format!("non-finite coefficient {s:?}")))
    }
}

impl PolynomialDoc {
    pub fn from_polynomial(f: &SchemaPolynomial) -> PolynomialDoc {
        let coefficients = f
            .schema()
            .vertices
            .iter()
            .map(|v| {
                let cs = f.coefficients(v).unwrap_or(&[]);
                (v.clone(), cs.iter().map(|c| [format!("{:?}", c.re), format!("{:?}", c.im)]).collect())
            })
            .collect();
        PolynomialDoc { schema: f.schema().clone(), coefficients }
    }

    pub fn to_polynomial(&self) -> Result<SchemaPolynomial, DocumentError> {
        let mut coefficients = BTreeMap::new();
        for (v, cs) in &self.coefficients {
            let parsed = cs
                .iter()
                .map(|[re, im]| Ok(Complex64::new(parse_float(re)?, parse_float(im)?)))
                .collect::<Result<Vec<_>, DocumentError>>()?;
            coefficients.insert(v.clone(), parsed);
        }
        Ok(SchemaPolynomial::new(self.schema.clone(), coefficients)?)
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

pub fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, DocumentError> {
    Ok(serde_json::from_str(text)?)
}
