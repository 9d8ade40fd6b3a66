use thiserror::Error;

use crate::circle::{Angle, AngleSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircleError {
    #[error("invalid degree {0}: the angle map needs d >= 2")]
    InvalidDegree(u32),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse angle {0:?}: expected p/q")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaminationError {
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: u32 },
    #[error("empty class")]
    EmptyClass,
    #[error("angle {0} appears in two classes")]
    Overlap(Angle),
    #[error("angle {0} is outside the declared support")]
    OutsideSupport(Angle),
    #[error("depth {depth} out of range (tower depth {max})")]
    DepthOutOfRange { depth: usize, max: usize },
    #[error("tower has no levels")]
    EmptyTower,
    #[error("invalid critical portrait: {0}")]
    Portrait(String),
    #[error("tower extension refused: {0}")]
    ExtensionRefused(String),
    #[error("portrait pullback of level {depth} disagrees with level {next}", next = depth + 1)]
    PortraitInconsistent { depth: usize },
    #[error("extended tower fails validation at depth {depth}: {detail}")]
    ExtensionInvalid { depth: usize, detail: String },
    #[error("piece degree at depth {depth} is not an integer (corrupt tower)")]
    NonIntegralDegree { depth: usize },
    #[error("no separation depth up to {0}")]
    NoSeparation(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("vertex {0:?} is missing from {1}")]
    MissingVertex(String, &'static str),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("vertex {0:?} has degree 0")]
    ZeroDegree(String),
    #[error("schema is not reduced: vertex {0:?} has degree 1")]
    NotReduced(String),
    #[error("not a cubic schema: total critical excess is {0}, expected 2")]
    NotCubic(u32),
    #[error("schema has no vertices")]
    Empty,
    #[error(transparent)]
    Lamination(#[from] LaminationError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleSystemError {
    #[error("insufficient depth: angle {angle} needs a tower of depth {needed}")]
    InsufficientDepth { angle: Angle, needed: usize },
    #[error("angle {angle} is not on the boundary of gap {vertex}")]
    NotOnBoundary { vertex: String, angle: Angle },
    #[error("unknown gap {0:?}")]
    UnknownGap(String),
    #[error("gap {vertex}: expected {expected} co-roots, found {found}")]
    CoRootCount { vertex: String, expected: usize, found: usize },
    #[error("gap {vertex}: root {root} is not fixed by the return map")]
    RootNotFixed { vertex: String, root: AngleSet },
    #[error("gap {vertex}: no eligible root on the known boundary")]
    NoRoot { vertex: String },
    #[error("gap {vertex}: coding is inconsistent along the preperiodic orbit")]
    InconsistentCoding { vertex: String },
    #[error("target schema does not match the tower's schema: {0}")]
    SchemaMismatch(String),
    #[error("no boundary point of gap {vertex} has internal angle {t}")]
    NoPreimage { vertex: String, t: Angle },
    #[error("gap {vertex}: periodic search over {steps} steps exceeds the candidate limit")]
    PeriodTooLong { vertex: String, steps: usize },
    #[error("tower of depth {depth} does not separate the critical gaps; needs depth {needed}")]
    ShallowTower { depth: usize, needed: usize },
    #[error("lamination does not contain the base lamination: class {0} is split")]
    NotAdmissible(AngleSet),
    #[error("invalid schema lamination: {0}")]
    InvalidTarget(String),
    #[error(
        "internal angle {t} of gap {vertex} lies in a non-trivial class of the target; such classes are not supported"
    )]
    UnsupportedTarget { vertex: String, t: Angle },
    #[error(transparent)]
    Lamination(#[from] LaminationError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("non-finite input")]
    NonFinite,
    #[error("vertex {0:?} has {1} coefficients, expected {2}")]
    CoefficientCount(String, usize, usize),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Circle(#[from] CircleError),
    #[error(transparent)]
    Lamination(#[from] LaminationError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("invalid document: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("invalid raster spec: {0}")]
    InvalidSpec(String),
    #[error("image output failed: {0}")]
    Output(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}
