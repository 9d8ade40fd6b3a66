//! Internal angles on the boundaries of critical-orbit gaps, and the tuning
//! and straightening operations built on them.
//!
//! Every critical gap `v` of a hyperbolic-type lamination returns to the next
//! critical gap `σ(v)` after `n_v` steps, and that return map acts on the
//! boundary like `t ↦ δ(v) t`. A [`GapCoding`] fixes a root boundary class
//! (internal angle 0) and the `δ(v)` classes over the next gap's root, which
//! split the boundary into sectors `0..δ(v)`. The internal angle of a boundary
//! point is its sector itinerary read as a mixed-radix expansion.
//!
//! Boundary membership is decided exactly: `θ` lies on the closure of gap `v`
//! iff every forward image stays in the closure of the deepest puzzle piece
//! of the gap it should visit. This needs a tower that separates the critical
//! gaps.

mod coding;
mod tuning;

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::circle::{Angle, AngleSet};
use crate::error::AngleSystemError;
use crate::lamination::{separation_depth_of, CriticalGap, PuzzleLevel, PuzzleTower, PuzzleView};
use crate::schema::{reduce_view, MappingSchema};

pub use tuning::{straighten_combinatorial, tune, SchemaLamination, SchemaLaminationDoc, TuneOutput};

/// Upper bound on the number of candidate angles tried in one search.
const MAX_CANDIDATES: u64 = 1 << 20;

/// The internal-angle coding of one critical gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapCoding {
    pub vertex: String,
    /// Deepest-level piece index of the gap.
    pub piece: usize,
    pub degree: u32,
    /// Steps of the map until the next critical gap.
    pub steps: usize,
    pub next: String,
    pub periodic: bool,
    /// Length in steps of the cycle the gap's orbit ends in.
    pub period: usize,
    /// Boundary class with internal angle 0.
    pub root: AngleSet,
    /// The root's angle from which the boundary continues counterclockwise.
    pub root_angle: Angle,
    /// Sector start angles in counterclockwise order; `sectors[0]` is the root angle.
    pub sectors: Vec<Angle>,
}

/// `{ "gap": "v0", "root": ["1/3", "2/3"] }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodingDoc {
    pub gap: String,
    pub root: AngleSet,
}

/// Codings for every critical gap of a tower.
#[derive(Clone, Debug)]
pub struct AngleSystem {
    view: PuzzleView,
    schema: MappingSchema,
    gaps: Vec<CriticalGap>,
    codings: Vec<GapCoding>,
}

fn pow(d: u32, n: usize) -> Option<u64> {
    u64::from(d).checked_pow(u32::try_from(n).ok()?)
}

/// Whether `θ` lies on the closure of `piece`.
fn in_closure(level: &PuzzleLevel, piece: usize, theta: &Angle) -> bool {
    match level.locate(theta) {
        Some(p) => p == piece,
        None => {
            let support = level.lamination().support();
            let n = support.len();
            let pos = support.position(theta).expect("on the support");
            let before = &support.as_slice()[(pos + n - 1) % n];
            level.piece_of_arc_start(theta) == Some(piece) || level.piece_of_arc_start(before) == Some(piece)
        }
    }
}

impl AngleSystem {
    /// Codings with the default root convention everywhere.
    pub fn new(tower: &PuzzleTower) -> Result<AngleSystem, AngleSystemError> {
        AngleSystem::with_roots(tower, &BTreeMap::new())
    }

    /// Codings with the given root classes; gaps not listed use the class
    /// containing the smallest eligible angle.
    pub fn with_roots(
        tower: &PuzzleTower,
        roots: &BTreeMap<String, AngleSet>,
    ) -> Result<AngleSystem, AngleSystemError> {
        let view = PuzzleView::new(tower)?;
        if separation_depth_of(&view, None).is_none() {
            return Err(AngleSystemError::ShallowTower { depth: view.depth(), needed: view.depth() + 1 });
        }
        let (schema, gaps) = reduce_view(&view)?;
        for v in roots.keys() {
            if !schema.vertices.contains(v) {
                return Err(AngleSystemError::UnknownGap(v.clone()));
            }
        }
        let mut system = AngleSystem { view, schema, gaps, codings: Vec::new() };
        system.codings = system.build_codings(roots)?;
        Ok(system)
    }

    /// Like [`AngleSystem::with_roots`], deepening a tower that carries a
    /// portrait as far as `depth_budget` when the codings need more depth.
    pub fn with_budget(
        tower: &PuzzleTower,
        roots: &BTreeMap<String, AngleSet>,
        depth_budget: usize,
    ) -> Result<AngleSystem, AngleSystemError> {
        let mut tower = tower.clone();
        loop {
            let can_extend = tower.portrait().is_some();
            let next = match AngleSystem::with_roots(&tower, roots) {
                Err(AngleSystemError::ShallowTower { depth, .. }) if can_extend && depth < depth_budget => depth + 1,
                Err(AngleSystemError::InsufficientDepth { needed, .. })
                    if can_extend && needed <= depth_budget && needed > tower.depth() =>
                {
                    needed
                }
                other => return other,
            };
            tower = tower.extend_to(next)?;
        }
    }

    pub fn from_docs(tower: &PuzzleTower, docs: &[CodingDoc]) -> Result<AngleSystem, AngleSystemError> {
        let roots = docs.iter().map(|d| (d.gap.clone(), d.root.clone())).collect();
        AngleSystem::with_roots(tower, &roots)
    }

    pub fn docs(&self) -> Vec<CodingDoc> {
        self.codings.iter().map(|c| CodingDoc { gap: c.vertex.clone(), root: c.root.clone() }).collect()
    }

    /// Three times the longest cycle of critical gaps, in steps of the map.
    pub fn default_depth_budget(&self) -> usize {
        3 * self.codings.iter().map(|c| c.period).max().unwrap_or(1)
    }

    pub fn schema(&self) -> &MappingSchema {
        &self.schema
    }

    pub fn codings(&self) -> &[GapCoding] {
        &self.codings
    }

    pub fn coding(&self, vertex: &str) -> Result<&GapCoding, AngleSystemError> {
        Ok(&self.codings[self.index(vertex)?])
    }

    pub fn tower(&self) -> &PuzzleTower {
        self.view.tower()
    }

    pub fn depth(&self) -> usize {
        self.view.depth()
    }

    pub fn degree(&self) -> u32 {
        self.view.degree()
    }

    fn index(&self, vertex: &str) -> Result<usize, AngleSystemError> {
        self.schema
            .vertices
            .iter()
            .position(|v| v == vertex)
            .ok_or_else(|| AngleSystemError::UnknownGap(vertex.to_string()))
    }

    fn level(&self) -> &PuzzleLevel {
        self.view.level(self.view.depth())
    }

    /// Whether `θ` lies on the closure of gap `vertex`.
    pub fn on_boundary(&self, vertex: &str, theta: &Angle) -> Result<bool, AngleSystemError> {
        Ok(self.in_gap(self.index(vertex)?, theta))
    }

    fn in_gap(&self, gap: usize, theta: &Angle) -> bool {
        let level = self.level();
        let d = u64::from(self.degree());
        let mut seen = HashSet::new();
        let (mut x, mut i, mut o) = (theta.clone(), gap, 0);
        while seen.insert((x.clone(), i, o)) {
            if !in_closure(level, self.gaps[i].path[o], &x) {
                return false;
            }
            x = x.times(d);
            o += 1;
            if o == self.gaps[i].path.len() {
                i = self.gaps[i].next;
                o = 0;
            }
        }
        true
    }

    /// The class of `θ` in the deepest level, or `{θ}` when no forward image
    /// meets the support. Refuses when a deeper level would contain `θ`.
    pub fn class_of(&self, theta: &Angle) -> Result<AngleSet, AngleSystemError> {
        let lam = self.level().lamination();
        if let Some(c) = lam.class_of(theta) {
            return Ok(c.clone());
        }
        let d = u64::from(self.degree());
        let mut seen = HashSet::new();
        let mut x = theta.clone();
        let mut j = 0;
        while seen.insert(x.clone()) {
            if lam.support().contains(&x) {
                return Err(AngleSystemError::InsufficientDepth { angle: theta.clone(), needed: self.depth() + j });
            }
            x = x.times(d);
            j += 1;
        }
        Ok(std::iter::once(theta.clone()).collect())
    }

    /// Elements of `class` on the closure of gap `gap`.
    fn facing(&self, gap: usize, class: &AngleSet) -> Vec<Angle> {
        class.iter().filter(|x| self.in_gap(gap, x)).cloned().collect()
    }

    /// The element of `class` after which the gap boundary continues
    /// counterclockwise.
    fn departure(&self, gap: usize, class: &AngleSet) -> Option<Angle> {
        let facing = self.facing(gap, class);
        if facing.len() <= 1 {
            return facing.into_iter().next();
        }
        let level = self.level();
        let piece = self.gaps[gap].piece;
        facing.iter().find(|x| level.piece_of_arc_start(x) == Some(piece)).or(facing.first()).cloned()
    }

    /// Boundary angles of gap `gap` mapped to `target` by the return map.
    fn return_preimages(&self, gap: usize, target: &Angle) -> Result<Vec<Angle>, AngleSystemError> {
        let g = &self.gaps[gap];
        let count = pow(self.degree(), g.steps()).filter(|&c| c <= MAX_CANDIDATES).ok_or_else(|| {
            AngleSystemError::PeriodTooLong { vertex: self.schema.vertices[gap].clone(), steps: g.steps() }
        })?;
        let scale = BigRational::from_integer(BigInt::from(count));
        Ok((0..count)
            .map(|k| Angle::from_rational((target.value() + BigRational::from_integer(BigInt::from(k))) / &scale))
            .filter(|x| self.in_gap(gap, x))
            .collect())
    }

    /// Distinct classes of `angles`, each represented by its departure angle.
    fn group(&self, gap: usize, angles: &[Angle]) -> Result<Vec<(AngleSet, Angle)>, AngleSystemError> {
        let mut out: Vec<(AngleSet, Angle)> = Vec::new();
        for x in angles {
            let class = self.class_of(x)?;
            if out.iter().all(|(c, _)| *c != class) {
                let dep = self.departure(gap, &class).expect("class meets the gap");
                out.push((class, dep));
            }
        }
        Ok(out)
    }

    /// Boundary classes fixed by the first return of a periodic gap.
    fn fixed_classes(&self, gap: usize) -> Result<Vec<(AngleSet, Angle)>, AngleSystemError> {
        let g = &self.gaps[gap];
        let vertex = || self.schema.vertices[gap].clone();
        let count = pow(self.degree(), g.cycle_steps)
            .filter(|&c| c <= MAX_CANDIDATES)
            .ok_or_else(|| AngleSystemError::PeriodTooLong { vertex: vertex(), steps: g.cycle_steps })?;
        let denom = BigInt::from(count - 1);
        let fixed: Vec<Angle> = (0..count - 1)
            .map(|k| Angle::from_rational(BigRational::new(BigInt::from(k), denom.clone())))
            .filter(|x| self.in_gap(gap, x))
            .collect();
        self.group(gap, &fixed)
    }

    fn build_codings(&self, roots: &BTreeMap<String, AngleSet>) -> Result<Vec<GapCoding>, AngleSystemError> {
        let n = self.gaps.len();
        let names = &self.schema.vertices;
        let mut root: Vec<Option<(AngleSet, Angle)>> = vec![None; n];

        // Periodic cycles: pick a root fixed by the full return at one
        // vertex and carry it forward.
        for cycle in self.schema.cycles() {
            let idx: Vec<usize> = cycle.iter().map(|v| self.index(v).expect("schema vertex")).collect();
            let head = idx
                .iter()
                .copied()
                .find(|&i| roots.contains_key(&names[i]))
                .unwrap_or(*idx.iter().min().expect("non-empty cycle"));
            let fixed = self.fixed_classes(head)?;
            let chosen = match roots.get(&names[head]) {
                Some(given) => fixed.into_iter().find(|(c, _)| c == given).ok_or_else(|| {
                    AngleSystemError::RootNotFixed { vertex: names[head].clone(), root: given.clone() }
                })?,
                None => fixed
                    .into_iter()
                    .min_by(|a, b| a.0.first().cmp(&b.0.first()))
                    .ok_or_else(|| AngleSystemError::NoRoot { vertex: names[head].clone() })?,
            };
            let mut i = head;
            let mut angle = chosen.1;
            loop {
                let class = self.class_of(&angle)?;
                if roots.get(&names[i]).is_some_and(|given| *given != class) {
                    return Err(AngleSystemError::InconsistentCoding { vertex: names[i].clone() });
                }
                root[i] = Some((class, angle.clone()));
                angle = self.advance(i, &angle);
                i = self.gaps[i].next;
                if i == head {
                    break;
                }
            }
            if angle != root[head].as_ref().expect("set").1 {
                return Err(AngleSystemError::InconsistentCoding { vertex: names[head].clone() });
            }
        }

        // Sectors everywhere; preperiodic roots are chosen among the classes
        // over the next gap's root.
        let mut sectors: Vec<Option<Vec<(AngleSet, Angle)>>> = vec![None; n];
        while sectors.iter().any(Option::is_none) {
            let mut progressed = false;
            for i in 0..n {
                if sectors[i].is_some() {
                    continue;
                }
                let Some((_, target)) = root[self.gaps[i].next].clone() else { continue };
                let classes = self.group(i, &self.return_preimages(i, &target)?)?;
                if classes.len() != self.gaps[i].degree as usize {
                    return Err(AngleSystemError::CoRootCount {
                        vertex: names[i].clone(),
                        expected: self.gaps[i].degree as usize,
                        found: classes.len(),
                    });
                }
                match (&root[i], roots.get(&names[i])) {
                    (Some((c, _)), _) => {
                        if !classes.iter().any(|(k, _)| k == c) {
                            return Err(AngleSystemError::InconsistentCoding { vertex: names[i].clone() });
                        }
                    }
                    (None, Some(given)) => {
                        let hit = classes.iter().find(|(k, _)| k == given).ok_or_else(|| {
                            AngleSystemError::RootNotFixed { vertex: names[i].clone(), root: given.clone() }
                        })?;
                        root[i] = Some(hit.clone());
                    }
                    (None, None) => {
                        root[i] = classes.iter().min_by(|a, b| a.0.first().cmp(&b.0.first())).cloned();
                    }
                }
                sectors[i] = Some(classes);
                progressed = true;
            }
            if !progressed {
                let stuck = sectors.iter().position(Option::is_none).expect("some gap is missing");
                return Err(AngleSystemError::NoRoot { vertex: names[stuck].clone() });
            }
        }
        Ok((0..n)
            .map(|i| {
                let g = &self.gaps[i];
                let (class, angle) = root[i].clone().expect("root chosen");
                let mut starts: Vec<Angle> =
                    sectors[i].clone().expect("computed").into_iter().map(|(_, a)| a).collect();
                starts.sort_by_key(|x| angle.ccw_to(x));
                GapCoding {
                    vertex: names[i].clone(),
                    piece: g.piece,
                    degree: g.degree,
                    steps: g.steps(),
                    next: names[g.next].clone(),
                    periodic: g.periodic,
                    period: g.cycle_steps,
                    root: class,
                    root_angle: angle,
                    sectors: starts,
                }
            })
            .collect())
    }

    /// Sector of boundary angle `x` of gap `gap`.
    fn sector(&self, gap: usize, x: &Angle) -> usize {
        let c = &self.codings[gap];
        let dist = c.root_angle.ccw_to(x);
        c.sectors.iter().rposition(|p| c.root_angle.ccw_to(p) <= dist).unwrap_or(0)
    }

    /// `m_d^{n}` applied to `x`, with `n` the steps from gap `gap` to the next one.
    fn advance(&self, gap: usize, x: &Angle) -> Angle {
        let d = u64::from(self.degree());
        (0..self.gaps[gap].steps()).fold(x.clone(), |y, _| y.times(d))
    }
}
