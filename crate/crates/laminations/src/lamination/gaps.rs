//! Critical-orbit gaps seen through a finite tower, and the predicates that
//! depend on them.

use std::collections::BTreeSet;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::pieces::{inventory_of, Piece, PuzzleView};
use super::{FiniteLamination, PuzzleTower};
use crate::circle::{orbit, Angle, AngleSet};
use crate::error::LaminationError;

/// Forward images beyond depth 0 are tracked for at most this many extra steps.
const EXTRA_STEPS: usize = 64;

/// The forward image of a deep piece: a single piece while depth remains,
/// then a set of depth-0 pieces.
#[derive(Clone, Debug, PartialEq, Eq)]
enum OrbitSet {
    Single { depth: usize, piece: usize },
    Base(BTreeSet<usize>),
}

impl PuzzleView {
    fn step(&self, s: &OrbitSet) -> OrbitSet {
        match s {
            OrbitSet::Single { depth, piece } if *depth > 0 => {
                OrbitSet::Single { depth: depth - 1, piece: self.level(*depth).images()[*piece] }
            }
            OrbitSet::Single { piece, .. } => OrbitSet::Base(self.image_set0(*piece).into_iter().collect()),
            OrbitSet::Base(set) => OrbitSet::Base(set.iter().flat_map(|&p| self.image_set0(p)).collect()),
        }
    }

    /// Whether the deepest-level piece `q` lies inside `s`.
    fn set_contains(&self, s: &OrbitSet, q: usize) -> bool {
        let k = self.depth();
        match s {
            OrbitSet::Single { depth, piece } => self.ancestor(k, q, *depth) == *piece,
            OrbitSet::Base(set) => set.contains(&self.ancestor(k, q, 0)),
        }
    }

    /// Forward images of deepest-level piece `q` for steps `0..=n`.
    fn forward_sets(&self, q: usize, n: usize) -> Vec<OrbitSet> {
        let mut out = vec![OrbitSet::Single { depth: self.depth(), piece: q }];
        for _ in 0..n {
            let next = self.step(out.last().expect("non-empty"));
            out.push(next);
        }
        out
    }

    fn step_limit(&self) -> usize {
        self.depth() + EXTRA_STEPS
    }

    /// Deepest-level pieces inside `s` whose image after `steps` contains
    /// `target`, best candidate first.
    fn chain_candidate(&self, s: &OrbitSet, steps: usize, target: usize) -> Option<usize> {
        let level = self.level(self.depth());
        (0..level.pieces().len())
            .filter(|&q| self.set_contains(s, q))
            .filter(|&q| {
                let sets = self.forward_sets(q, steps);
                self.set_contains(&sets[steps], target)
            })
            .max_by(|&a, &b| level.piece(a).degree.cmp(&level.piece(b).degree).then(b.cmp(&a)))
    }

    /// The cycle through critical piece `p`, if its orbit returns within
    /// `max_period` steps and every member can be chosen.
    fn try_cycle(&self, p: usize, sets: &[OrbitSet], max_period: usize) -> Option<GapCycle> {
        let period = (1..=max_period).find(|&j| self.set_contains(&sets[j], p))?;
        let mut members = vec![p];
        for (j, set) in sets.iter().enumerate().take(period).skip(1) {
            members.push(self.chain_candidate(set, period - j, p)?);
        }
        Some(GapCycle { members })
    }

    /// The tail from `p` to the first of `cycles` its orbit meets.
    fn try_tail(&self, p: usize, sets: &[OrbitSet], cycles: &[GapCycle]) -> Option<GapTail> {
        let (j, c, pos) = (1..sets.len()).find_map(|j| {
            cycles.iter().enumerate().find_map(|(c, cycle)| {
                cycle.members.iter().position(|&m| self.set_contains(&sets[j], m)).map(|pos| (j, c, pos))
            })
        })?;
        let target = cycles[c].members[pos];
        let mut members = vec![p];
        for (i, set) in sets.iter().enumerate().take(j).skip(1) {
            members.push(self.chain_candidate(set, j - i, target)?);
        }
        Some(GapTail { members, lands_on: (c, pos) })
    }

    /// Critical-orbit gaps at the deepest level.
    ///
    /// Returns that stay within the tower's depth are trusted first; images
    /// past depth 0 are coarse and only used for pieces left over.
    pub fn gap_orbits(&self) -> GapOrbits {
        let k = self.depth();
        let level = self.level(k);
        let limit = self.step_limit();
        let mut pending: Vec<(usize, Vec<OrbitSet>)> = (0..level.pieces().len())
            .filter(|&i| level.piece(i).degree > 1)
            .map(|p| (p, self.forward_sets(p, limit)))
            .collect();
        let mut cycles: Vec<GapCycle> = Vec::new();
        let mut tails = Vec::new();
        for max_period in [k, limit] {
            let mut in_cycle: BTreeSet<usize> = cycles.iter().flat_map(|c| c.members.iter().copied()).collect();
            for (p, sets) in &pending {
                if in_cycle.contains(p) {
                    continue;
                }
                if let Some(cycle) = self.try_cycle(*p, sets, max_period) {
                    in_cycle.extend(cycle.members.iter().copied());
                    cycles.push(cycle);
                }
            }
            pending.retain(|(p, _)| !in_cycle.contains(p));
            pending.retain(|(p, sets)| match self.try_tail(*p, sets, &cycles) {
                Some(tail) => {
                    tails.push(tail);
                    false
                }
                None => true,
            });
        }
        let unresolved = pending.into_iter().map(|(p, _)| p).collect();
        GapOrbits { depth: k, cycles, tails, unresolved }
    }
}

/// A periodic cycle of gaps, as deepest-level piece indices in orbit order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapCycle {
    pub members: Vec<usize>,
}

/// A strictly preperiodic critical gap and its orbit up to the cycle it lands on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapTail {
    pub members: Vec<usize>,
    /// `(cycle index, member index)` reached after the last tail member.
    pub lands_on: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapOrbits {
    pub depth: usize,
    pub cycles: Vec<GapCycle>,
    pub tails: Vec<GapTail>,
    /// Critical pieces whose orbit could not be followed at this depth.
    pub unresolved: Vec<usize>,
}

impl GapOrbits {
    /// Every tracked deepest-level piece.
    pub fn tracked(&self) -> BTreeSet<usize> {
        self.cycles
            .iter()
            .flat_map(|c| c.members.iter())
            .chain(self.tails.iter().flat_map(|t| t.members.iter()))
            .copied()
            .collect()
    }
}

/// A critical gap together with its orbit up to the next critical gap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalGap {
    /// Deepest-level piece index.
    pub piece: usize,
    pub degree: u32,
    /// Index of the next critical gap along the orbit.
    pub next: usize,
    /// Pieces visited from this gap (inclusive) up to the next one (exclusive).
    pub path: Vec<usize>,
    /// Whether the gap is periodic.
    pub periodic: bool,
    /// Length of the cycle the orbit ends in, counted in steps of the map.
    pub cycle_steps: usize,
}

impl CriticalGap {
    /// Steps of the map from this gap to the next critical gap.
    pub fn steps(&self) -> usize {
        self.path.len()
    }
}

impl PuzzleView {
    /// Critical gaps with their first-return data, in the order
    /// (preperiodic, cycle length, degree, key).
    pub fn critical_gaps(&self, orbits: &GapOrbits) -> Vec<CriticalGap> {
        let level = self.level(self.depth());
        let deg = |i: usize| level.piece(i).degree;
        // Orbit of each critical gap as a list of pieces, with the cycle part
        // appended once so that the next critical gap is always reached.
        let mut starts: Vec<(usize, bool, usize, Vec<usize>)> = Vec::new();
        for cycle in &orbits.cycles {
            let n = cycle.members.len();
            for (pos, &m) in cycle.members.iter().enumerate() {
                if deg(m) > 1 {
                    let walk: Vec<usize> = (0..=n).map(|s| cycle.members[(pos + s) % n]).collect();
                    starts.push((m, true, n, walk));
                }
            }
        }
        for tail in &orbits.tails {
            let cycle = &orbits.cycles[tail.lands_on.0];
            let n = cycle.members.len();
            let mut walk = tail.members.clone();
            walk.extend((0..=n).map(|s| cycle.members[(tail.lands_on.1 + s) % n]));
            starts.push((tail.members[0], false, n, walk));
        }
        let key = |i: usize| level.piece(i).key().cloned();
        starts.sort_by_key(|s| (!s.1, s.2, deg(s.0), key(s.0)));
        starts.dedup_by_key(|s| s.0);
        let index_of = |piece: usize| starts.iter().position(|s| s.0 == piece);
        starts
            .iter()
            .map(|(piece, periodic, n, walk)| {
                let steps = (1..walk.len())
                    .find(|&s| deg(walk[s]) > 1 && index_of(walk[s]).is_some())
                    .expect("orbit reaches a critical gap");
                CriticalGap {
                    piece: *piece,
                    degree: deg(*piece),
                    next: index_of(walk[steps]).expect("critical gap"),
                    path: walk[..steps].to_vec(),
                    periodic: *periodic,
                    cycle_steps: *n,
                }
            })
            .collect()
    }
}

/// Degrees the critical gaps are expected to have, e.g. from a mapping schema.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeparationHint {
    pub degrees: Vec<u32>,
}

/// Smallest depth at which every piece containing a tracked gap already has
/// the gap's degree.
pub fn separation_depth(tower: &PuzzleTower, hint: Option<&SeparationHint>) -> Result<Option<usize>, LaminationError> {
    let view = PuzzleView::new(tower)?;
    Ok(separation_depth_of(&view, hint))
}

pub(crate) fn separation_depth_of(view: &PuzzleView, hint: Option<&SeparationHint>) -> Option<usize> {
    let orbits = view.gap_orbits();
    if !orbits.unresolved.is_empty() {
        return None;
    }
    let k = view.depth();
    let level = view.level(k);
    let tracked = orbits.tracked();
    if let Some(hint) = hint {
        let mut found: Vec<u32> = tracked.iter().map(|&i| level.piece(i).degree).filter(|&d| d > 1).collect();
        let mut expected: Vec<u32> = hint.degrees.iter().copied().filter(|&d| d > 1).collect();
        found.sort_unstable();
        expected.sort_unstable();
        if found != expected {
            return None;
        }
    }
    (0..=k).find(|&j| {
        tracked.iter().all(|&i| {
            let a = view.ancestor(k, i, j);
            view.level(j).piece(a).degree == level.piece(i).degree
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum PrimitivityReport {
    /// No witness exists among classes of depth at most `depth`.
    PrimitiveToDepth { depth: usize },
    /// `class` touches the boundaries of two distinct critical-orbit gaps.
    Witness { class: AngleSet, generated: AngleSet, pieces: (Piece, Piece) },
}

/// Searches for a class touching two distinct critical-orbit gaps.
pub fn primitivity_check(tower: &PuzzleTower, depth: usize) -> Result<PrimitivityReport, LaminationError> {
    let tower = tower.truncate(depth)?;
    let view = PuzzleView::new(&tower)?;
    let orbits = view.gap_orbits();
    let level = view.level(depth);
    let tracked: Vec<usize> = orbits.tracked().into_iter().collect();
    for class in level.lamination().nontrivial_classes() {
        let touching: Vec<usize> = tracked.iter().copied().filter(|&i| level.piece(i).is_bounded_by(class)).collect();
        if touching.len() >= 2 {
            let generated = generated_classes(&tower, class)
                .lamination
                .class_of(class.first().expect("non-empty"))
                .cloned()
                .unwrap_or_else(|| class.clone());
            return Ok(PrimitivityReport::Witness {
                class: class.clone(),
                generated,
                pieces: (level.piece(touching[0]).clone(), level.piece(touching[1]).clone()),
            });
        }
    }
    Ok(PrimitivityReport::PrimitiveToDepth { depth })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum ObstructionReport {
    Clear {
        depth: usize,
    },
    /// A many-to-one class on the boundary of a critical-orbit gap.
    Witness {
        class: AngleSet,
        degree: u32,
        gap: Piece,
    },
}

/// Looks for a Julia critical class on the boundary of a critical-orbit gap.
pub fn renormalizability_obstruction(tower: &PuzzleTower) -> Result<ObstructionReport, LaminationError> {
    let view = PuzzleView::new(tower)?;
    let k = view.depth();
    let level = view.level(k);
    let orbits = view.gap_orbits();
    let tracked = orbits.tracked();
    let inventory = inventory_of(level);
    for jc in &inventory.julia_classes {
        if let Some(&i) = tracked.iter().find(|&&i| level.piece(i).is_bounded_by(&jc.class)) {
            return Ok(ObstructionReport::Witness {
                class: jc.class.clone(),
                degree: jc.degree,
                gap: level.piece(i).clone(),
            });
        }
    }
    Ok(ObstructionReport::Clear { depth: k })
}

/// Classes of the lamination generated by a tower, restricted to a target set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedClasses {
    pub lamination: FiniteLamination,
    /// Targets whose orbit meets the support but which no level resolves.
    pub shallow: Vec<Angle>,
}

/// The transitive closure of all tower classes, restricted to `targets`.
pub fn generated_classes(tower: &PuzzleTower, targets: &AngleSet) -> GeneratedClasses {
    let d = tower.degree();
    let support: AngleSet = tower.levels().iter().flat_map(|l| l.support().iter().cloned()).collect();
    let mut uf = UnionFind::<usize>::new(support.len());
    for level in tower.levels() {
        for class in level.nontrivial_classes() {
            let first = support.position(class.first().expect("non-empty")).expect("in support");
            for a in class {
                uf.union(first, support.position(a).expect("in support"));
            }
        }
    }
    let closed = FiniteLamination::from_union_find(d, &support, &mut uf);
    let base = tower.levels()[0].support();
    let shallow = targets
        .iter()
        .filter(|a| !support.contains(a))
        .filter(|a| orbit(a, d).map(|o| o.trajectory.iter().any(|x| base.contains(x))).unwrap_or(false))
        .cloned()
        .collect();
    GeneratedClasses { lamination: closed.restrict(targets), shallow }
}
