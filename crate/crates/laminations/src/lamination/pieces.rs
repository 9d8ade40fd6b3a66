use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{FiniteLamination, PuzzleTower};
use crate::circle::{Angle, AngleSet, Arc};
use crate::error::LaminationError;

/// A face of the chord diagram of `Λ_k`: a combinatorial puzzle piece.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Piece {
    pub depth: usize,
    /// Elementary arcs in boundary traversal order, starting with the arc of
    /// smallest start. Empty for the whole circle.
    pub arcs: Vec<Arc>,
    /// Classes met between consecutive arcs, in traversal order.
    pub boundary_classes: Vec<AngleSet>,
    pub degree: u32,
}

impl Piece {
    /// Total arc measure.
    pub fn measure(&self) -> BigRational {
        if self.arcs.is_empty() {
            return BigRational::one();
        }
        self.arcs.iter().map(Arc::length).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Ordering key: the smallest arc endpoint.
    pub fn key(&self) -> Option<&Angle> {
        self.arcs.first().map(|a| &a.start)
    }

    pub fn contains(&self, theta: &Angle) -> bool {
        self.arcs.is_empty() || self.arcs.iter().any(|a| a.contains(theta))
    }

    /// A point of the piece off every support.
    pub fn sample_point(&self) -> Angle {
        self.arcs.first().map(Arc::midpoint).unwrap_or_else(Angle::zero)
    }

    pub fn is_whole_circle(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Whether `class` is one of the classes bounding this piece.
    pub fn is_bounded_by(&self, class: &AngleSet) -> bool {
        self.boundary_classes.iter().any(|c| c == class)
    }
}

/// All pieces of one depth together with their place in the tower.
#[derive(Clone, Debug)]
pub struct PuzzleLevel {
    pub depth: usize,
    lamination: FiniteLamination,
    pieces: Vec<Piece>,
    arc_owner: Vec<usize>,
    parents: Vec<usize>,
    images: Vec<usize>,
    preimage_degrees: Vec<u32>,
    winding_degrees: Vec<u32>,
}

impl PuzzleLevel {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> &Piece {
        &self.pieces[i]
    }

    pub fn lamination(&self) -> &FiniteLamination {
        &self.lamination
    }

    /// Depth-`(k-1)` piece containing each piece; empty at depth 0.
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    /// Depth-`(k-1)` image piece of each piece; empty at depth 0.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Degrees obtained by counting preimage arcs; empty at depth 0.
    pub fn preimage_degrees(&self) -> &[u32] {
        &self.preimage_degrees
    }

    /// Degrees obtained from the winding of the boundary image.
    pub fn winding_degrees(&self) -> &[u32] {
        &self.winding_degrees
    }

    /// Index of the piece containing `θ`, or `None` on the support.
    pub fn locate(&self, theta: &Angle) -> Option<usize> {
        let support = self.lamination.support();
        let n = support.len();
        if n == 0 {
            return Some(0);
        }
        if support.contains(theta) {
            return None;
        }
        let arc = (support.rank(theta) + n - 1) % n;
        Some(self.arc_owner[arc])
    }

    /// Index of the piece owning the elementary arc that starts at `start`.
    pub fn piece_of_arc_start(&self, start: &Angle) -> Option<usize> {
        self.lamination.support().position(start).map(|i| self.arc_owner[i])
    }

    /// Index of the elementary arc containing `θ`, or `None` on the support.
    pub fn arc_index(&self, theta: &Angle) -> Option<usize> {
        let support = self.lamination.support();
        let n = support.len();
        if n == 0 || support.contains(theta) {
            return None;
        }
        Some((support.rank(theta) + n - 1) % n)
    }

    /// Pieces whose boundary contains `class`.
    pub fn pieces_bounded_by(&self, class: &AngleSet) -> Vec<usize> {
        (0..self.pieces.len()).filter(|&i| self.pieces[i].is_bounded_by(class)).collect()
    }
}

/// Cyclic predecessor of `e` inside its class.
pub(crate) fn prev_in_class<'a>(lam: &'a FiniteLamination, e: &Angle) -> &'a Angle {
    let class = lam.class_of(e).expect("support point");
    let s = class.as_slice();
    let i = class.position(e).expect("member");
    &s[(i + s.len() - 1) % s.len()]
}

/// Arcs of one face in traversal order, with the classes met between them.
type Face = (Vec<Arc>, Vec<AngleSet>);

/// Faces of the chord diagram: arc lists in traversal order and the owner of
/// each elementary arc.
pub(crate) fn faces(lam: &FiniteLamination) -> (Vec<Face>, Vec<usize>) {
    let support = lam.support().as_slice();
    let n = support.len();
    if n == 0 {
        return (vec![(Vec::new(), Vec::new())], Vec::new());
    }
    let next: Vec<usize> = (0..n)
        .map(|j| {
            let end = &support[(j + 1) % n];
            lam.support().position(prev_in_class(lam, end)).expect("support point")
        })
        .collect();
    let mut owner = vec![usize::MAX; n];
    let mut raw: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if owner[start] != usize::MAX {
            continue;
        }
        let id = raw.len();
        let mut cycle = Vec::new();
        let mut j = start;
        while owner[j] == usize::MAX {
            owner[j] = id;
            cycle.push(j);
            j = next[j];
        }
        raw.push(cycle);
    }
    // Each cycle already begins at its smallest arc index because arcs are
    // visited in increasing order of start.
    let out = raw
        .iter()
        .map(|cycle| {
            let arcs: Vec<Arc> =
                cycle.iter().map(|&j| Arc::new(support[j].clone(), support[(j + 1) % n].clone())).collect();
            let mut classes: Vec<AngleSet> = Vec::new();
            for a in &arcs {
                let c = lam.class_of(&a.end).expect("support point").clone();
                if !classes.contains(&c) {
                    classes.push(c);
                }
            }
            (arcs, classes)
        })
        .collect();
    (out, owner)
}

fn frac(x: BigRational) -> BigRational {
    let f = x.floor();
    x - f
}

/// Number of times the boundary of a face winds around its image.
fn winding_degree(lam: &FiniteLamination, arcs: &[Arc]) -> Option<u32> {
    let d = lam.degree();
    if arcs.is_empty() {
        return Some(d);
    }
    let dd = BigRational::from_integer(BigInt::from(d));
    let mut total = BigRational::zero();
    for arc in arcs {
        total += arc.length() * &dd;
        let b = prev_in_class(lam, &arc.end);
        total += frac((b.value() - arc.end.value()) * &dd);
    }
    if total.is_integer() {
        total.to_integer().to_u32()
    } else {
        None
    }
}

/// Pieces, their parents and their degrees.
type LevelParts = (Vec<Piece>, Vec<usize>, Vec<u32>);

fn build_level(depth: usize, lam: &FiniteLamination) -> Result<LevelParts, LaminationError> {
    let (raw, owner) = faces(lam);
    let mut pieces = Vec::with_capacity(raw.len());
    let mut winding = Vec::with_capacity(raw.len());
    for (arcs, boundary_classes) in raw {
        let w = winding_degree(lam, &arcs).ok_or(LaminationError::NonIntegralDegree { depth })?;
        winding.push(w);
        pieces.push(Piece { depth, arcs, boundary_classes, degree: w });
    }
    Ok((pieces, owner, winding))
}

/// All puzzle levels of a tower with degrees, containment and image maps.
#[derive(Clone, Debug)]
pub struct PuzzleView {
    tower: PuzzleTower,
    levels: Vec<PuzzleLevel>,
}

impl PuzzleView {
    pub fn new(tower: &PuzzleTower) -> Result<PuzzleView, LaminationError> {
        let d = tower.degree();
        let built: Vec<_> =
            tower.levels().par_iter().enumerate().map(|(k, lam)| build_level(k, lam)).collect::<Result<_, _>>()?;
        let mut levels: Vec<PuzzleLevel> = built
            .into_iter()
            .enumerate()
            .map(|(k, (pieces, arc_owner, winding_degrees))| PuzzleLevel {
                depth: k,
                lamination: tower.levels()[k].clone(),
                pieces,
                arc_owner,
                parents: Vec::new(),
                images: Vec::new(),
                preimage_degrees: Vec::new(),
                winding_degrees,
            })
            .collect();
        let links: Vec<_> = (1..levels.len())
            .into_par_iter()
            .map(|k| link_level(d, &levels[k - 1], &levels[k]))
            .collect::<Result<_, _>>()?;
        for (k, (parents, images, degrees, preimage_degrees)) in (1..).zip(links) {
            let level = &mut levels[k];
            level.parents = parents;
            level.images = images;
            level.preimage_degrees = preimage_degrees;
            for (p, deg) in level.pieces.iter_mut().zip(degrees) {
                p.degree = deg;
            }
        }
        Ok(PuzzleView { tower: tower.clone(), levels })
    }

    pub fn tower(&self) -> &PuzzleTower {
        &self.tower
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn degree(&self) -> u32 {
        self.tower.degree()
    }

    pub fn level(&self, k: usize) -> &PuzzleLevel {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[PuzzleLevel] {
        &self.levels
    }

    /// The depth-`j` piece containing piece `i` of depth `k` (`j ≤ k`).
    pub fn ancestor(&self, k: usize, i: usize, j: usize) -> usize {
        let mut idx = i;
        for depth in (j + 1..=k).rev() {
            idx = self.levels[depth].parents[idx];
        }
        idx
    }

    /// Depth-0 pieces met by the image of a depth-0 piece.
    pub fn image_set0(&self, i: usize) -> Vec<usize> {
        let level = &self.levels[0];
        let piece = &level.pieces[i];
        let support = level.lamination.support();
        let n = support.len();
        if n == 0 {
            return vec![0];
        }
        let d = self.degree() as u64;
        let mut out: Vec<usize> = Vec::new();
        for arc in &piece.arcs {
            let start = arc.start.times(d);
            let span = arc.length() * BigRational::from_integer(BigInt::from(d));
            // Walk the elementary arcs from the image of the start.
            let mut idx = support.position(&start).expect("support is invariant");
            let mut covered = BigRational::zero();
            while covered < span {
                out.push(level.arc_owner[idx]);
                let a = &support.as_slice()[idx];
                let b = &support.as_slice()[(idx + 1) % n];
                covered += Arc::new(a.clone(), b.clone()).length();
                idx = (idx + 1) % n;
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

type Links = (Vec<usize>, Vec<usize>, Vec<u32>, Vec<u32>);

fn link_level(d: u32, upper: &PuzzleLevel, lower: &PuzzleLevel) -> Result<Links, LaminationError> {
    let depth = lower.depth;
    let dd = BigRational::from_integer(BigInt::from(d));
    let mut parents = Vec::with_capacity(lower.pieces.len());
    let mut images = Vec::with_capacity(lower.pieces.len());
    let mut degrees = Vec::with_capacity(lower.pieces.len());
    let mut counted = Vec::with_capacity(lower.pieces.len());
    for (idx, piece) in lower.pieces.iter().enumerate() {
        let x = piece.sample_point();
        let parent = upper.locate(&x).ok_or(LaminationError::NonIntegralDegree { depth })?;
        let image = upper.locate(&x.times(d as u64)).ok_or(LaminationError::NonIntegralDegree { depth })?;
        let ratio = piece.measure() * &dd / upper.pieces[image].measure();
        if !ratio.is_integer() {
            return Err(LaminationError::NonIntegralDegree { depth });
        }
        let degree = ratio.to_integer().to_u32().ok_or(LaminationError::NonIntegralDegree { depth })?;
        let count = match upper.pieces[image].arcs.first() {
            None => d,
            Some(j) => {
                j.start.preimages_unchecked(d).iter().filter(|s| lower.piece_of_arc_start(s) == Some(idx)).count()
                    as u32
            }
        };
        parents.push(parent);
        images.push(image);
        degrees.push(degree);
        counted.push(count);
    }
    Ok((parents, images, degrees, counted))
}

/// Pieces of depth `k` with the containment map into depth `k-1`.
pub fn pieces(tower: &PuzzleTower, k: usize) -> Result<PuzzleLevel, LaminationError> {
    tower.level(k)?;
    let view = PuzzleView::new(&tower.truncate(k)?)?;
    Ok(view.levels.into_iter().nth(k).expect("level k"))
}

/// A class on which the map is many-to-one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JuliaClass {
    pub class: AngleSet,
    pub degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriticalInventory {
    pub fatou_candidates: Vec<Piece>,
    pub julia_classes: Vec<JuliaClass>,
}

impl CriticalInventory {
    /// `1 + Σ(δ - 1)` over critical pieces and classes.
    pub fn implied_degree(&self) -> u32 {
        1 + self.fatou_candidates.iter().map(|p| p.degree - 1).sum::<u32>()
            + self.julia_classes.iter().map(|c| c.degree - 1).sum::<u32>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeCheck {
    pub depth: usize,
    pub holds: bool,
    pub piece_excess: u32,
    pub class_excess: u32,
    pub inventory: CriticalInventory,
}

pub(crate) fn inventory_of(level: &PuzzleLevel) -> CriticalInventory {
    let d = level.lamination.degree();
    let fatou_candidates = level.pieces.iter().filter(|p| p.degree > 1).cloned().collect();
    let julia_classes = level
        .lamination
        .nontrivial_classes()
        .filter_map(|c| {
            let image = c.image(d).len();
            (image < c.len()).then(|| JuliaClass { class: c.clone(), degree: (c.len() / image) as u32 })
        })
        .collect();
    CriticalInventory { fatou_candidates, julia_classes }
}

/// Checks `Σ(δ(L) - 1) + Σ(δ(C) - 1) = d - 1` at depth `k`.
pub fn total_degree_check(tower: &PuzzleTower, k: usize) -> Result<DegreeCheck, LaminationError> {
    let level = pieces(tower, k)?;
    Ok(degree_check_of(&level))
}

pub(crate) fn degree_check_of(level: &PuzzleLevel) -> DegreeCheck {
    let d = level.lamination.degree();
    let inventory = inventory_of(level);
    let piece_excess: u32 = inventory.fatou_candidates.iter().map(|p| p.degree - 1).sum();
    let class_excess: u32 = inventory.julia_classes.iter().map(|c| c.degree - 1).sum();
    let exact_classes = level.lamination.nontrivial_classes().all(|c| c.len() % c.image(d).len() == 0);
    DegreeCheck {
        depth: level.depth,
        holds: exact_classes && piece_excess + class_excess == d - 1,
        piece_excess,
        class_excess,
        inventory,
    }
}

impl PuzzleView {
    pub fn degree_check(&self, k: usize) -> DegreeCheck {
        degree_check_of(&self.levels[k])
    }

    pub fn inventory(&self, k: usize) -> CriticalInventory {
        inventory_of(&self.levels[k])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::parse_angle_list;

    fn set(s: &str) -> AngleSet {
        parse_angle_list(s).unwrap()
    }

    fn tower(d: u32, levels: &[&[&str]]) -> PuzzleTower {
        PuzzleTower::from_classes(d, levels.iter().map(|l| l.iter().map(|c| set(c)).collect()).collect()).unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    fn basilica() -> PuzzleTower {
        tower(2, &[&["1/3,2/3"], &["1/3,2/3", "1/6,5/6"]])
    }

    #[test]
    fn basilica_depth_one() {
        let level = pieces(&basilica(), 1).unwrap();
        assert_eq!(level.pieces().len(), 3);
        for p in level.pieces() {
            assert_eq!(p.measure(), r(1, 3));
        }
        let at = |s: &str| level.piece(level.locate(&s.parse().unwrap()).unwrap()).degree;
        assert_eq!(at("0"), 1);
        assert_eq!(at("1/4"), 2);
        assert_eq!(at("1/2"), 1);
        let middle = level.piece(level.locate(&"1/4".parse().unwrap()).unwrap());
        assert_eq!(
            middle.arcs,
            vec![
                Arc::new("1/6".parse().unwrap(), "1/3".parse().unwrap()),
                Arc::new("2/3".parse().unwrap(), "5/6".parse().unwrap())
            ]
        );
        assert_eq!(level.preimage_degrees(), &[2, 1, 1]);
        assert_eq!(level.winding_degrees(), &[2, 1, 1]);
    }

    #[test]
    fn basilica_depth_zero_winding() {
        let level = pieces(&basilica(), 0).unwrap();
        let at = |s: &str| level.piece(level.locate(&s.parse().unwrap()).unwrap()).degree;
        assert_eq!(at("0"), 2);
        assert_eq!(at("1/2"), 1);
    }

    #[test]
    fn rabbit_depth_zero_has_three_pieces() {
        let t = tower(2, &[&["1/7,2/7,4/7"]]);
        assert_eq!(pieces(&t, 0).unwrap().pieces().len(), 3);
        let t1 = tower(2, &[&["1/7,2/7,4/7"], &["1/7,2/7,4/7", "9/14,11/14,1/14"]]);
        let check = total_degree_check(&t1, 1).unwrap();
        assert!(check.holds);
        assert_eq!(check.inventory.fatou_candidates.len(), 1);
        assert_eq!(check.inventory.fatou_candidates[0].degree, 2);
    }

    #[test]
    fn empty_support_is_one_piece() {
        let t = PuzzleTower::from_level0(FiniteLamination::empty(3));
        let level = pieces(&t, 0).unwrap();
        assert_eq!(level.pieces().len(), 1);
        assert_eq!(level.piece(0).degree, 3);
        assert_eq!(level.piece(0).measure(), r(1, 1));
        assert!(total_degree_check(&t, 0).unwrap().holds);
    }

    #[test]
    fn basilica_inventory() {
        let check = total_degree_check(&basilica(), 1).unwrap();
        assert!(check.holds);
        assert_eq!(check.inventory.fatou_candidates.len(), 1);
        assert!(check.inventory.julia_classes.is_empty());
    }

    #[test]
    fn image_of_depth_zero_pieces() {
        let view = PuzzleView::new(&basilica()).unwrap();
        let level0 = view.level(0);
        let big = level0.locate(&"0".parse().unwrap()).unwrap();
        let small = level0.locate(&"1/2".parse().unwrap()).unwrap();
        assert_eq!(view.image_set0(small), vec![big]);
        let mut all = view.image_set0(big);
        all.sort();
        assert_eq!(all, vec![0, 1]);
    }
}
