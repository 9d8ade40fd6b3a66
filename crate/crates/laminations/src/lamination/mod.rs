//! Finite laminations, puzzle towers, puzzle pieces and the predicates built
//! on top of them.

mod gaps;
mod pieces;
mod portrait;
mod tower;
mod validation;

use std::fmt;

use petgraph::unionfind::UnionFind;

use crate::circle::{unlinked, Angle, AngleSet};
use crate::error::LaminationError;

pub(crate) use gaps::separation_depth_of;
pub use gaps::{
    generated_classes, primitivity_check, renormalizability_obstruction, separation_depth, CriticalGap, GapCycle,
    GapOrbits, GapTail, GeneratedClasses, ObstructionReport, PrimitivityReport, SeparationHint,
};
pub use pieces::{
    pieces, total_degree_check, CriticalInventory, DegreeCheck, JuliaClass, Piece, PuzzleLevel, PuzzleView,
};
pub use portrait::CriticalPortrait;
pub use tower::{verify_tower, PuzzleTower};
pub use validation::{ValidationReport, Violation, ViolationKind};

/// An equivalence relation on a finite set of angles.
///
/// Classes are stored sorted by their smallest element. Singletons are kept
/// when given so that the support is exactly the union of the classes.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteLamination {
    degree: u32,
    support: AngleSet,
    classes: Vec<AngleSet>,
    owner: Vec<usize>,
}

impl FiniteLamination {
    pub fn new(degree: u32, classes: Vec<AngleSet>) -> Result<FiniteLamination, LaminationError> {
        if degree < 2 {
            return Err(crate::error::CircleError::InvalidDegree(degree).into());
        }
        let mut classes = classes;
        if classes.iter().any(AngleSet::is_empty) {
            return Err(LaminationError::EmptyClass);
        }
        classes.sort();
        let mut tagged: Vec<(Angle, usize)> =
            classes.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |a| (a.clone(), i))).collect();
        tagged.sort();
        for w in tagged.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(LaminationError::Overlap(w[0].0.clone()));
            }
        }
        let owner = tagged.iter().map(|(_, i)| *i).collect();
        let support = AngleSet::from_sorted_unchecked(tagged.into_iter().map(|(a, _)| a).collect());
        Ok(FiniteLamination { degree, support, classes, owner })
    }

    /// Builds a lamination on `support`, adding singletons for uncovered points.
    pub fn with_support(
        degree: u32,
        support: &AngleSet,
        classes: Vec<AngleSet>,
    ) -> Result<FiniteLamination, LaminationError> {
        let mut classes = classes;
        let covered: AngleSet = classes.iter().flat_map(|c| c.iter().cloned()).collect();
        if let Some(a) = covered.iter().find(|a| !support.contains(a)) {
            return Err(LaminationError::OutsideSupport(a.clone()));
        }
        classes.extend(support.iter().filter(|a| !covered.contains(a)).map(|a| std::iter::once(a.clone()).collect()));
        FiniteLamination::new(degree, classes)
    }

    pub fn empty(degree: u32) -> FiniteLamination {
        FiniteLamination { degree, support: AngleSet::new(), classes: Vec::new(), owner: Vec::new() }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn support(&self) -> &AngleSet {
        &self.support
    }

    /// All classes, singletons included.
    pub fn classes(&self) -> &[AngleSet] {
        &self.classes
    }

    pub fn nontrivial_classes(&self) -> impl Iterator<Item = &AngleSet> {
        self.classes.iter().filter(|c| c.len() > 1)
    }

    pub fn class_index(&self, theta: &Angle) -> Option<usize> {
        self.support.position(theta).map(|i| self.owner[i])
    }

    pub fn class_of(&self, theta: &Angle) -> Option<&AngleSet> {
        self.class_index(theta).map(|i| &self.classes[i])
    }

    /// Whether `set` is exactly one of the classes.
    pub fn is_class(&self, set: &AngleSet) -> bool {
        match set.first().and_then(|a| self.class_of(a)) {
            Some(c) => c == set,
            None => false,
        }
    }

    /// Class index of each support point, parallel to `support()`.
    pub(crate) fn owners(&self) -> &[usize] {
        &self.owner
    }

    /// The induced partition of `points`; points outside the support become singletons.
    pub fn restrict(&self, points: &AngleSet) -> FiniteLamination {
        let mut groups: std::collections::BTreeMap<usize, Vec<Angle>> = Default::default();
        let mut singles = Vec::new();
        for a in points {
            match self.class_index(a) {
                Some(i) => groups.entry(i).or_default().push(a.clone()),
                None => singles.push(std::iter::once(a.clone()).collect()),
            }
        }
        let mut classes: Vec<AngleSet> = groups.into_values().map(|v| v.into_iter().collect()).collect();
        classes.extend(singles);
        FiniteLamination::new(self.degree, classes).expect("restriction of a partition")
    }

    /// Drops singleton classes.
    pub fn without_singletons(&self) -> FiniteLamination {
        FiniteLamination::new(self.degree, self.nontrivial_classes().cloned().collect()).expect("sub-partition")
    }

    /// Whether the two laminations induce the same partition of `points`.
    pub fn agrees_on(&self, other: &FiniteLamination, points: &AngleSet) -> bool {
        self.restrict(points).classes == other.restrict(points).classes
    }

    /// Whether every class of `self` lies inside a class of `other`.
    pub fn refines_into(&self, other: &FiniteLamination) -> bool {
        self.classes.iter().all(|c| {
            let target = c.first().and_then(|a| other.class_index(a));
            match target {
                Some(t) => c.iter().all(|a| other.class_index(a) == Some(t)),
                None => c.len() == 1,
            }
        })
    }

    /// Checks pairwise unlinkedness of the non-trivial classes.
    pub fn verify(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        validation::check_unlinked(self, None, &mut report);
        report
    }

    /// Checks unlinkedness and, for a forward-invariant support, that every
    /// class maps consecutively onto a class.
    pub fn verify_invariant(&self) -> ValidationReport {
        let mut report = self.verify();
        for class in &self.classes {
            tower::check_image(class, self, 0, &mut report);
        }
        report
    }

    /// The finest partition in which every generator lies inside one class.
    pub fn closure<'a>(degree: u32, generators: impl IntoIterator<Item = &'a AngleSet>) -> FiniteLamination {
        let generators: Vec<&AngleSet> = generators.into_iter().collect();
        let support: AngleSet = generators.iter().flat_map(|c| c.iter().cloned()).collect();
        let mut uf = UnionFind::<usize>::new(support.len());
        for g in &generators {
            let mut it = g.iter().map(|a| support.position(a).expect("in support"));
            if let Some(first) = it.next() {
                for i in it {
                    uf.union(first, i);
                }
            }
        }
        FiniteLamination::from_union_find(degree, &support, &mut uf)
    }

    pub(crate) fn from_union_find(degree: u32, support: &AngleSet, uf: &mut UnionFind<usize>) -> FiniteLamination {
        let mut groups: std::collections::BTreeMap<usize, Vec<Angle>> = Default::default();
        for (i, a) in support.iter().enumerate() {
            groups.entry(uf.find_mut(i)).or_default().push(a.clone());
        }
        let classes = groups.into_values().map(|v| v.into_iter().collect()).collect();
        FiniteLamination::new(degree, classes).expect("union-find partition")
    }

    /// Pairwise unlinkedness of two classes, exposed for diagnostics.
    pub fn linked_pair(a: &AngleSet, b: &AngleSet) -> bool {
        !unlinked(a, b)
    }
}

impl fmt::Debug for FiniteLamination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteLamination(d={}, ", self.degree)?;
        f.debug_list().entries(self.classes.iter()).finish()?;
        write!(f, ")")
    }
}

impl fmt::Display for FiniteLamination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for c in self.nontrivial_classes() {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{c}")?;
        }
        if first {
            write!(f, "(trivial)")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::parse_angle_list;

    fn set(s: &str) -> AngleSet {
        parse_angle_list(s).unwrap()
    }

    #[test]
    fn construction_and_lookup() {
        let lam = FiniteLamination::new(2, vec![set("2/3,1/3")]).unwrap();
        assert!(lam.verify().is_valid());
        assert_eq!(lam.class_of(&"2/3".parse().unwrap()), Some(&set("1/3,2/3")));
        assert!(lam.is_class(&set("1/3,2/3")));
        assert!(!lam.is_class(&set("1/3")));
        assert!(FiniteLamination::new(2, vec![set("1/3,2/3"), set("1/3")]).is_err());
        assert!(FiniteLamination::new(1, vec![]).is_err());
    }

    #[test]
    fn linked_witness() {
        let lam = FiniteLamination::new(2, vec![set("0,1/2"), set("1/4,3/4")]).unwrap();
        let report = lam.verify();
        assert!(!report.is_valid());
        assert_eq!(report.violations[0].classes, vec![set("0,1/2"), set("1/4,3/4")]);
    }

    #[test]
    fn rabbit_pair_unlinked() {
        let lam = FiniteLamination::new(2, vec![set("1/7,2/7,4/7"), set("9/14,11/14,1/14")]).unwrap();
        assert!(lam.verify().is_valid());
    }

    #[test]
    fn restriction_and_closure() {
        let lam = FiniteLamination::closure(2, [&set("0,1/2"), &set("1/2,1/3"), &set("1/5,2/5")]);
        assert_eq!(lam.classes(), &[set("0,1/3,1/2"), set("1/5,2/5")]);
        let r = lam.restrict(&set("0,1/2,1/5,3/7"));
        assert_eq!(r.classes(), &[set("0,1/2"), set("1/5"), set("3/7")]);
        let support = set("1/3,2/3,1/6");
        let l = FiniteLamination::with_support(2, &support, vec![set("1/3,2/3")]).unwrap();
        assert_eq!(l.classes().len(), 2);
        assert!(FiniteLamination::with_support(2, &support, vec![set("1/5,2/3")]).is_err());
    }
}
