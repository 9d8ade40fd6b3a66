use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use petgraph::unionfind::UnionFind;

use super::pieces::faces;
use super::FiniteLamination;
use crate::circle::{unlinked, AngleSet, Arc};
use crate::error::LaminationError;

/// A critical portrait: pairwise unlinked angle sets, each mapped to a single
/// angle, with total multiplicity `d - 1`. It fixes how classes are pulled back.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CriticalPortrait {
    degree: u32,
    elements: Vec<AngleSet>,
    regions: Vec<Vec<Arc>>,
    /// Regions adjacent to each element.
    adjacent: Vec<Vec<usize>>,
}

impl CriticalPortrait {
    pub fn new(degree: u32, elements: Vec<AngleSet>) -> Result<CriticalPortrait, LaminationError> {
        let bad = |s: String| Err(LaminationError::Portrait(s));
        let mut elements = elements;
        elements.sort();
        for e in &elements {
            if e.len() < 2 {
                return bad(format!("element {e} has fewer than two angles"));
            }
            if e.image(degree).len() != 1 {
                return bad(format!("element {e} does not map to a single angle"));
            }
        }
        for (i, a) in elements.iter().enumerate() {
            for b in &elements[i + 1..] {
                if !unlinked(a, b) {
                    return bad(format!("elements {a} and {b} are linked"));
                }
            }
        }
        let total: usize = elements.iter().map(|e| e.len() - 1).sum();
        if total != (degree - 1) as usize {
            return bad(format!("multiplicities sum to {total}, expected {}", degree - 1));
        }
        let lam = FiniteLamination::new(degree, elements.clone())?;
        let (raw, _) = faces(&lam);
        let expected = BigRational::new(BigInt::from(1), BigInt::from(degree));
        let mut regions = Vec::new();
        let mut adjacent = vec![Vec::new(); elements.len()];
        for (r, (arcs, classes)) in raw.into_iter().enumerate() {
            let measure: BigRational = arcs.iter().map(Arc::length).sum();
            if measure != expected {
                return bad(format!("region {r} has measure {measure}, expected 1/{degree}"));
            }
            for c in classes {
                let e = elements.iter().position(|e| *e == c).expect("portrait element");
                adjacent[e].push(r);
            }
            regions.push(arcs);
        }
        Ok(CriticalPortrait { degree, elements, regions, adjacent })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn elements(&self) -> &[AngleSet] {
        &self.elements
    }

    fn region_of(&self, theta: &crate::circle::Angle) -> Option<usize> {
        self.regions.iter().position(|arcs| arcs.iter().any(|a| a.contains(theta)))
    }

    /// The lamination on the full preimage of `lam`'s support whose classes
    /// are the lifts of `lam`'s classes.
    pub fn pull_back(&self, lam: &FiniteLamination) -> Result<FiniteLamination, LaminationError> {
        if lam.degree() != self.degree {
            return Err(LaminationError::DegreeMismatch { expected: self.degree, found: lam.degree() });
        }
        let d = self.degree;
        let support = lam.support().preimage(d);
        let mut uf = UnionFind::<usize>::new(support.len());
        // Representative point of each (region, class) group.
        let mut groups: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, x) in support.iter().enumerate() {
            let class = lam.class_index(&x.times(d as u64)).expect("image in support");
            if let Some(r) = self.region_of(x) {
                match groups.get(&(r, class)) {
                    Some(&rep) => {
                        uf.union(rep, i);
                    }
                    None => {
                        groups.insert((r, class), i);
                    }
                }
            }
        }
        for (e, element) in self.elements.iter().enumerate() {
            let value = element.first().expect("non-empty").times(d as u64);
            let Some(class) = lam.class_index(&value) else { continue };
            let first = support.position(element.first().expect("non-empty")).expect("preimage");
            for x in element.iter() {
                uf.union(first, support.position(x).expect("preimage"));
            }
            for &r in &self.adjacent[e] {
                if let Some(&rep) = groups.get(&(r, class)) {
                    uf.union(first, rep);
                }
            }
        }
        Ok(FiniteLamination::from_union_find(d, &support, &mut uf))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::parse_angle_list;
    use crate::lamination::{verify_tower, PuzzleTower};

    fn set(s: &str) -> AngleSet {
        parse_angle_list(s).unwrap()
    }

    #[test]
    fn basilica_pullback() {
        let p = CriticalPortrait::new(2, vec![set("1/5,7/10")]).unwrap();
        let l0 = FiniteLamination::new(2, vec![set("1/3,2/3")]).unwrap();
        let l1 = p.pull_back(&l0).unwrap();
        assert_eq!(l1.classes(), &[set("1/6,5/6"), set("1/3,2/3")]);
        let l2 = p.pull_back(&l1).unwrap();
        let expected: Vec<AngleSet> =
            ["1/12,11/12", "1/6,5/6", "1/3,2/3", "5/12,7/12"].iter().map(|s| set(s)).collect();
        assert_eq!(l2.classes(), expected.as_slice());
    }

    #[test]
    fn extension_is_validated() {
        let p = CriticalPortrait::new(2, vec![set("1/5,7/10")]).unwrap();
        let t =
            PuzzleTower::from_level0(FiniteLamination::new(2, vec![set("1/3,2/3")]).unwrap()).with_portrait(p).unwrap();
        let deep = t.extend_to(6).unwrap();
        assert_eq!(deep.depth(), 6);
        assert!(verify_tower(&deep).is_valid());
        assert!(deep.level(3).unwrap().is_class(&set("5/24,7/24")));
        // A diameter through the decorations instead of the critical gap
        // pulls back to the wrong chords at depth 3.
        let wrong = CriticalPortrait::new(2, vec![set("1/4,3/4")]).unwrap();
        let t = t.truncate(0).unwrap().with_portrait(wrong).unwrap().extend_to(3).unwrap();
        assert!(t.level(3).unwrap().is_class(&set("5/24,19/24")));
    }

    #[test]
    fn julia_critical_pullback_joins_preimages() {
        // When the critical value lies on the support, both of its preimages
        // join one critical class.
        let p = CriticalPortrait::new(2, vec![set("1/4,3/4")]).unwrap();
        let l0 = FiniteLamination::new(2, vec![set("1/2")]).unwrap();
        let l1 = p.pull_back(&l0).unwrap();
        assert_eq!(l1.classes(), &[set("1/4,3/4")]);
    }

    #[test]
    fn rejects_bad_portraits() {
        assert!(CriticalPortrait::new(2, vec![set("1/4,1/2")]).is_err());
        assert!(CriticalPortrait::new(3, vec![set("0,1/2"), set("1/4,3/4")]).is_err());
        assert!(CriticalPortrait::new(3, vec![set("0,1/3")]).is_err());
        assert!(CriticalPortrait::new(3, vec![set("0,1/3,2/3")]).is_ok());
    }
}
