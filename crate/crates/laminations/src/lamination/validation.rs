use std::fmt;

use serde::Serialize;

use super::FiniteLamination;
use crate::circle::{unlinked, Angle, AngleSet};

const MAX_LINK_WITNESSES: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Two non-trivial classes cross.
    Linked,
    /// A level-0 support angle is not periodic.
    NotPeriodic,
    /// The image of a class is not a class of the level below.
    ImageNotClass,
    /// A complementary arc does not map onto a complementary arc.
    NotConsecutivePreserving,
    /// A level's support is not the full preimage of the level below.
    SupportMismatch,
    /// A non-trivial class maps onto a trivial class.
    CollapsedClass,
    /// A deeper level does not restrict to the shallower one.
    NotNested,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationKind::Linked => "classes are linked",
            ViolationKind::NotPeriodic => "support angle is not periodic",
            ViolationKind::ImageNotClass => "image is not a class",
            ViolationKind::NotConsecutivePreserving => "map is not consecutive preserving",
            ViolationKind::SupportMismatch => "support is not the full preimage",
            ViolationKind::CollapsedClass => "non-trivial class maps to a trivial class",
            ViolationKind::NotNested => "level does not restrict to the previous level",
        };
        f.write_str(s)
    }
}

/// One violated condition with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub depth: Option<usize>,
    pub kind: ViolationKind,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub classes: Vec<AngleSet>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub angles: Vec<Angle>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(k) = self.depth {
            write!(f, "depth {k}: ")?;
        }
        write!(f, "{}", self.kind)?;
        for c in &self.classes {
            write!(f, " {c}")?;
        }
        for a in &self.angles {
            write!(f, " {a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(
        &mut self,
        depth: Option<usize>,
        kind: ViolationKind,
        classes: Vec<AngleSet>,
        angles: Vec<Angle>,
    ) {
        self.violations.push(Violation { depth, kind, classes, angles });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Fast non-crossing test on the cyclic sequence of class labels.
fn crossing_free(lam: &FiniteLamination) -> bool {
    let owners = lam.owners();
    let classes = lam.classes();
    let mut seen = vec![0usize; classes.len()];
    let mut stack: Vec<usize> = Vec::new();
    for &c in owners {
        let size = classes[c].len();
        if size < 2 {
            continue;
        }
        if seen[c] > 0 && stack.last() != Some(&c) {
            return false;
        }
        if seen[c] == 0 {
            stack.push(c);
        }
        seen[c] += 1;
        if seen[c] == size {
            stack.pop();
        }
    }
    true
}

pub(crate) fn check_unlinked(lam: &FiniteLamination, depth: Option<usize>, report: &mut ValidationReport) {
    if crossing_free(lam) {
        return;
    }
    let nontrivial: Vec<&AngleSet> = lam.nontrivial_classes().collect();
    let mut found = 0;
    for (i, a) in nontrivial.iter().enumerate() {
        for b in &nontrivial[i + 1..] {
            if !unlinked(a, b) {
                report.push(depth, ViolationKind::Linked, vec![(*a).clone(), (*b).clone()], vec![]);
                found += 1;
                if found >= MAX_LINK_WITNESSES {
                    return;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::parse_angle_list;

    fn lam(classes: &[&str]) -> FiniteLamination {
        FiniteLamination::new(2, classes.iter().map(|c| parse_angle_list(c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn crossing_detection_matches_pairwise() {
        assert!(crossing_free(&lam(&["1/3,2/3", "1/6,5/6", "1/12,11/12"])));
        assert!(!crossing_free(&lam(&["0,1/2", "1/4,3/4"])));
        assert!(!crossing_free(&lam(&["1/7,2/7,4/7", "1/4,3/4"])));
        assert!(crossing_free(&lam(&["1/7,2/7,4/7", "9/14,11/14,1/14", "1/5"])));
    }
}
