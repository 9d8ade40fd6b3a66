use super::validation::check_unlinked;
use super::{CriticalPortrait, FiniteLamination, ValidationReport, ViolationKind};
use crate::circle::{is_periodic, AngleSet};
use crate::error::LaminationError;

/// A finite-depth combinatorial puzzle: laminations `Λ_0, …, Λ_K` where each
/// level is the pullback of the one above it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuzzleTower {
    degree: u32,
    levels: Vec<FiniteLamination>,
    portrait: Option<CriticalPortrait>,
}

impl PuzzleTower {
    pub fn new(degree: u32, levels: Vec<FiniteLamination>) -> Result<PuzzleTower, LaminationError> {
        if levels.is_empty() {
            return Err(LaminationError::EmptyTower);
        }
        if let Some(l) = levels.iter().find(|l| l.degree() != degree) {
            return Err(LaminationError::DegreeMismatch { expected: degree, found: l.degree() });
        }
        Ok(PuzzleTower { degree, levels, portrait: None })
    }

    /// Builds a tower from listed non-trivial classes, inferring supports:
    /// level 0 is the union of its classes and level `k+1` is the preimage of
    /// level `k`'s support.
    pub fn from_classes(degree: u32, levels: Vec<Vec<AngleSet>>) -> Result<PuzzleTower, LaminationError> {
        let mut out: Vec<FiniteLamination> = Vec::with_capacity(levels.len());
        for classes in levels {
            let lam = match out.last() {
                None => FiniteLamination::new(degree, classes)?,
                Some(prev) => {
                    let listed: AngleSet = classes.iter().flat_map(|c| c.iter().cloned()).collect();
                    let support = prev.support().preimage(degree).union(&listed);
                    FiniteLamination::with_support(degree, &support, classes)?
                }
            };
            out.push(lam);
        }
        PuzzleTower::new(degree, out)
    }

    /// A tower consisting of `Λ_0` only.
    pub fn from_level0(lam: FiniteLamination) -> PuzzleTower {
        PuzzleTower { degree: lam.degree(), levels: vec![lam], portrait: None }
    }

    pub fn with_portrait(mut self, portrait: CriticalPortrait) -> Result<PuzzleTower, LaminationError> {
        if portrait.degree() != self.degree {
            return Err(LaminationError::DegreeMismatch { expected: self.degree, found: portrait.degree() });
        }
        self.portrait = Some(portrait);
        Ok(self)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// The deepest level index `K`.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[FiniteLamination] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> Result<&FiniteLamination, LaminationError> {
        self.levels.get(k).ok_or(LaminationError::DepthOutOfRange { depth: k, max: self.depth() })
    }

    pub fn deepest(&self) -> &FiniteLamination {
        self.levels.last().expect("non-empty tower")
    }

    pub fn portrait(&self) -> Option<&CriticalPortrait> {
        self.portrait.as_ref()
    }

    /// The sub-tower `Λ_0, …, Λ_k`.
    pub fn truncate(&self, k: usize) -> Result<PuzzleTower, LaminationError> {
        self.level(k)?;
        Ok(PuzzleTower { degree: self.degree, levels: self.levels[..=k].to_vec(), portrait: self.portrait.clone() })
    }

    /// Extends the tower to `depth` by pulling back through the attached
    /// critical portrait. Refused when no portrait is attached.
    pub fn extend_to(&self, depth: usize) -> Result<PuzzleTower, LaminationError> {
        let portrait = self.portrait.as_ref().ok_or_else(|| {
            LaminationError::ExtensionRefused(
                "no critical portrait: the pullback is not determined by the tower alone".into(),
            )
        })?;
        for k in 0..self.depth() {
            if portrait.pull_back(&self.levels[k])? != self.levels[k + 1] {
                return Err(LaminationError::PortraitInconsistent { depth: k });
            }
        }
        let mut levels = self.levels.clone();
        while levels.len() <= depth {
            let next = portrait.pull_back(levels.last().expect("non-empty"))?;
            levels.push(next);
        }
        let tower = PuzzleTower { degree: self.degree, levels, portrait: self.portrait.clone() };
        let report = verify_tower(&tower);
        if let Some(v) = report.violations.first() {
            return Err(LaminationError::ExtensionInvalid { depth: v.depth.unwrap_or(0), detail: v.to_string() });
        }
        Ok(tower)
    }
}

/// Successor of `b` in the cyclic order of `set`.
fn cyclic_successor<'a>(set: &'a AngleSet, b: &crate::circle::Angle) -> &'a crate::circle::Angle {
    let s = set.as_slice();
    let i = set.position(b).expect("member");
    &s[(i + 1) % s.len()]
}

/// Checks that `class` maps onto a class of `target` consecutively.
pub(super) fn check_image(class: &AngleSet, target: &FiniteLamination, depth: usize, report: &mut ValidationReport) {
    let d = target.degree();
    let image = class.image(d);
    if !target.is_class(&image) {
        report.push(Some(depth), ViolationKind::ImageNotClass, vec![class.clone(), image], vec![]);
        return;
    }
    let pts = class.as_slice();
    let n = pts.len();
    if n < 2 {
        return;
    }
    for i in 0..n {
        let a = pts[i].times(d as u64);
        let b = pts[(i + 1) % n].times(d as u64);
        if *cyclic_successor(&image, &a) != b {
            report.push(
                Some(depth),
                ViolationKind::NotConsecutivePreserving,
                vec![class.clone()],
                vec![pts[i].clone(), pts[(i + 1) % n].clone()],
            );
            return;
        }
    }
}

/// Checks the puzzle axioms, the consecutive-preserving condition and nesting
/// of successive levels.
pub fn verify_tower(tower: &PuzzleTower) -> ValidationReport {
    let mut report = ValidationReport::default();
    let d = tower.degree();
    for (k, lam) in tower.levels().iter().enumerate() {
        check_unlinked(lam, Some(k), &mut report);
    }
    let base = &tower.levels()[0];
    for a in base.support() {
        if !is_periodic(a, d) {
            report.push(Some(0), ViolationKind::NotPeriodic, vec![], vec![a.clone()]);
        }
    }
    for class in base.classes() {
        check_image(class, base, 0, &mut report);
    }
    for k in 0..tower.depth() {
        let upper = &tower.levels()[k];
        let lower = &tower.levels()[k + 1];
        let expected = upper.support().preimage(d);
        if &expected != lower.support() {
            let missing: Vec<_> = expected.iter().filter(|a| !lower.support().contains(a)).cloned().collect();
            let extra: Vec<_> = lower.support().iter().filter(|a| !expected.contains(a)).cloned().collect();
            report.push(
                Some(k + 1),
                ViolationKind::SupportMismatch,
                vec![],
                missing.into_iter().chain(extra).take(8).collect(),
            );
            continue;
        }
        for class in lower.classes() {
            check_image(class, upper, k + 1, &mut report);
            if class.len() >= 2 && class.image(d).len() < 2 {
                report.push(Some(k + 1), ViolationKind::CollapsedClass, vec![class.clone()], vec![]);
            }
        }
        if lower.restrict(upper.support()).classes() != upper.classes() {
            let witness =
                upper.classes().iter().find(|c| lower.restrict(c).classes().len() != 1 || !lower.is_class(c)).cloned();
            report.push(Some(k + 1), ViolationKind::NotNested, witness.into_iter().collect(), vec![]);
        }
    }
    report
}
