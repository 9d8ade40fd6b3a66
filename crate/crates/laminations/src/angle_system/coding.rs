use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{AngleSystem, MAX_CANDIDATES};
use crate::circle::{Angle, AngleSet};
use crate::error::AngleSystemError;

/// An eventually periodic digit sequence along the chain of gaps:
/// entries `(gap, digit)`, with the cycle starting at `cycle_start`.
struct Itinerary {
    entries: Vec<(usize, usize)>,
    cycle_start: usize,
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl AngleSystem {
    /// Internal angle of a boundary point of gap `vertex`. Any angle of a
    /// boundary class may be given.
    pub fn alpha(&self, vertex: &str, theta: &Angle) -> Result<Angle, AngleSystemError> {
        let gap = self.index(vertex)?;
        let class = self.class_of(theta)?;
        let x = self
            .facing(gap, &class)
            .into_iter()
            .next()
            .ok_or_else(|| AngleSystemError::NotOnBoundary { vertex: vertex.to_string(), angle: theta.clone() })?;
        Ok(self.value(&self.boundary_itinerary(gap, &x)))
    }

    /// The boundary class of gap `vertex` with internal angle `t`.
    pub fn alpha_inverse(&self, vertex: &str, t: &Angle) -> Result<AngleSet, AngleSystemError> {
        let gap = self.index(vertex)?;
        let x = self.departure_for(gap, t)?;
        self.class_of(&x)
    }

    /// Whether the internal angle `t` at `vertex` is an iterated preimage of
    /// the root, i.e. its digits end in zeros.
    pub fn is_root_preimage(&self, vertex: &str, t: &Angle) -> Result<bool, AngleSystemError> {
        let it = self.internal_itinerary(self.index(vertex)?, t);
        Ok(it.entries[it.cycle_start..].iter().all(|&(_, s)| s == 0))
    }

    /// Internal angle of `x`, which must lie on the closure of gap `gap`.
    pub(crate) fn boundary_alpha(&self, gap: usize, x: &Angle) -> Angle {
        self.value(&self.boundary_itinerary(gap, x))
    }

    fn boundary_itinerary(&self, gap: usize, x: &Angle) -> Itinerary {
        let mut seen: HashMap<(Angle, usize), usize> = HashMap::new();
        let mut entries = Vec::new();
        let (mut x, mut i) = (x.clone(), gap);
        loop {
            if let Some(&start) = seen.get(&(x.clone(), i)) {
                return Itinerary { entries, cycle_start: start };
            }
            seen.insert((x.clone(), i), entries.len());
            entries.push((i, self.sector(i, &x)));
            x = self.advance(i, &x);
            i = self.gaps[i].next;
        }
    }

    fn internal_itinerary(&self, gap: usize, t: &Angle) -> Itinerary {
        let mut seen: HashMap<(Angle, usize), usize> = HashMap::new();
        let mut entries = Vec::new();
        let (mut t, mut i) = (t.value().clone(), gap);
        loop {
            let key = (Angle::from_rational(t.clone()), i);
            if let Some(&start) = seen.get(&key) {
                return Itinerary { entries, cycle_start: start };
            }
            seen.insert(key, entries.len());
            let scaled = &t * int(u64::from(self.gaps[i].degree));
            let digit = scaled.floor();
            entries.push((i, usize::try_from(digit.to_integer()).expect("digit below the degree")));
            t = scaled - digit;
            i = self.gaps[i].next;
        }
    }

    /// Mixed-radix value of an itinerary, reduced modulo one.
    fn value(&self, it: &Itinerary) -> Angle {
        let radix = |i: usize| int(u64::from(self.gaps[it.entries[i].0].degree));
        let digit = |i: usize| int(it.entries[i].1 as u64);
        let mut head = BigRational::zero();
        let mut scale = BigRational::one();
        for i in 0..it.cycle_start {
            scale /= radix(i);
            head += digit(i) * &scale;
        }
        let mut cycle = BigRational::zero();
        let mut inner = BigRational::one();
        for i in it.cycle_start..it.entries.len() {
            inner /= radix(i);
            cycle += digit(i) * &inner;
        }
        // `inner` is now 1/P for the product P of the cycle's radices.
        let tail = cycle / (BigRational::one() - inner);
        Angle::from_rational(head + tail * scale)
    }

    /// The departure angle of the boundary class with internal angle `t`.
    pub(crate) fn departure_for(&self, gap: usize, t: &Angle) -> Result<Angle, AngleSystemError> {
        let it = self.internal_itinerary(gap, t);
        let cycle = &it.entries[it.cycle_start..];
        let mut y = if cycle.iter().all(|&(_, s)| s == 0) {
            self.codings[cycle[0].0].root_angle.clone()
        } else {
            self.periodic_point(cycle, t)?
        };
        for &(i, s) in it.entries[..it.cycle_start].iter().rev() {
            let found: Vec<Angle> =
                self.return_preimages(i, &y)?.into_iter().filter(|x| self.sector(i, x) == s).collect();
            y = self.pick(i, &found, t)?;
        }
        Ok(y)
    }

    /// The periodic boundary point whose itinerary repeats `cycle`.
    ///
    /// Points with the cycle's digits as their first digits lie between the
    /// two root preimages with those digits, so only the few periodic
    /// candidates in that arc are tested.
    fn periodic_point(&self, cycle: &[(usize, usize)], t: &Angle) -> Result<Angle, AngleSystemError> {
        let gap = cycle[0].0;
        let steps: usize = cycle.iter().map(|&(i, _)| self.gaps[i].steps()).sum();
        let too_long = || AngleSystemError::PeriodTooLong { vertex: self.schema.vertices[gap].clone(), steps };
        let mut prefix = BigRational::zero();
        let mut scale = BigRational::one();
        for &(i, s) in cycle {
            scale /= int(u64::from(self.gaps[i].degree));
            prefix += int(s as u64) * &scale;
        }
        let lower = self.departure_for(gap, &Angle::from_rational(prefix.clone()))?;
        let upper = self.departure_for(gap, &Angle::from_rational(prefix + scale))?;
        let width = if lower == upper { BigRational::one() } else { lower.ccw_to(&upper) };
        let denom = BigInt::from(self.degree()).pow(u32::try_from(steps).map_err(|_| too_long())?) - BigInt::one();
        let n = BigRational::from_integer(denom.clone());
        let lo = (lower.value() * &n).ceil().to_integer();
        let hi = ((lower.value() + width) * &n).ceil().to_integer();
        if &hi - &lo > BigInt::from(MAX_CANDIDATES) {
            return Err(too_long());
        }
        let mut found = Vec::new();
        let mut k = lo;
        while k < hi {
            let y = Angle::from_rational(BigRational::new(k.clone(), denom.clone()));
            k += 1;
            let mut z = y.clone();
            let matches = cycle.iter().all(|&(i, s)| {
                let ok = self.sector(i, &z) == s;
                z = self.advance(i, &z);
                ok
            });
            if matches && self.in_gap(gap, &y) {
                found.push(y);
            }
        }
        self.pick(gap, &found, t)
    }

    /// The single class among `found`, as its departure angle.
    fn pick(&self, gap: usize, found: &[Angle], t: &Angle) -> Result<Angle, AngleSystemError> {
        let vertex = || self.schema.vertices[gap].clone();
        if let [only] = found {
            return Ok(only.clone());
        }
        let classes = self.group(gap, found)?;
        match classes.len() {
            0 => Err(AngleSystemError::NoPreimage { vertex: vertex(), t: t.clone() }),
            1 => Ok(classes.into_iter().next().expect("one").1),
            _ => Err(AngleSystemError::InconsistentCoding { vertex: vertex() }),
        }
    }
}
