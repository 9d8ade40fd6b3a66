//! Exact rational angles on the circle `R/Z` and the angle map `θ ↦ dθ`.
//!
//! Angles are measured in turns and stored as reduced fractions in `[0, 1)`,
//! so denominators may grow without bound under repeated pullback.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::CircleError;

/// A rational point of `R/Z`, in lowest terms and normalized to `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(BigRational);

impl Angle {
    /// The angle `numer / denom` reduced modulo one.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Angle, CircleError> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(CircleError::ZeroDenominator);
        }
        Ok(Angle::from_rational(BigRational::new(numer.into(), denom)))
    }

    /// Reduces an arbitrary rational modulo one.
    pub fn from_rational(r: BigRational) -> Angle {
        let floor = r.floor();
        Angle(r - floor)
    }

    pub fn zero() -> Angle {
        Angle(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The value in `[0, 1)` as an exact rational.
    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }

    /// Multiplication by an integer, reduced modulo one.
    pub fn times(&self, k: u64) -> Angle {
        Angle::from_rational(&self.0 * BigInt::from(k))
    }

    /// `self + r` reduced modulo one.
    pub fn shift(&self, r: &BigRational) -> Angle {
        Angle::from_rational(&self.0 + r)
    }

    /// Counterclockwise distance from `self` to `other`, in `[0, 1)`.
    pub fn ccw_to(&self, other: &Angle) -> BigRational {
        let diff = &other.0 - &self.0;
        if diff.is_negative() {
            diff + BigRational::one()
        } else {
            diff
        }
    }

    /// The `d` angles `(θ + k)/d` without degree validation.
    pub(crate) fn preimages_unchecked(&self, d: u32) -> Vec<Angle> {
        let dd = BigRational::from_integer(BigInt::from(d));
        (0..d).map(|k| Angle((&self.0 + BigRational::from_integer(BigInt::from(k))) / &dd)).collect()
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Angle {
    type Err = CircleError;

    fn from_str(s: &str) -> Result<Angle, CircleError> {
        let bad = || CircleError::Parse(s.to_string());
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Angle::new(p, q).map_err(|_| bad())
            }
            None => {
                let p: BigInt = s.parse().map_err(|_| bad())?;
                Angle::new(p, 1)
            }
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Angle, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_degree(d: u32) -> Result<(), CircleError> {
    if d < 2 {
        Err(CircleError::InvalidDegree(d))
    } else {
        Ok(())
    }
}

/// `dθ mod 1`.
pub fn map_d(theta: &Angle, d: u32) -> Result<Angle, CircleError> {
    check_degree(d)?;
    Ok(theta.times(d as u64))
}

/// The `d` preimages of `θ` under `θ ↦ dθ`, sorted.
pub fn preimages(theta: &Angle, d: u32) -> Result<AngleSet, CircleError> {
    check_degree(d)?;
    Ok(AngleSet::from_sorted_unchecked(theta.preimages_unchecked(d)))
}

/// Forward orbit of a rational angle up to its first repetition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub preperiod: usize,
    pub period: usize,
    pub trajectory: Vec<Angle>,
}

impl Orbit {
    /// The periodic part of the trajectory.
    pub fn cycle(&self) -> &[Angle] {
        &self.trajectory[self.preperiod..]
    }

    pub fn is_periodic(&self) -> bool {
        self.preperiod == 0
    }
}

pub fn orbit(theta: &Angle, d: u32) -> Result<Orbit, CircleError> {
    check_degree(d)?;
    let mut seen: HashMap<Angle, usize> = HashMap::new();
    let mut trajectory = Vec::new();
    let mut current = theta.clone();
    loop {
        if let Some(&first) = seen.get(&current) {
            return Ok(Orbit { preperiod: first, period: trajectory.len() - first, trajectory });
        }
        seen.insert(current.clone(), trajectory.len());
        let next = current.times(d as u64);
        trajectory.push(current);
        current = next;
    }
}

/// Whether `θ` is periodic under `θ ↦ dθ`: its denominator is coprime to `d`.
pub fn is_periodic(theta: &Angle, d: u32) -> bool {
    theta.denom().gcd(&BigInt::from(d)).is_one()
}

/// A sorted, duplicate-free finite set of angles.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AngleSet(Vec<Angle>);

impl AngleSet {
    pub fn new() -> AngleSet {
        AngleSet(Vec::new())
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<Angle>) -> AngleSet {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        AngleSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Angle> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Angle] {
        &self.0
    }

    pub fn first(&self) -> Option<&Angle> {
        self.0.first()
    }

    pub fn contains(&self, theta: &Angle) -> bool {
        self.0.binary_search(theta).is_ok()
    }

    /// Index of `θ` if present.
    pub fn position(&self, theta: &Angle) -> Option<usize> {
        self.0.binary_search(theta).ok()
    }

    /// Number of elements strictly below `θ`.
    pub fn rank(&self, theta: &Angle) -> usize {
        self.0.partition_point(|a| a < theta)
    }

    pub fn is_disjoint(&self, other: &AngleSet) -> bool {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small.iter().all(|a| !large.contains(a))
    }

    pub fn union(&self, other: &AngleSet) -> AngleSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    /// Image under `θ ↦ dθ` (duplicates merged).
    pub fn image(&self, d: u32) -> AngleSet {
        self.iter().map(|a| a.times(d as u64)).collect()
    }

    /// Full preimage under `θ ↦ dθ`.
    pub fn preimage(&self, d: u32) -> AngleSet {
        self.iter().flat_map(|a| a.preimages_unchecked(d)).collect()
    }

    pub fn into_vec(self) -> Vec<Angle> {
        self.0
    }
}

impl FromIterator<Angle> for AngleSet {
    fn from_iter<I: IntoIterator<Item = Angle>>(iter: I) -> AngleSet {
        let mut v: Vec<Angle> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        AngleSet(v)
    }
}

impl<'a> IntoIterator for &'a AngleSet {
    type Item = &'a Angle;
    type IntoIter = std::slice::Iter<'a, Angle>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for AngleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for AngleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for AngleSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AngleSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<AngleSet, D::Error> {
        let v = Vec::<Angle>::deserialize(deserializer)?;
        Ok(v.into_iter().collect())
    }
}

/// Parses a comma-separated list such as `"1/7,2/7,4/7"`.
pub fn parse_angle_list(s: &str) -> Result<AngleSet, CircleError> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

/// An open counterclockwise arc from `start` to `end`.
///
/// When `start == end` the arc is the circle minus that point.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub start: Angle,
    pub end: Angle,
}

impl Arc {
    pub fn new(start: Angle, end: Angle) -> Arc {
        Arc { start, end }
    }

    /// Length in turns, in `(0, 1]`.
    pub fn length(&self) -> BigRational {
        if self.start == self.end {
            BigRational::one()
        } else {
            self.start.ccw_to(&self.end)
        }
    }

    pub fn contains(&self, theta: &Angle) -> bool {
        if *theta == self.start {
            return false;
        }
        if self.start == self.end {
            return true;
        }
        self.start.ccw_to(theta) < self.start.ccw_to(&self.end)
    }

    /// A point inside the arc.
    pub fn midpoint(&self) -> Angle {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        self.start.shift(&(self.length() * half))
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.start, self.end)
    }
}

impl fmt::Debug for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Whether `b` lies in a single complementary arc of `a`, disjoint from `a`.
pub fn unlinked(a: &AngleSet, b: &AngleSet) -> bool {
    if !a.is_disjoint(b) {
        return false;
    }
    if a.is_empty() || b.is_empty() {
        return true;
    }
    let n = a.len();
    let arc_of = |x: &Angle| a.rank(x) % n;
    let first = arc_of(b.first().expect("non-empty"));
    b.iter().all(|x| arc_of(x) == first)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ang(s: &str) -> Angle {
        s.parse().unwrap()
    }

    fn set(s: &str) -> AngleSet {
        parse_angle_list(s).unwrap()
    }

    #[test]
    fn normalizes_and_prints() {
        assert_eq!(Angle::new(3, 2).unwrap().to_string(), "1/2");
        assert_eq!(Angle::new(-1, 3).unwrap().to_string(), "2/3");
        assert_eq!(Angle::new(1, 1).unwrap(), Angle::zero());
        assert_eq!(Angle::zero().to_string(), "0");
        assert_eq!(ang("6/8").to_string(), "3/4");
        assert!("x/2".parse::<Angle>().is_err());
        assert!("1/0".parse::<Angle>().is_err());
    }

    #[test]
    fn map_examples() {
        assert_eq!(map_d(&ang("1/7"), 2).unwrap(), ang("2/7"));
        assert_eq!(map_d(&ang("5/8"), 3).unwrap(), ang("7/8"));
        assert_eq!(map_d(&ang("0"), 4).unwrap(), ang("0"));
        assert!(map_d(&ang("1/3"), 1).is_err());
        assert!(preimages(&ang("1/3"), 0).is_err());
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(preimages(&ang("0"), 3).unwrap(), set("0,1/3,2/3"));
        assert_eq!(preimages(&ang("1/7"), 2).unwrap(), set("1/14,4/7"));
        assert_eq!(preimages(&ang("1/2"), 2).unwrap(), set("1/4,3/4"));
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&ang("1/7"), 2).unwrap();
        assert_eq!((o.preperiod, o.period), (0, 3));
        assert_eq!(o.trajectory, vec![ang("1/7"), ang("2/7"), ang("4/7")]);
        let o = orbit(&ang("1/4"), 3).unwrap();
        assert_eq!((o.preperiod, o.period), (0, 2));
        assert_eq!(o.trajectory, vec![ang("1/4"), ang("3/4")]);
        let o = orbit(&ang("1/6"), 2).unwrap();
        assert_eq!((o.preperiod, o.period), (1, 2));
        assert_eq!(o.trajectory, vec![ang("1/6"), ang("1/3"), ang("2/3")]);
    }

    #[test]
    fn unlinked_examples() {
        assert!(unlinked(&set("1/7,2/7,4/7"), &set("9/14,11/14,1/14")));
        assert!(!unlinked(&set("0,1/2"), &set("1/4,3/4")));
        assert!(!unlinked(&set("1/3,2/3"), &set("1/3,5/6")));
    }

    #[test]
    fn arcs() {
        let a = Arc::new(ang("3/4"), ang("1/4"));
        assert!(a.contains(&ang("0")));
        assert!(!a.contains(&ang("1/2")));
        assert!(!a.contains(&ang("3/4")));
        assert_eq!(a.length(), BigRational::new(1.into(), 2.into()));
        assert_eq!(a.midpoint(), ang("0"));
        let full = Arc::new(ang("1/3"), ang("1/3"));
        assert!(full.contains(&ang("0")));
        assert!(!full.contains(&ang("1/3")));
        assert!(full.length().is_one());
    }

    #[test]
    fn set_ops() {
        let s = set("1/2,1/4,1/2");
        assert_eq!(s.len(), 2);
        assert_eq!(s.image(2), set("0,1/2"));
        assert_eq!(set("1/3,2/3").preimage(2), set("1/6,1/3,2/3,5/6"));
        assert_eq!(s.to_string(), "{1/4,1/2}");
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"["1/4","1/2"]"#);
        assert_eq!(serde_json::from_str::<AngleSet>(&json).unwrap(), s);
    }
}
