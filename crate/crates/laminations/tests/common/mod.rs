//! Seeded generators shared by the property suites.

#![allow(dead_code)]

pub mod schemata;

use laminations::circle::{orbit, parse_angle_list, Angle, AngleSet};
use laminations::fixtures::{fixture, FIXTURES};
use laminations::lamination::{CriticalPortrait, FiniteLamination, PuzzleTower};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn set(s: &str) -> AngleSet {
    parse_angle_list(s).unwrap()
}

fn pow(d: u32, n: u32) -> u64 {
    u64::from(d).pow(n)
}

/// Singleton classes on the orbit of a random periodic angle of period at most 3.
fn periodic_cycle(rng: &mut ChaCha8Rng, d: u32) -> FiniteLamination {
    let n = rng.gen_range(1..=3);
    let den = pow(d, n) - 1;
    let theta = Angle::new(rng.gen_range(0..den), den).unwrap();
    let cycle: AngleSet = orbit(&theta, d).unwrap().cycle().iter().cloned().collect();
    FiniteLamination::with_support(d, &cycle, vec![]).unwrap()
}

/// Level 0 of a fixture of degree `d` that is built by pullback.
fn fixture_level0(rng: &mut ChaCha8Rng, d: u32) -> FiniteLamination {
    let names: Vec<&str> =
        FIXTURES.iter().filter(|f| f.degree == d && f.portrait().is_some()).map(|f| f.name).collect();
    fixture(names[rng.gen_range(0..names.len())]).unwrap().level0().unwrap()
}

/// A random angle with a small odd denominator.
fn random_angle(rng: &mut ChaCha8Rng) -> Angle {
    let q = 2 * rng.gen_range(2u64..40) + 1;
    Angle::new(rng.gen_range(0..q), q).unwrap()
}

/// `{ψ, ψ + 1/d, ..., ψ + (d-1)/d}`.
fn polygon(psi: &Angle, d: u32) -> AngleSet {
    (0..u64::from(d)).map(|j| psi.shift(&Angle::new(j, d).unwrap().value().clone())).collect()
}

/// `d - 1` disjoint chords of length `1/d` with positive gaps between
/// them, the first starting at `start`.
fn chord_chain(rng: &mut ChaCha8Rng, d: u32, start: &Angle) -> Vec<AngleSet> {
    let gaps: Vec<u64> = (0..d).map(|_| rng.gen_range(1..6)).collect();
    let total: u64 = gaps.iter().sum();
    let unit = u64::from(d) * total;
    let side = Angle::new(1, d).unwrap().value().clone();
    let mut at = start.clone();
    let mut chords = Vec::new();
    for g in gaps.iter().take(d as usize - 1) {
        let end = at.shift(&side);
        chords.push([at.clone(), end.clone()].into_iter().collect());
        at = end.shift(Angle::new(*g, unit).unwrap().value());
    }
    chords
}

/// A preimage of a random support angle of `lam0`.
fn preimage_of_support(rng: &mut ChaCha8Rng, lam0: &FiniteLamination) -> Angle {
    let d = lam0.degree();
    let support = lam0.support().as_slice();
    let phi = &support[rng.gen_range(0..support.len())];
    Angle::new(phi.numer().clone() + rng.gen_range(0..d), phi.denom().clone() * d).unwrap()
}

fn random_portrait(rng: &mut ChaCha8Rng, lam0: &FiniteLamination) -> Option<CriticalPortrait> {
    let d = lam0.degree();
    let elements = match rng.gen_range(0..3) {
        _ if d == 2 => vec![polygon(&random_angle(rng), d)],
        0 => vec![polygon(&random_angle(rng), d)],
        1 => {
            let start = random_angle(rng);
            chord_chain(rng, d, &start)
        }
        // The first chord maps into the support: a critical class on the Julia side.
        _ => {
            let start = preimage_of_support(rng, lam0);
            chord_chain(rng, d, &start)
        }
    };
    CriticalPortrait::new(d, elements).ok()
}

/// A valid tower with a random level 0 and critical portrait, or `None` if
/// the pullback does not verify.
pub fn random_tower(rng: &mut ChaCha8Rng, d: u32, depth: usize) -> Option<PuzzleTower> {
    let lam0 = if rng.gen_bool(0.5) { fixture_level0(rng, d) } else { periodic_cycle(rng, d) };
    let portrait = random_portrait(rng, &lam0)?;
    PuzzleTower::from_level0(lam0).with_portrait(portrait).ok()?.extend_to(depth).ok()
}

/// The deepest level allowed for degree `d`, keeping supports small.
pub fn max_depth(d: u32) -> usize {
    match d {
        2 => 6,
        3 => 5,
        _ => 4,
    }
}

/// `count` valid random towers over degrees 2, 3 and 4.
pub fn random_towers(seed: u64, count: usize) -> Vec<PuzzleTower> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        assert!(attempts < 100 * count, "too few valid towers: {} of {attempts}", out.len());
        let d = [2, 3, 4][out.len() % 3];
        let depth = rng.gen_range(0..=max_depth(d));
        if let Some(t) = random_tower(&mut rng, d, depth) {
            out.push(t);
        }
    }
    out
}

pub const BASILICA_SVG_SHA256: &str = "504d2e1d88ebd3b8c8154bba3993c7b221e36e52527c396ab54a1474f8b7bfb9";
pub const RABBIT_SVG_SHA256: &str = "0c3e3c82d4facce5393eba677c996b9a05bc5c57c4c9908f16cec42b1a891381";
