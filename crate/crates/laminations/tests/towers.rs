mod common;

use laminations::fixtures::fixture;
use laminations::lamination::{generated_classes, verify_tower, PuzzleTower, PuzzleView};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fixture_towers() -> Vec<PuzzleTower> {
    ["basilica", "rabbit", "airplane", "quartic", "fixed-critical-cubic", "capture-a0", "period-two-cubic"]
        .iter()
        .map(|n| fixture(n).unwrap().tower().unwrap())
        .collect()
}

/// Pieces of every level cover the circle exactly once.
fn check_partition(view: &PuzzleView) -> Result<(), String> {
    for level in view.levels() {
        let total: BigRational = level.pieces().iter().map(|p| p.measure()).fold(BigRational::zero(), |a, b| a + b);
        if !total.is_one() {
            return Err(format!("depth {}: pieces measure {total}", level.depth));
        }
        // Every support gap belongs to exactly one piece.
        let arcs: usize = level.pieces().iter().map(|p| p.arcs.len()).sum();
        let expected = level.lamination().support().len();
        if arcs != expected && !(expected == 0 && level.pieces().len() == 1) {
            return Err(format!("depth {}: {arcs} arcs for {expected} support points", level.depth));
        }
    }
    Ok(())
}

/// Each piece sits in its parent, and taking parents commutes with taking images.
fn check_nesting(view: &PuzzleView) -> Result<(), String> {
    for k in 1..=view.depth() {
        let level = view.level(k);
        let up = view.level(k - 1);
        for (i, piece) in level.pieces().iter().enumerate() {
            let parent = level.parents()[i];
            let p = piece.sample_point();
            if up.locate(&p) != Some(parent) {
                return Err(format!("depth {k}: piece {i} is not inside its parent {parent}"));
            }
            if k >= 2 {
                let via_image = view.level(k - 1).parents()[level.images()[i]];
                let via_parent = up.images()[parent];
                if via_image != via_parent {
                    return Err(format!(
                        "depth {k}: piece {i}: parent of image {via_image}, image of parent {via_parent}"
                    ));
                }
            }
            if level.preimage_degrees()[i] != level.winding_degrees()[i] || piece.degree != level.winding_degrees()[i] {
                return Err(format!(
                    "depth {k}: piece {i}: degrees {} / {} / {}",
                    piece.degree,
                    level.preimage_degrees()[i],
                    level.winding_degrees()[i]
                ));
            }
        }
    }
    Ok(())
}

fn check_generated_idempotent(tower: &PuzzleTower) -> Result<(), String> {
    let support = tower.deepest().support().clone();
    let once = generated_classes(tower, &support).lamination;
    let twice = generated_classes(tower, once.support()).lamination;
    if once != twice {
        return Err("generated classes change when recomputed on their own support".into());
    }
    Ok(())
}

#[test]
fn degree_identity_on_fixtures_and_random_towers() {
    let mut towers = fixture_towers();
    towers.extend(common::random_towers(7, 60));
    let mut per_degree = [0usize; 5];
    for tower in &towers {
        assert!(verify_tower(tower).is_valid());
        let view = PuzzleView::new(tower).unwrap();
        for k in 0..=tower.depth() {
            let check = view.degree_check(k);
            assert!(check.holds, "degree {} depth {k}: {check:?}", tower.degree());
            assert_eq!(check.inventory.implied_degree(), tower.degree());
        }
        per_degree[tower.degree() as usize] += 1;
    }
    assert!(per_degree[2] >= 20 && per_degree[3] >= 20 && per_degree[4] >= 20, "{per_degree:?}");
}

#[test]
fn random_towers_reach_their_depth() {
    let towers = common::random_towers(11, 60);
    assert!(towers.iter().any(|t| t.depth() == common::max_depth(t.degree())));
    assert!(towers.iter().any(|t| t.levels().iter().any(|l| l.nontrivial_classes().count() > 0)));
}

#[test]
fn fixture_towers_partition_and_nest() {
    for tower in fixture_towers() {
        let view = PuzzleView::new(&tower).unwrap();
        check_partition(&view).unwrap();
        check_nesting(&view).unwrap();
        check_generated_idempotent(&tower).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_towers_partition_and_nest(seed in any::<u64>(), d in 2u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let depth = (seed % (common::max_depth(d) as u64 + 1)) as usize;
        let tower = common::random_tower(&mut rng, d, depth);
        prop_assume!(tower.is_some());
        let tower = tower.unwrap();
        let view = PuzzleView::new(&tower).unwrap();
        prop_assert_eq!(check_partition(&view), Ok(()));
        prop_assert_eq!(check_nesting(&view), Ok(()));
        prop_assert_eq!(check_generated_idempotent(&tower), Ok(()));
        for k in 0..=tower.depth() {
            prop_assert!(view.degree_check(k).holds);
        }
    }
}
