mod common;

use std::collections::BTreeSet;

use common::schemata::{all_schemata, as_pairs, Raw};
use laminations::schema::{classify_cubic, enumerate_markings, CubicType, MappingSchema};
use proptest::prelude::*;

#[test]
fn markings_match_a_denominator_scan() {
    let schemata = all_schemata(64);
    assert!(schemata.len() > 500, "{}", schemata.len());
    for raw in &schemata {
        let labels = raw.labels();
        let schema = raw.schema(&labels);
        let markings = enumerate_markings(&schema).unwrap();
        for m in &markings {
            assert!(m.satisfies(&schema));
            for (i, v) in labels.iter().enumerate() {
                assert_eq!(m.angles[v].times(u64::from(raw.delta[i])), m.angles[&labels[raw.sigma[i]]]);
            }
        }
        let found: BTreeSet<_> = markings.iter().map(|m| as_pairs(&m.angles, &labels)).collect();
        assert_eq!(found.len(), markings.len(), "duplicate markings for {schema}");
        assert_eq!(found, raw.scan(), "{schema}");
    }
}

#[test]
fn known_marking_counts() {
    let count = |t: &[(&str, &str, u32)]| enumerate_markings(&MappingSchema::from_triples(t).unwrap()).unwrap().len();
    assert_eq!(count(&[("v", "v", 3)]), 2);
    assert_eq!(count(&[("a", "b", 2), ("b", "a", 2)]), 3);
    assert_eq!(count(&[("a", "a", 2), ("b", "b", 2)]), 1);
    assert_eq!(count(&[("v", "v", 4)]), 3);
}

fn cubic_schema() -> impl Strategy<Value = Raw> {
    prop_oneof![
        Just(Raw { sigma: vec![0], delta: vec![3] }),
        (0usize..2, 0usize..2).prop_map(|(a, b)| Raw { sigma: vec![a, b], delta: vec![2, 2] }),
    ]
}

fn reduced_schema() -> impl Strategy<Value = Raw> {
    (1usize..=4).prop_flat_map(|n| {
        (prop::collection::vec(0..n, n), prop::collection::vec(2u32..=3, n))
            .prop_map(|(sigma, delta)| Raw { sigma, delta })
    })
}

fn relabel(raw: &Raw, perm: &[usize], names: &[String]) -> (MappingSchema, Vec<String>) {
    // Vertex i becomes names[perm[i]] and is listed in permuted order.
    let n = raw.sigma.len();
    let new_name = |i: usize| names[perm[i]].clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| perm[i]);
    let schema = MappingSchema::new(
        order.iter().map(|&i| new_name(i)).collect(),
        (0..n).map(|i| (new_name(i), new_name(raw.sigma[i]))).collect(),
        (0..n).map(|i| (new_name(i), raw.delta[i])).collect(),
    )
    .unwrap();
    (schema, (0..n).map(new_name).collect())
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn cubic_type_survives_relabeling(
        (raw, perm) in cubic_schema().prop_flat_map(|r| { let n = r.sigma.len(); (Just(r), permutation(n)) }),
        names in prop::collection::btree_set("[a-z]{1,4}", 2),
    ) {
        let names: Vec<String> = names.into_iter().collect();
        let original = raw.schema(&raw.labels());
        let (renamed, _) = relabel(&raw, &perm, &names);
        let t = classify_cubic(&original).unwrap();
        prop_assert_eq!(classify_cubic(&renamed).unwrap(), t);
        let expected = match (raw.sigma.len(), raw.periodic().iter().filter(|p| **p).count()) {
            (1, _) => CubicType::Adjacent,
            (_, 1) => CubicType::Capture,
            _ if raw.sigma[0] == 0 => CubicType::Disjoint,
            _ => CubicType::Bitransitive,
        };
        prop_assert_eq!(t, expected);
    }

    #[test]
    fn markings_survive_relabeling(
        (raw, perm) in reduced_schema().prop_flat_map(|r| { let n = r.sigma.len(); (Just(r), permutation(n)) }),
        names in prop::collection::btree_set("[a-z]{1,4}", 4),
    ) {
        let names: Vec<String> = names.into_iter().collect();
        let labels = raw.labels();
        let (renamed, new_labels) = relabel(&raw, &perm, &names);
        let before: BTreeSet<_> =
            enumerate_markings(&raw.schema(&labels)).unwrap().iter().map(|m| as_pairs(&m.angles, &labels)).collect();
        let after: BTreeSet<_> =
            enumerate_markings(&renamed).unwrap().iter().map(|m| as_pairs(&m.angles, &new_labels)).collect();
        prop_assert_eq!(before, after);
    }
}
