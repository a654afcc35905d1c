mod common;

use isocluster::cluster::{classify, ExtendedExchangeMatrix, Quiver};
use isocluster::IntMatrix;
use proptest::prelude::*;

use common::{random_acyclic_seed, random_seed, rng};

fn top_is_skew(b: &ExtendedExchangeMatrix) -> bool {
    let n = b.n();
    let mv = b.mutable_vertices();
    (0..n).all(|c| (0..n).all(|r| b.matrix()[(mv[r], c)] == -&b.matrix()[(mv[c], r)]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mutation_is_an_involution(seed in any::<u64>()) {
        let b = random_seed(&mut rng(seed));
        for &k in b.mutable_vertices() {
            prop_assert_eq!(b.mutate(k).unwrap().mutate(k).unwrap(), b.clone());
        }
    }

    #[test]
    fn mutation_keeps_the_top_skew(seed in any::<u64>(), steps in prop::collection::vec(0usize..4, 0..6)) {
        let b = random_seed(&mut rng(seed));
        let seq: Vec<usize> = steps.iter().map(|&s| s % b.n()).collect();
        let out = b.mutate_seq(&seq).unwrap();
        prop_assert!(top_is_skew(&out));
        // undoing in reverse order returns to the start
        let back: Vec<usize> = seq.iter().rev().copied().collect();
        prop_assert_eq!(out.mutate_seq(&back).unwrap(), b);
    }

    #[test]
    fn matrix_and_quiver_mutation_commute(seed in any::<u64>()) {
        let b = random_seed(&mut rng(seed));
        for &k in b.mutable_vertices() {
            prop_assert_eq!(b.mutate(k).unwrap().to_quiver(), b.to_quiver().mutate(k).unwrap());
        }
    }

    #[test]
    fn freezing_commutes_with_quiver_construction(seed in any::<u64>(), pick in any::<usize>()) {
        let b = random_seed(&mut rng(seed));
        let v = b.mutable_vertices()[pick % b.n()];
        prop_assert_eq!(b.freeze(&[v]).unwrap().to_quiver(), b.to_quiver().freeze(&[v]).unwrap());
    }

    #[test]
    fn classification_implications(seed in any::<u64>()) {
        let mut r = rng(seed);
        for b in [random_seed(&mut r), random_acyclic_seed(&mut r)] {
            let c = classify(&b);
            prop_assert!(!c.isolated || c.acyclic);
            prop_assert!(!c.acyclic || c.louise);
            if c.acyclic {
                let q = b.to_quiver().reduced();
                prop_assert_eq!(c.separating_edges, q.mutable_edges());
            }
        }
    }

    #[test]
    fn acyclic_seeds_have_presentations(seed in any::<u64>()) {
        let b = random_acyclic_seed(&mut rng(seed));
        let eqs = b.acyclic_presentation().unwrap();
        prop_assert_eq!(eqs.len(), b.n());
        for (e, &v) in eqs.iter().zip(b.mutable_vertices()) {
            prop_assert_eq!(e.vertex, v);
            // at most one side of each exponent is nonzero
            prop_assert!(e.positive.iter().zip(&e.negative).all(|(p, n)| p.sign() == num_bigint::Sign::NoSign || n.sign() == num_bigint::Sign::NoSign));
        }
    }
}

#[test]
fn quiver_mutation_example_with_frozen_vertex() {
    // 3 -> 1 -> 2 with 3 frozen; mutating at 1 gives 1 -> 3, 2 -> 1, 3 -> 2
    let b = ExtendedExchangeMatrix::from_i64(&[[0, 1], [-1, 0], [1, 0]]).unwrap();
    let expected = Quiver::from_edges(vec![true, true, false], &[(0, 2, 1), (1, 0, 1), (2, 1, 1)]).unwrap();
    assert_eq!(b.to_quiver().mutate(0).unwrap(), expected);
    assert_eq!(b.mutate(0).unwrap().to_quiver(), expected);
}

#[test]
fn louise_needs_all_three_freezings() {
    // two disjoint triangles joined by 2 -> 3; the bridge is the only separating edge
    let mut rows = vec![vec![0i64; 6]; 6];
    for &(i, j) in &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
        rows[i][j] = 1;
        rows[j][i] = -1;
    }
    let b = ExtendedExchangeMatrix::from_i64(&rows).unwrap();
    let c = classify(&b);
    assert!(!c.acyclic && !c.louise);

    // a bare triangle has no separating edge at all
    let b = ExtendedExchangeMatrix::from_i64(&[[0, 1, -1], [-1, 0, 1], [1, -1, 0]]).unwrap();
    assert!(classify(&b).separating_edges.is_empty());
}

#[test]
fn isolated_seeds_with_frozen_paths_are_acyclic() {
    let m = IntMatrix::from_i64(&[[1, -2], [3, 0], [-1, 1]]);
    let b = isocluster::variety::isolated_seed(&m);
    let c = classify(&b);
    assert!(c.isolated && c.acyclic && c.louise);
}

#[test]
fn classification_json_has_four_fields() {
    let b = ExtendedExchangeMatrix::from_i64(&[[0, 1], [-1, 0]]).unwrap();
    let v: serde_json::Value = serde_json::to_value(classify(&b)).unwrap();
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["acyclic", "isolated", "louise", "separating_edges"]);
}
