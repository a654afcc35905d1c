mod common;

use isocluster::count::{count_formula, interpolate, verify_match, VerifyOptions, choose_primes};
use isocluster::hodge::{
    block_table_torus, block_table_xd, epoly, gamma_invariants, kunneth, pw_table, weight_poly, BigradedTable,
};
use isocluster::intlat::FiniteAbelianSubgroup;
use num_bigint::BigInt;
use proptest::prelude::*;

use common::{corpus, CORPUS_SEED};

fn block() -> impl Strategy<Value = BigradedTable> {
    prop_oneof![Just(block_table_torus()), (1u64..=5).prop_map(|d| block_table_xd(d).unwrap())]
}

#[test]
fn corpus_tables_are_normalised_with_even_weights() {
    for m in corpus(CORPUS_SEED, 60) {
        let t = pw_table(&m).unwrap();
        let degree_zero: Vec<_> = t.entries().iter().filter(|e| e.k == 0).collect();
        assert_eq!(degree_zero.len(), 1, "{m:?}");
        let e = degree_zero[0];
        assert_eq!((e.w, e.p, e.dim), (0, 0, 1), "{m:?}");
        assert!(t.entries().iter().all(|e| e.w % 2 == 0));
        assert_eq!(t.dimension(), m.rows() + m.cols());
    }
}

#[test]
fn euler_characteristic_matches_epoly_at_one() {
    for m in corpus(CORPUS_SEED, 60) {
        let t = pw_table(&m).unwrap();
        let euler: i64 = t.betti().iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum();
        let e1 = epoly(&t).unwrap().eval(&BigInt::from(1));
        assert_eq!(e1, BigInt::from(euler), "{m:?}");
        if m.rows() > m.cols() {
            assert_eq!(e1, BigInt::from(0), "{m:?}");
        }
    }
}

#[test]
fn epoly_is_monic_of_full_degree() {
    for m in corpus(CORPUS_SEED, 60) {
        let e = epoly(&pw_table(&m).unwrap()).unwrap();
        assert_eq!(e.degree(), Some(m.rows() + m.cols()));
        assert_eq!(e.leading(), BigInt::from(1));
    }
}

#[test]
fn torus_power_epoly() {
    for m in 0..5 {
        let t = kunneth(&vec![block_table_torus(); m]);
        assert_eq!(epoly(&t).unwrap(), isocluster::poly::IntPoly::q_minus_one().pow(m));
    }
}

#[test]
fn structure_side_agrees_with_interpolated_counts() {
    for m in corpus(CORPUS_SEED ^ 1, 20) {
        let degree = m.rows() + m.cols();
        let samples: Vec<_> = choose_primes(&m, degree + 3).into_iter().map(|q| count_formula(&m, q).unwrap()).collect();
        let counted = interpolate(&samples, degree).unwrap().polynomial;
        assert_eq!(counted, epoly(&pw_table(&m).unwrap()).unwrap(), "{m:?}");
        assert!(verify_match(&m, &VerifyOptions::default()).unwrap().matched);
    }
}

proptest! {
    #[test]
    fn weight_polynomial_is_multiplicative(a in block(), b in block(), c in block()) {
        let ab = kunneth(&[a.clone(), b.clone()]);
        prop_assert_eq!(weight_poly(&ab).unwrap(), &weight_poly(&a).unwrap() * &weight_poly(&b).unwrap());
        let abc = kunneth(&[a.clone(), b.clone(), c.clone()]);
        let total = weight_poly(&abc).unwrap();
        let one = BigInt::from(1);
        prop_assert_eq!(total.eval(&one, &one), BigInt::from(abc.total_dim()));
        prop_assert_eq!(
            epoly(&abc).unwrap(),
            &(&epoly(&a).unwrap() * &epoly(&b).unwrap()) * &epoly(&c).unwrap()
        );
    }

    #[test]
    fn invariants_only_shrink(d in 1u64..=4, gens in prop::collection::vec(prop::collection::vec(0i64..4, 2), 0..3)) {
        let x = block_table_xd(d).unwrap();
        let prod = kunneth(&[x.clone(), x]);
        let gamma = FiniteAbelianSubgroup::new(d, 2, gens).unwrap();
        let inv = gamma_invariants(&prod, &gamma).unwrap();
        for e in inv.entries() {
            prop_assert!(prod.entries().contains(e));
        }
        let annihilator = gamma.annihilator().membership();
        prop_assert!(inv.entries().iter().all(|e| annihilator.contains(&e.chi)));
        if gamma.is_trivial() {
            prop_assert_eq!(inv, prod);
        }
    }
}

#[test]
fn table_json_round_trip() {
    let t = pw_table(&isocluster::IntMatrix::from_i64(&[[1, 1], [1, -1]])).unwrap();
    let json = serde_json::to_string(&t).unwrap();
    assert_eq!(serde_json::from_str::<BigradedTable>(&json).unwrap(), t);
}
