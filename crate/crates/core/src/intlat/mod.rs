//! Exact integer lattice algebra: Hermite and Smith forms, the diagonal
//! completion of a full-column-rank matrix, finite abelian (sub)groups and
//! counting solutions of linear congruences.

mod completion;
mod congruence;
mod group;
mod hnf;
mod matrix;
mod snf;

pub use completion::{
    column_rank, diagonal_completion, gamma_embedding, require_full_column_rank,
    DiagonalCompletion,
};
pub use congruence::count_affine_solutions;
pub use group::{cokernel, FiniteAbelianGroup, FiniteAbelianSubgroup, Membership};
pub use hnf::{hnf_row, is_row_hermite, RowReduction};
pub use matrix::{bigint_json, IntMatrix};
pub use snf::{snf, SmithForm};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Extended gcd: `(g, s, t)` with `s*a + t*b = g >= 0`.
pub fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (BigInt::one(), BigInt::zero());
    let (mut old_t, mut t) = (BigInt::zero(), BigInt::one());
    while !r.is_zero() {
        let q = old_r.div_floor(&r);
        let next_r = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, next_r);
        let next_s = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, next_s);
        let next_t = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, next_t);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xgcd_identity() {
        for a in -12i64..=12 {
            for b in -12i64..=12 {
                let (a, b) = (BigInt::from(a), BigInt::from(b));
                let (g, s, t) = xgcd(&a, &b);
                assert_eq!(&s * &a + &t * &b, g);
                assert_eq!(g, a.gcd(&b));
            }
        }
        let (g, s, t) = xgcd(&BigInt::from(2), &BigInt::from(3));
        assert_eq!((g, s, t), (BigInt::from(1), BigInt::from(-1), BigInt::from(1)));
    }
}
