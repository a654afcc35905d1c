use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{snf, IntMatrix};
use crate::error::{Error, Result};

/// Number of `x` in `(Z/N)^c` with `a x = b (mod N)`.
///
/// With `p a q = diag(f)` the substitution `x = q y` is a bijection of `(Z/N)^c`,
/// and the system splits into scalar congruences `f_i y_i = (p b)_i`, each with
/// `gcd(f_i, N)` solutions when solvable. Rows past the diagonal need `(p b)_i = 0`;
/// columns past it are free.
pub fn count_affine_solutions(a: &IntMatrix, b: &[BigInt], modulus: &BigInt) -> Result<BigInt> {
    if !modulus.is_positive() {
        return Err(Error::InvalidModulus(modulus.to_string()));
    }
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let s = snf(a);
    let rhs = s.p.mul_vec(b);
    let diag = a.rows().min(a.cols());
    let mut count = BigInt::one();
    for (i, r) in rhs.iter().enumerate() {
        let f = s.factors.get(i).cloned().unwrap_or_else(BigInt::zero);
        let g = f.gcd(modulus);
        if !r.is_multiple_of(&g) {
            return Ok(BigInt::zero());
        }
        if i < diag {
            count *= g;
        }
    }
    for _ in diag..a.cols() {
        count *= modulus;
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn count(a: &[&[i64]], b: &[i64], n: i64) -> BigInt {
        let a = IntMatrix::from_i64(a);
        let b: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
        count_affine_solutions(&a, &b, &BigInt::from(n)).unwrap()
    }

    #[test]
    fn scalar_examples() {
        assert_eq!(count(&[&[2]], &[2], 4), BigInt::from(2));
        assert_eq!(count(&[&[0]], &[0], 7), BigInt::from(7));
        assert_eq!(count(&[&[2]], &[1], 4), BigInt::zero());
    }

    #[test]
    fn empty_systems() {
        let none = IntMatrix::zeros(0, 2);
        assert_eq!(
            count_affine_solutions(&none, &[], &BigInt::from(5)).unwrap(),
            BigInt::from(25)
        );
        let no_vars = IntMatrix::zeros(1, 0);
        let one = [BigInt::one()];
        assert!(count_affine_solutions(&no_vars, &one, &BigInt::from(5)).unwrap().is_zero());
        assert!(count_affine_solutions(&no_vars, &one, &BigInt::one()).unwrap().is_one());
    }

    #[test]
    fn bad_arguments() {
        let a = IntMatrix::from_i64(&[[1]]);
        assert!(count_affine_solutions(&a, &[], &BigInt::from(3)).is_err());
        assert!(count_affine_solutions(&a, &[BigInt::one()], &BigInt::zero()).is_err());
    }

    fn brute(a: &IntMatrix, b: &[i64], n: i64) -> BigInt {
        let c = a.cols();
        let total = (n as u64).pow(c as u32);
        let mut hits = 0u64;
        for code in 0..total {
            let mut x = Vec::with_capacity(c);
            let mut k = code;
            for _ in 0..c {
                x.push(BigInt::from(k % n as u64));
                k /= n as u64;
            }
            let ax = a.mul_vec(&x);
            let ok = ax
                .iter()
                .zip(b)
                .all(|(l, r)| (l - BigInt::from(*r)).mod_floor(&BigInt::from(n)).is_zero());
            if ok {
                hits += 1;
            }
        }
        BigInt::from(hits)
    }

    fn system() -> impl Strategy<Value = (IntMatrix, Vec<i64>, i64)> {
        (0usize..=3, 0usize..=3, 1i64..=12).prop_flat_map(|(r, c, n)| {
            (
                prop::collection::vec(prop::collection::vec(-6i64..=6, c), r)
                    .prop_map(move |rows| IntMatrix::from_i64_with_cols(&rows, c)),
                prop::collection::vec(-6i64..=6, r),
                Just(n),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(512))]
        #[test]
        fn agrees_with_enumeration((a, b, n) in system()) {
            let bb: Vec<BigInt> = b.iter().map(|&x| BigInt::from(x)).collect();
            let fast = count_affine_solutions(&a, &bb, &BigInt::from(n)).unwrap();
            prop_assert_eq!(fast, brute(&a, &b, n));
        }
    }
}
