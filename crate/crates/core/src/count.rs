//! Point counts of `X(M)` over prime fields: direct enumeration, a counting
//! formula in exponent space, and exact interpolation of the counting polynomial.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hodge::{epoly, pw_table};
use crate::intlat::{bigint_json, count_affine_solutions, snf, IntMatrix};
use crate::poly::IntPoly;

pub const DEFAULT_BRUTE_BUDGET: u128 = 100_000_000;

/// Holdout primes used on top of the `n + m + 1` fit primes.
pub const HOLDOUTS: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Brute,
    Formula,
}

impl fmt::Display for CountMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMethod::Brute => "brute",
            CountMethod::Formula => "formula",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCountSample {
    pub q: u64,
    #[serde(with = "bigint_json")]
    pub count: BigInt,
    pub method: CountMethod,
}

pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut f = 3u64;
    while f.saturating_mul(f) <= q {
        if q.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

fn require_odd_prime(q: u64) -> Result<()> {
    if !is_prime(q) {
        Err(Error::NotPrime(q))
    } else if q == 2 {
        Err(Error::EvenPrime(q))
    } else {
        Ok(())
    }
}

fn pow_mod(mut base: u64, mut e: u64, q: u64) -> u64 {
    let mut acc = 1u64;
    base %= q;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * base as u128) % q as u128) as u64;
        }
        base = ((base as u128 * base as u128) % q as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Number of `z` in `(F_q^*)^m`, saturating.
pub fn torus_size(q: u64, m: usize) -> u128 {
    (0..m).fold(1u128, |acc, _| acc.saturating_mul(q as u128 - 1))
}

/// Enumerates every `z` in `(F_q^*)^m`; each equation `x_j y_j = c_j` then has
/// `q - 1` solutions when `c_j != 0` and `2q - 1` when `c_j = 0`.
pub fn count_bruteforce(m: &IntMatrix, q: u64, budget: u128) -> Result<PointCountSample> {
    require_odd_prime(q)?;
    let (rows, cols) = (m.rows(), m.cols());
    let needed = torus_size(q, rows);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let order = BigInt::from(q - 1);
    // powers[i][j][z - 1] = z^{a_ij} in F_q
    let powers: Vec<Vec<Vec<u64>>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let e = m[(i, j)].mod_floor(&order).to_u64().expect("reduced below q - 1");
                    (1..q).map(|z| pow_mod(z, e, q)).collect()
                })
                .collect()
        })
        .collect();

    // tally[s] = number of z with exactly s vanishing right-hand sides
    let mut tally = vec![0u64; cols + 1];
    let mut z = vec![1u64; rows];
    let mut mono = vec![1u64; cols];
    loop {
        mono.iter_mut().for_each(|v| *v = 1);
        for (i, &zi) in z.iter().enumerate() {
            for (j, v) in mono.iter_mut().enumerate() {
                *v = *v * powers[i][j][zi as usize - 1] % q;
            }
        }
        let vanishing = mono.iter().filter(|&&v| (v + 1) % q == 0).count();
        tally[vanishing] += 1;

        let mut pos = 0;
        while pos < rows {
            z[pos] += 1;
            if z[pos] < q {
                break;
            }
            z[pos] = 1;
            pos += 1;
        }
        if pos == rows {
            break;
        }
    }

    let generic = BigInt::from(q - 1);
    let special = BigInt::from(2 * q - 1);
    let count = tally
        .iter()
        .enumerate()
        .map(|(s, &t)| BigInt::from(t) * special.pow(s as u32) * generic.pow((cols - s) as u32))
        .sum();
    Ok(PointCountSample {
        q,
        count,
        method: CountMethod::Brute,
    })
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << n).map(move |mask| (0..n).filter(|&j| mask >> j & 1 == 1).collect())
}

/// `sum_S (q-1)^{n-|S|} q^{|S|} N_S`, where `N_S` counts exponent vectors `e` in
/// `(Z/(q-1))^m` with `(M^T e)_j = (q-1)/2` for `j` in `S`, i.e. `z^{a_j} = -1`.
pub fn count_formula(m: &IntMatrix, q: u64) -> Result<PointCountSample> {
    require_odd_prime(q)?;
    let n = m.cols();
    let order = BigInt::from(q - 1);
    let half = BigInt::from((q - 1) / 2);
    let qb = BigInt::from(q);
    let mut count = BigInt::zero();
    for s in subsets(n) {
        let system = m.select_columns(&s).transpose();
        let rhs = vec![half.clone(); s.len()];
        let solutions = count_affine_solutions(&system, &rhs, &order)?;
        count += order.pow((n - s.len()) as u32) * qb.pow(s.len() as u32) * solutions;
    }
    Ok(PointCountSample {
        q,
        count,
        method: CountMethod::Formula,
    })
}

/// `lcm` of the invariant factors of every column submatrix `M_S`.
pub fn subset_factor_lcm(m: &IntMatrix) -> BigInt {
    subsets(m.cols())
        .flat_map(|s| snf(&m.select_columns(&s)).nonzero_factors().to_vec())
        .fold(BigInt::one(), |acc, f| acc.lcm(&f))
}

/// The smallest `how_many` primes `q = 1 mod 2L`. On this class each `N_S` is
/// `(q-1)^{m - rank} prod f_i`, so the count is a polynomial in `q`.
pub fn choose_primes(m: &IntMatrix, how_many: usize) -> Vec<u64> {
    let step = (subset_factor_lcm(m) * 2u32)
        .to_u64()
        .expect("2L fits in u64 for any matrix we can count");
    let mut out = Vec::with_capacity(how_many);
    let mut q = 1u64;
    while out.len() < how_many {
        q += step;
        if is_prime(q) {
            out.push(q);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub polynomial: IntPoly,
    pub fit_primes: Vec<u64>,
    pub holdout_primes: Vec<u64>,
    /// Counted minus predicted, per holdout.
    #[serde(with = "bigint_json::vec")]
    pub residuals: Vec<BigInt>,
}

/// Exact Newton interpolation through the first `degree + 1` samples; the rest are
/// holdouts. The result must be a monic integer polynomial of the given degree
/// that reproduces every holdout.
pub fn interpolate(samples: &[PointCountSample], degree: usize) -> Result<InterpolationReport> {
    let needed = degree + 1 + HOLDOUTS;
    if samples.len() < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: samples.len(),
        });
    }
    let (fit, holdout) = samples.split_at(degree + 1);
    let xs: Vec<BigRational> = fit.iter().map(|s| BigRational::from_integer(s.q.into())).collect();

    // divided differences, in place
    let mut dd: Vec<BigRational> = fit.iter().map(|s| BigRational::from_integer(s.count.clone())).collect();
    for level in 1..dd.len() {
        for i in (level..dd.len()).rev() {
            let denom = &xs[i] - &xs[i - level];
            if denom.is_zero() {
                return Err(Error::InvalidModulus(format!("repeated sample at q = {}", fit[i].q)));
            }
            dd[i] = (&dd[i] - &dd[i - 1]) / denom;
        }
    }
    // expand sum dd[i] prod_{l<i} (q - x_l), innermost first
    let mut coeffs: Vec<BigRational> = vec![BigRational::zero()];
    for i in (0..dd.len()).rev() {
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (e, c) in coeffs.iter().enumerate() {
            next[e + 1] += c;
            next[e] -= c * &xs[i];
        }
        next[0] += &dd[i];
        coeffs = next;
    }
    let mut ints = Vec::with_capacity(coeffs.len());
    for c in &coeffs {
        if !c.is_integer() {
            return Err(Error::NonIntegralCoefficients(c.to_string()));
        }
        ints.push(c.to_integer());
    }
    let polynomial = IntPoly::new(ints);
    if polynomial.degree() != Some(degree) || !polynomial.leading().is_one() {
        return Err(Error::NotMonicOfDegree {
            expected: degree,
            got: polynomial.degree().unwrap_or(0),
            lead: polynomial.leading().to_string(),
        });
    }
    let mut residuals = Vec::with_capacity(holdout.len());
    for s in holdout {
        let predicted = polynomial.eval(&BigInt::from(s.q));
        if predicted != s.count {
            return Err(Error::HoldoutMismatch {
                q: s.q,
                counted: s.count.to_string(),
                predicted: predicted.to_string(),
            });
        }
        residuals.push(&s.count - predicted);
    }
    Ok(InterpolationReport {
        polynomial,
        fit_primes: fit.iter().map(|s| s.q).collect(),
        holdout_primes: holdout.iter().map(|s| s.q).collect(),
        residuals,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Total number of primes to count at; defaults to `n + m + 1` plus the holdouts.
    pub prime_budget: Option<usize>,
    pub brute_budget: u128,
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            prime_budget: None,
            brute_budget: DEFAULT_BRUTE_BUDGET,
            parallel: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteCheck {
    pub q: u64,
    #[serde(with = "bigint_json")]
    pub brute: BigInt,
    #[serde(with = "bigint_json")]
    pub formula: BigInt,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n: usize,
    pub m: usize,
    pub structure_epoly: IntPoly,
    pub counted_epoly: Option<IntPoly>,
    pub interpolation_error: Option<String>,
    pub samples: Vec<PointCountSample>,
    pub fit_primes: Vec<u64>,
    pub holdout_primes: Vec<u64>,
    /// `None` when no prime is affordable under the brute-force budget.
    pub brute_check: Option<BruteCheck>,
    #[serde(rename = "match")]
    pub matched: bool,
}

/// Compares the E-polynomial of the structure table with the polynomial
/// interpolated from point counts, plus one direct enumeration against the formula.
pub fn verify_match(m: &IntMatrix, opts: &VerifyOptions) -> Result<VerifyReport> {
    let table = pw_table(m)?;
    let structure_epoly = epoly(&table)?;
    let degree = m.rows() + m.cols();
    let needed = degree + 1 + HOLDOUTS;
    let how_many = opts.prime_budget.unwrap_or(needed);
    if how_many < needed {
        return Err(Error::InsufficientSamples {
            needed,
            got: how_many,
        });
    }
    let primes = choose_primes(m, how_many);
    let samples: Vec<PointCountSample> = if opts.parallel {
        primes.par_iter().map(|&q| count_formula(m, q)).collect::<Result<_>>()?
    } else {
        primes.iter().map(|&q| count_formula(m, q)).collect::<Result<_>>()?
    };

    let (counted_epoly, interpolation_error, fit_primes, holdout_primes) = match interpolate(&samples, degree) {
        Ok(r) => (Some(r.polynomial), None, r.fit_primes, r.holdout_primes),
        Err(e) => (
            None,
            Some(e.to_string()),
            primes[..degree + 1].to_vec(),
            primes[degree + 1..].to_vec(),
        ),
    };

    let brute_q = [primes[0], 3]
        .into_iter()
        .find(|&q| torus_size(q, m.rows()) <= opts.brute_budget);
    let brute_check = match brute_q {
        Some(q) => {
            let brute = count_bruteforce(m, q, opts.brute_budget)?.count;
            let formula = count_formula(m, q)?.count;
            Some(BruteCheck {
                q,
                agree: brute == formula,
                brute,
                formula,
            })
        }
        None => None,
    };

    let matched = counted_epoly.as_ref() == Some(&structure_epoly)
        && brute_check.as_ref().is_none_or(|b| b.agree);
    Ok(VerifyReport {
        n: m.cols(),
        m: m.rows(),
        structure_epoly,
        counted_epoly,
        interpolation_error,
        samples,
        fit_primes,
        holdout_primes,
        brute_check,
        matched,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat<R: AsRef<[i64]>>(rows: &[R]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn count(m: &IntMatrix, q: u64) -> BigInt {
        count_bruteforce(m, q, DEFAULT_BRUTE_BUDGET).unwrap().count
    }

    #[test]
    fn brute_examples() {
        assert_eq!(count(&mat(&[[2]]), 5), BigInt::from(26));
        assert_eq!(count(&mat(&[[2], [3]]), 3), BigInt::from(14));
        assert_eq!(count(&mat(&[[1, 1], [1, -1]]), 5), BigInt::from(466));
    }

    #[test]
    fn brute_errors() {
        let m = mat(&[[1]]);
        assert_eq!(count_bruteforce(&m, 2, 10), Err(Error::EvenPrime(2)));
        assert_eq!(count_bruteforce(&m, 9, 10), Err(Error::NotPrime(9)));
        assert_eq!(
            count_bruteforce(&mat(&[[1], [1]]), 11, 50),
            Err(Error::BudgetExceeded { needed: 100, budget: 50 })
        );
    }

    #[test]
    fn formula_examples() {
        assert_eq!(count_formula(&mat(&[[1]]), 7).unwrap().count, BigInt::from(43));
        let torus = IntMatrix::from_i64_with_cols(&[[0i64; 0]; 3], 0);
        assert_eq!(count_formula(&torus, 5).unwrap().count, BigInt::from(64));
        for q in [3, 5, 7, 11, 13] {
            for m in [mat(&[[2]]), mat(&[[2], [3]]), mat(&[[1, 1], [1, -1]]), mat(&[[0, 3], [-2, 1]])] {
                assert_eq!(count_formula(&m, q).unwrap().count, count(&m, q));
            }
        }
    }

    #[test]
    fn prime_choice() {
        assert_eq!(choose_primes(&mat(&[[1, 1], [1, -1]]), 5), vec![5, 13, 17, 29, 37]);
        assert_eq!(choose_primes(&mat(&[[1]]), 3), vec![3, 5, 7]);
        assert_eq!(choose_primes(&mat(&[[3]]), 4), vec![7, 13, 19, 31]);
    }

    #[test]
    fn interpolation_examples() {
        let x2 = mat(&[[2]]);
        let samples: Vec<_> = [5, 13, 17, 29, 37].iter().map(|&q| count_formula(&x2, q).unwrap()).collect();
        assert_eq!(
            samples[..3].iter().map(|s| s.count.clone()).collect::<Vec<_>>(),
            vec![BigInt::from(26), BigInt::from(170), BigInt::from(290)]
        );
        let r = interpolate(&samples, 2).unwrap();
        assert_eq!(r.polynomial, IntPoly::from_i64(&[1, 0, 1]));
        assert!(r.residuals.iter().all(Zero::is_zero));

        let x1 = mat(&[[1]]);
        let samples: Vec<_> = [3, 5, 7, 11, 13].iter().map(|&q| count_formula(&x1, q).unwrap()).collect();
        assert_eq!(interpolate(&samples, 2).unwrap().polynomial, IntPoly::from_i64(&[1, -1, 1]));

        let c = IntMatrix::from_i64_with_cols(&[[0i64; 0]; 1], 0);
        let samples: Vec<_> = [3, 5, 7, 11].iter().map(|&q| count_formula(&c, q).unwrap()).collect();
        assert_eq!(interpolate(&samples, 1).unwrap().polynomial, IntPoly::q_minus_one());
    }

    #[test]
    fn interpolation_errors() {
        let s = |q: u64, c: i64| PointCountSample {
            q,
            count: BigInt::from(c),
            method: CountMethod::Formula,
        };
        assert!(matches!(
            interpolate(&[s(3, 1), s(5, 2)], 1),
            Err(Error::InsufficientSamples { needed: 4, got: 2 })
        ));
        // q^2 - q + 1 at 3, 5, 7, then a wrong holdout
        assert!(matches!(
            interpolate(&[s(3, 7), s(5, 21), s(7, 43), s(11, 111), s(13, 150)], 2),
            Err(Error::HoldoutMismatch { q: 13, .. })
        ));
        assert!(matches!(
            interpolate(&[s(3, 0), s(5, 1), s(7, 3), s(11, 4), s(13, 5)], 2),
            Err(Error::NonIntegralCoefficients(_))
        ));
        assert!(matches!(
            interpolate(&[s(3, 6), s(5, 10), s(7, 14), s(11, 22), s(13, 26)], 2),
            Err(Error::NotMonicOfDegree { expected: 2, got: 1, .. })
        ));
    }

    #[test]
    fn verify_examples() {
        let opts = VerifyOptions::default();
        let r = verify_match(&mat(&[[1, 1], [1, -1]]), &opts).unwrap();
        assert!(r.matched);
        assert_eq!(r.structure_epoly, IntPoly::from_i64(&[1, -2, 4, -2, 1]));
        assert_eq!(r.brute_check.unwrap().q, 5);
        for d in 1..=6 {
            let r = verify_match(&mat(&[[d]]), &opts).unwrap();
            assert!(r.matched);
            assert_eq!(r.counted_epoly, Some(IntPoly::from_i64(&[1, d - 2, 1])));
        }
        let r = verify_match(&mat(&[[2], [3]]), &opts).unwrap();
        assert_eq!(r.counted_epoly, Some(IntPoly::from_i64(&[-1, 2, -2, 1])));
        assert!(r.matched);
    }

    #[test]
    fn verify_is_independent_of_parallelism() {
        let m = mat(&[[2, -1], [1, 3], [0, 2]]);
        let par = verify_match(&m, &VerifyOptions::default()).unwrap();
        let seq = verify_match(
            &m,
            &VerifyOptions {
                parallel: false,
                ..VerifyOptions::default()
            },
        )
        .unwrap();
        assert_eq!(par, seq);
        assert!(par.matched);
    }
}
