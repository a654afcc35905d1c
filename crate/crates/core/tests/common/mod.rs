#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use isocluster::cluster::ExtendedExchangeMatrix;
use isocluster::intlat::column_rank;
use isocluster::IntMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 20_240_611;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Full-column-rank matrices with `n <= m <= 3` and entries in `[-3, 3]`.
pub fn corpus(seed: u64, count: usize) -> Vec<IntMatrix> {
    let mut r = rng(seed);
    let mut out = vec![
        IntMatrix::from_i64(&[[1, 1], [1, -1]]),
        IntMatrix::from_i64(&[[2], [3]]),
        IntMatrix::from_i64_with_cols(&[[0i64; 0]; 2], 0),
    ];
    while out.len() < count {
        let m = r.gen_range(1..=3usize);
        let n = r.gen_range(1..=m);
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| r.gen_range(-3..=3)).collect())
            .collect();
        let mat = IntMatrix::from_i64(&rows);
        if column_rank(&mat) == n && !out.contains(&mat) {
            out.push(mat);
        }
    }
    out
}

/// A random seed with `n` mutable and `m` frozen vertices, `n + m <= 6`, entries in `[-4, 4]`.
pub fn random_seed(r: &mut ChaCha8Rng) -> ExtendedExchangeMatrix {
    let n = r.gen_range(1..=4usize);
    let m = r.gen_range(0..=6 - n);
    let mut b = vec![vec![0i64; n]; n + m];
    for i in 0..n {
        for j in i + 1..n {
            let x = r.gen_range(-4..=4);
            b[i][j] = x;
            b[j][i] = -x;
        }
    }
    for row in b.iter_mut().skip(n) {
        for x in row.iter_mut() {
            *x = r.gen_range(-4..=4);
        }
    }
    ExtendedExchangeMatrix::from_i64(&b).unwrap()
}

/// A random seed whose mutable part is an orientation of a random forest, hence acyclic.
pub fn random_acyclic_seed(r: &mut ChaCha8Rng) -> ExtendedExchangeMatrix {
    let n = r.gen_range(2..=5usize);
    let m = r.gen_range(0..=6 - n);
    let mut b = vec![vec![0i64; n]; n + m];
    // arrows only from lower to higher labels under a random relabelling
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, r.gen_range(0..=i));
    }
    for a in 0..n {
        for c in a + 1..n {
            if r.gen_bool(0.5) {
                let k = r.gen_range(1..=3);
                let (i, j) = (order[a], order[c]);
                b[i][j] = k;
                b[j][i] = -k;
            }
        }
    }
    for row in b.iter_mut().skip(n) {
        for x in row.iter_mut() {
            *x = r.gen_range(-2..=2);
        }
    }
    ExtendedExchangeMatrix::from_i64(&b).unwrap()
}

fn pow_mod(base: u64, e: u64, q: u64) -> u64 {
    (0..e).fold(1, |acc, _| acc * base % q)
}

/// Counts points of `x_j y_j = z^{a_j} + 1` over `F_q` by trying every `(x, y)` pair
/// for each right-hand side, and every `z` in the torus.
pub fn naive_count(m: &IntMatrix, q: u64) -> BigInt {
    let mut pairs: HashMap<u64, u64> = HashMap::new();
    for c in 0..q {
        let hits = (0..q)
            .flat_map(|x| (0..q).map(move |y| (x, y)))
            .filter(|&(x, y)| x * y % q == c)
            .count();
        pairs.insert(c, hits as u64);
    }
    let order = BigInt::from(q - 1);
    let exps: Vec<Vec<u64>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| m[(i, j)].mod_floor(&order).to_u64().unwrap())
                .collect()
        })
        .collect();
    let mut total = BigInt::from(0);
    let mut z = vec![1u64; m.rows()];
    loop {
        let mut term = BigInt::from(1);
        for j in 0..m.cols() {
            let mono = (0..m.rows()).fold(1, |acc, i| acc * pow_mod(z[i], exps[i][j], q) % q);
            term *= pairs[&((mono + 1) % q)];
        }
        total += term;
        let mut pos = 0;
        while pos < z.len() {
            z[pos] += 1;
            if z[pos] < q {
                break;
            }
            z[pos] = 1;
            pos += 1;
        }
        if pos == z.len() {
            return total;
        }
    }
}

/// The span of the rows of `M` reduced modulo `d`, restricted to the first `n`
/// columns, by closure under addition.
pub fn row_span_mod(m: &IntMatrix, d: u64) -> BTreeSet<Vec<u64>> {
    let db = BigInt::from(d);
    let gens: Vec<Vec<u64>> = (0..m.rows())
        .map(|i| m.row(i).iter().map(|x| x.mod_floor(&db).to_u64().unwrap()).collect())
        .collect();
    let zero = vec![0u64; m.cols()];
    let mut seen = BTreeSet::from([zero.clone()]);
    let mut stack = vec![zero];
    while let Some(v) = stack.pop() {
        for g in &gens {
            let w: Vec<u64> = v.iter().zip(g).map(|(a, b)| (a + b) % d).collect();
            if seen.insert(w.clone()) {
                stack.push(w);
            }
        }
    }
    seen
}

/// Counts `x` in `(Z/N)^c` with `A x = b mod N` by enumeration.
pub fn naive_congruence_count(a: &[Vec<i64>], b: &[i64], cols: usize, modulus: i64) -> u64 {
    let mut x = vec![0i64; cols];
    let mut count = 0;
    loop {
        let ok = a.iter().zip(b).all(|(row, &bi)| {
            let s: i64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
            (s - bi).rem_euclid(modulus) == 0
        });
        count += ok as u64;
        let mut pos = 0;
        while pos < cols {
            x[pos] += 1;
            if x[pos] < modulus {
                break;
            }
            x[pos] = 0;
            pos += 1;
        }
        if pos == cols {
            return count;
        }
    }
}
