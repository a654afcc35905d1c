use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Smith normal form `p * a * q = diag(factors)`, zero-padded to the shape of `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub p: IntMatrix,
    pub q: IntMatrix,
    /// `min(rows, cols)` diagonal entries; nonzero ones come first and each divides the next.
    pub factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.factors.iter().take_while(|f| !f.is_zero()).count()
    }

    pub fn nonzero_factors(&self) -> &[BigInt] {
        &self.factors[..self.rank()]
    }

    /// The diagonal matrix `p * a * q` this form claims.
    pub fn diagonal(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.p.rows(), self.q.rows());
        for (i, f) in self.factors.iter().enumerate() {
            d[(i, i)] = f.clone();
        }
        d
    }
}

/// Smith normal form by repeated smallest-pivot elimination.
///
/// The pivot is the entry of least absolute value in the trailing block (first
/// in row-major order on ties). Output is deterministic for a given input.
pub fn snf(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut p = IntMatrix::identity(m);
    let mut q = IntMatrix::identity(n);

    'outer: for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&d, t) else {
                break 'outer;
            };
            d.swap_rows(t, pi);
            p.swap_rows(t, pi);
            d.swap_cols(t, pj);
            q.swap_cols(t, pj);

            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                let k = &d[(i, t)] / &pivot;
                if !k.is_zero() {
                    d.add_row_multiple(i, t, &-&k);
                    p.add_row_multiple(i, t, &-&k);
                }
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                let k = &d[(t, j)] / &pivot;
                if !k.is_zero() {
                    d.add_col_multiple(j, t, &-&k);
                    q.add_col_multiple(j, t, &-&k);
                }
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..m)
                .find(|&i| (t + 1..n).any(|j| !(&d[(i, j)] % &pivot).is_zero()));
            match offender {
                Some(i) => {
                    let one = BigInt::from(1);
                    d.add_row_multiple(t, i, &one);
                    p.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            p.negate_row(t);
        }
    }

    let factors = (0..m.min(n)).map(|i| d[(i, i)].clone()).collect();
    SmithForm { p, q, factors }
}

fn smallest_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), BigInt)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let v = d[(i, j)].abs();
            if v.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| v < *b) {
                best = Some(((i, j), v));
            }
        }
    }
    best.map(|(pos, _)| pos)
}
