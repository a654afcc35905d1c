use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{xgcd, IntMatrix};

/// Row-style Hermite reduction `r * a = h`, with `r_inv` the exact inverse of `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduction {
    pub h: IntMatrix,
    pub r: IntMatrix,
    pub r_inv: IntMatrix,
    /// Column index of each pivot, one per nonzero row of `h`.
    pub pivots: Vec<usize>,
}

impl RowReduction {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Keeps a row transform and its inverse in lockstep with the reduced matrix.
struct Tracker {
    h: IntMatrix,
    r: IntMatrix,
    r_inv: IntMatrix,
    negative_det: bool,
}

impl Tracker {
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.h.add_row_multiple(dst, src, k);
        self.r.add_row_multiple(dst, src, k);
        self.r_inv.add_col_multiple(src, dst, &-k);
    }

    /// Applies `[[s, t], [u, v]]` (determinant one) to rows `a`, `b`.
    fn combine(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, u: &BigInt, v: &BigInt) {
        self.h.combine_rows(a, b, [s, t, u, v]);
        self.r.combine_rows(a, b, [s, t, u, v]);
        self.r_inv.combine_cols(a, b, [v, &-u, &-t, s]);
    }

    fn negate_row(&mut self, i: usize) {
        self.h.negate_row(i);
        self.r.negate_row(i);
        self.r_inv.negate_col(i);
        self.negative_det = !self.negative_det;
    }
}

/// Row Hermite normal form.
///
/// Columns are scanned left to right; the pivot of each column is produced by
/// gcd-combining the current pivot row with every lower row, so each step is a
/// determinant-one 2x2 transform. Pivots are made positive and the entries above
/// each pivot are reduced into `[0, pivot)`. If a sign flip left `det r = -1` and
/// `h` has a zero row, that zero row is negated to restore `det r = +1`; when every
/// row is a pivot row the determinant is forced to `sign(det a)`.
pub fn hnf_row(a: &IntMatrix) -> RowReduction {
    let m = a.rows();
    let mut tr = Tracker {
        h: a.clone(),
        r: IntMatrix::identity(m),
        r_inv: IntMatrix::identity(m),
        negative_det: false,
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..a.cols() {
        if row == m {
            break;
        }
        for i in row + 1..m {
            if tr.h[(i, c)].is_zero() {
                continue;
            }
            let p = tr.h[(row, c)].clone();
            let b = tr.h[(i, c)].clone();
            if !p.is_zero() && (&b % &p).is_zero() {
                tr.add_row_multiple(i, row, &-(&b / &p));
            } else {
                let (g, s, t) = xgcd(&p, &b);
                let u = -(&b / &g);
                let v = &p / &g;
                tr.combine(row, i, &s, &t, &u, &v);
            }
        }
        if tr.h[(row, c)].is_zero() {
            continue;
        }
        if tr.h[(row, c)].is_negative() {
            tr.negate_row(row);
        }
        let p = tr.h[(row, c)].clone();
        for i in 0..row {
            let q = tr.h[(i, c)].div_floor(&p);
            if !q.is_zero() {
                tr.add_row_multiple(i, row, &-q);
            }
        }
        pivots.push(c);
        row += 1;
    }
    if tr.negative_det && row < m {
        // row m-1 of h is zero, so flipping it changes only the transform
        tr.negate_row(m - 1);
    }
    RowReduction {
        h: tr.h,
        r: tr.r,
        r_inv: tr.r_inv,
        pivots,
    }
}

/// Checks the row Hermite shape: zero rows last, strictly increasing positive
/// pivots, entries above each pivot in `[0, pivot)`.
pub fn is_row_hermite(h: &IntMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero_row = false;
    for i in 0..h.rows() {
        let lead = (0..h.cols()).find(|&j| !h[(i, j)].is_zero());
        match lead {
            None => seen_zero_row = true,
            Some(c) => {
                if seen_zero_row || last_pivot.is_some_and(|p| c <= p) {
                    return false;
                }
                let p = &h[(i, c)];
                if !p.is_positive() {
                    return false;
                }
                if (0..i).any(|k| h[(k, c)].is_negative() || &h[(k, c)] >= p) {
                    return false;
                }
                last_pivot = Some(c);
            }
        }
    }
    true
}
