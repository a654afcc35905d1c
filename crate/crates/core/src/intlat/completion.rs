use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{bigint_json, hnf_row, snf, FiniteAbelianSubgroup, IntMatrix};
use crate::error::{Error, Result};

/// Square completion of a full-column-rank `m x n` matrix `M`.
///
/// `t * mbar = diag(d I_n, I_{m-n})`, the first `n` columns of `mbar` are `M`,
/// `r * M = [u; 0]` with `u` upper triangular, and `d` is the least positive
/// integer making `d * u^{-1}` integral.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalCompletion {
    #[serde(with = "bigint_json")]
    pub d: BigInt,
    pub t: IntMatrix,
    pub mbar: IntMatrix,
    pub r: IntMatrix,
    pub u: IntMatrix,
}

impl DiagonalCompletion {
    /// `n`, the number of columns of the original matrix.
    pub fn n(&self) -> usize {
        self.u.rows()
    }

    pub fn m(&self) -> usize {
        self.t.rows()
    }

    /// `diag(d I_n, I_{m-n})`.
    pub fn target(&self) -> IntMatrix {
        let n = self.n();
        IntMatrix::identity(n)
            .scale(&self.d)
            .block_diag(&IntMatrix::identity(self.m() - n))
    }

    /// `d` as a machine integer, for character bookkeeping modulo `d`.
    pub fn modulus(&self) -> Result<u64> {
        self.d
            .to_u64()
            .ok_or_else(|| Error::InvalidModulus(self.d.to_string()))
    }
}

pub fn column_rank(m: &IntMatrix) -> usize {
    snf(m).rank()
}

pub fn require_full_column_rank(m: &IntMatrix) -> Result<()> {
    let rank = column_rank(m);
    if m.rows() < m.cols() || rank < m.cols() {
        return Err(Error::NotFullColumnRank {
            rows: m.rows(),
            cols: m.cols(),
            rank,
        });
    }
    Ok(())
}

pub fn diagonal_completion(m: &IntMatrix) -> Result<DiagonalCompletion> {
    require_full_column_rank(m)?;
    let (rows, n) = (m.rows(), m.cols());
    if n == 0 {
        let id = IntMatrix::identity(rows);
        return Ok(DiagonalCompletion {
            d: BigInt::one(),
            t: id.clone(),
            mbar: id.clone(),
            r: id,
            u: IntMatrix::zeros(0, 0),
        });
    }

    let red = hnf_row(m);
    // full column rank puts the pivots on the diagonal of the top block
    let u = red.h.submatrix(0..n, 0..n);
    debug_assert!(u.is_upper_triangular());

    let inv = upper_triangular_inverse(&u);
    let d = inv
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut scaled = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let v = &inv[i][j] * BigRational::from_integer(d.clone());
            debug_assert!(v.is_integer());
            scaled[(i, j)] = v.to_integer();
        }
    }

    let tail = IntMatrix::identity(rows - n);
    let t = &scaled.block_diag(&tail) * &red.r;
    let mbar = &red.r_inv * &u.block_diag(&tail);
    Ok(DiagonalCompletion {
        d,
        t,
        mbar,
        r: red.r,
        u,
    })
}

/// Exact inverse of an invertible upper triangular matrix by back substitution.
fn upper_triangular_inverse(u: &IntMatrix) -> Vec<Vec<BigRational>> {
    let n = u.rows();
    let mut inv = vec![vec![BigRational::zero(); n]; n];
    for c in 0..n {
        for i in (0..n).rev() {
            let mut acc = if i == c {
                BigRational::one()
            } else {
                BigRational::zero()
            };
            for j in i + 1..n {
                acc -= BigRational::from_integer(u[(i, j)].clone()) * &inv[j][c];
            }
            inv[i][c] = acc / BigRational::from_integer(u[(i, i)].clone());
        }
    }
    inv
}

/// The deck group as a subgroup of `(Z/d)^n`.
///
/// It is the image of `mbar^T Z^m` in `Z^m / diag(d I_n, I_{m-n}) Z^m`, i.e. the
/// span of the rows of `mbar` cut to their first `n` coordinates and reduced
/// mod `d`. Those coordinates are the rows of `M` itself.
pub fn gamma_embedding(dec: &DiagonalCompletion) -> Result<FiniteAbelianSubgroup> {
    let d = dec.modulus()?;
    let n = dec.n();
    let gens = (0..dec.m())
        .map(|i| dec.mbar.row(i)[..n].to_vec())
        .collect();
    FiniteAbelianSubgroup::from_big(d, n, gens)
}
