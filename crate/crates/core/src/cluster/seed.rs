use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Quiver;
use crate::error::{Error, Result};
use crate::intlat::{bigint_json, IntMatrix};

fn pos(x: &BigInt) -> BigInt {
    if x.is_positive() {
        x.clone()
    } else {
        BigInt::zero()
    }
}

fn neg(x: &BigInt) -> BigInt {
    if x.is_negative() {
        -x
    } else {
        BigInt::zero()
    }
}

/// An extended exchange matrix: rows are vertices, columns are mutable vertices.
///
/// Column `c` belongs to vertex `mutable[c]`. A freshly parsed seed has its
/// mutable vertices first (`mutable = [0, 1, .., n-1]`); freezing drops columns
/// but never renumbers rows, so vertex labels stay stable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedExchangeMatrix {
    b: IntMatrix,
    mutable: Vec<usize>,
}

impl ExtendedExchangeMatrix {
    /// A seed whose first `b.cols()` rows are the mutable vertices.
    pub fn new(b: IntMatrix) -> Result<Self> {
        let mutable = (0..b.cols()).collect();
        Self::with_mutable(b, mutable)
    }

    pub fn from_i64<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    /// A seed whose column `c` belongs to vertex `mutable[c]`.
    pub fn with_mutable(b: IntMatrix, mutable: Vec<usize>) -> Result<Self> {
        if mutable.len() != b.cols() {
            return Err(Error::InvalidSeed(format!(
                "{} columns but {} mutable vertices",
                b.cols(),
                mutable.len()
            )));
        }
        let mut seen = vec![false; b.rows()];
        for &v in &mutable {
            if v >= b.rows() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidSeed(format!(
                    "mutable vertex {v} is out of range or repeated"
                )));
            }
        }
        for (ci, &vi) in mutable.iter().enumerate() {
            for (cj, &vj) in mutable.iter().enumerate() {
                if b[(vi, cj)] != -&b[(vj, ci)] {
                    return Err(Error::InvalidSeed(format!(
                        "mutable part is not skew-symmetric at vertices ({vi}, {vj})"
                    )));
                }
            }
        }
        Ok(ExtendedExchangeMatrix { b, mutable })
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.b
    }

    /// Number of mutable vertices.
    pub fn n(&self) -> usize {
        self.mutable.len()
    }

    /// Number of frozen vertices.
    pub fn m(&self) -> usize {
        self.b.rows() - self.mutable.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.b.rows()
    }

    pub fn mutable_vertices(&self) -> &[usize] {
        &self.mutable
    }

    pub fn is_mutable(&self, v: usize) -> bool {
        self.mutable.contains(&v)
    }

    /// True when the mutable vertices are exactly the first `n` rows, in order.
    pub fn is_standard_layout(&self) -> bool {
        self.mutable.iter().enumerate().all(|(c, &v)| c == v)
    }

    fn column_of(&self, v: usize) -> Result<usize> {
        self.mutable
            .iter()
            .position(|&x| x == v)
            .ok_or_else(|| Error::IndexOutOfRange {
                index: v,
                valid: format!("mutable vertices {:?}", self.mutable),
            })
    }

    /// `b_{uv}` for any vertex `u` and mutable vertex `v` (zero if `v` is frozen).
    pub fn entry(&self, u: usize, v: usize) -> BigInt {
        match self.column_of(v) {
            Ok(c) => self.b[(u, c)].clone(),
            Err(_) => BigInt::zero(),
        }
    }

    /// Matrix mutation in the direction of the mutable vertex `k`.
    pub fn mutate(&self, k: usize) -> Result<Self> {
        let kc = self.column_of(k)?;
        let mut out = self.b.clone();
        for i in 0..self.b.rows() {
            for c in 0..self.b.cols() {
                if i == k || c == kc {
                    out[(i, c)] = -&self.b[(i, c)];
                } else {
                    let ik = &self.b[(i, kc)];
                    let kj = &self.b[(k, c)];
                    out[(i, c)] = &self.b[(i, c)] + pos(ik) * pos(kj) - neg(ik) * neg(kj);
                }
            }
        }
        Ok(ExtendedExchangeMatrix {
            b: out,
            mutable: self.mutable.clone(),
        })
    }

    /// Applies mutations in order.
    pub fn mutate_seq(&self, seq: &[usize]) -> Result<Self> {
        seq.iter().try_fold(self.clone(), |b, &k| b.mutate(k))
    }

    /// Freezes the given mutable vertices: their columns are dropped, rows kept.
    pub fn freeze(&self, vertices: &[usize]) -> Result<Self> {
        for &v in vertices {
            self.column_of(v)?;
        }
        let keep: Vec<usize> = (0..self.n())
            .filter(|&c| !vertices.contains(&self.mutable[c]))
            .collect();
        Ok(ExtendedExchangeMatrix {
            b: self.b.select_columns(&keep),
            mutable: keep.iter().map(|&c| self.mutable[c]).collect(),
        })
    }

    /// The quiver with `b_{uv}` arrows `u -> v` for each positive entry.
    pub fn to_quiver(&self) -> Quiver {
        let mut flags = vec![false; self.vertex_count()];
        for &v in &self.mutable {
            flags[v] = true;
        }
        let mut arrows = Vec::new();
        for (c, &v) in self.mutable.iter().enumerate() {
            for u in 0..self.vertex_count() {
                let x = &self.b[(u, c)];
                if x.is_positive() {
                    arrows.push((u, v, x.clone()));
                } else if x.is_negative() && !flags[u] {
                    // frozen rows carry both directions; mutable pairs are
                    // recorded once, from the column of the head
                    arrows.push((v, u, -x));
                }
            }
        }
        Quiver::new(flags, arrows).expect("a valid seed yields a valid quiver")
    }

    pub fn is_acyclic(&self) -> bool {
        !self.to_quiver().reduced().has_directed_cycle()
    }

    /// Exchange relations `x_v x'_v = prod x^{b+} + prod x^{b-}` of an acyclic seed.
    pub fn acyclic_presentation(&self) -> Result<Vec<EquationDescriptor>> {
        if !self.is_acyclic() {
            return Err(Error::NotAcyclic);
        }
        Ok(self
            .mutable
            .iter()
            .enumerate()
            .map(|(c, &v)| {
                let col = self.b.column(c);
                EquationDescriptor {
                    vertex: v,
                    positive: col.iter().map(pos).collect(),
                    negative: col.iter().map(neg).collect(),
                }
            })
            .collect())
    }
}

/// `x_v * x'_v = prod_i x_i^{positive_i} + prod_i x_i^{negative_i}`, exponents over all vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationDescriptor {
    pub vertex: usize,
    #[serde(with = "bigint_json::vec")]
    pub positive: Vec<BigInt>,
    #[serde(with = "bigint_json::vec")]
    pub negative: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedJson {
    n: usize,
    m: usize,
    #[serde(rename = "B", with = "bigint_json::nested")]
    b: Vec<Vec<BigInt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mutable: Option<Vec<usize>>,
}

impl Serialize for ExtendedExchangeMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeedJson {
            n: self.n(),
            m: self.m(),
            b: self.b.to_rows(),
            mutable: (!self.is_standard_layout()).then(|| self.mutable.clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExtendedExchangeMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeedJson::deserialize(d)?;
        let b = IntMatrix::try_from_rows(raw.n + raw.m, raw.n, raw.b).map_err(D::Error::custom)?;
        let mutable = raw.mutable.unwrap_or_else(|| (0..raw.n).collect());
        ExtendedExchangeMatrix::with_mutable(b, mutable).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(rows: &[&[i64]]) -> ExtendedExchangeMatrix {
        ExtendedExchangeMatrix::from_i64(rows).unwrap()
    }

    #[test]
    fn mutation_examples() {
        let b = seed(&[&[0, 2], &[-2, 0], &[1, 0]]);
        assert_eq!(b.mutate(0).unwrap(), seed(&[&[0, -2], &[2, 0], &[-1, 2]]));
        let b = seed(&[&[0], &[1]]);
        assert_eq!(b.mutate(0).unwrap(), seed(&[&[0], &[-1]]));
    }

    #[test]
    fn cannot_mutate_frozen() {
        let b = seed(&[&[0], &[1]]);
        assert!(matches!(b.mutate(1), Err(Error::IndexOutOfRange { index: 1, .. })));
    }

    #[test]
    fn rejects_non_skew() {
        assert!(ExtendedExchangeMatrix::from_i64(&[[0, 1], [1, 0]]).is_err());
        assert!(ExtendedExchangeMatrix::from_i64(&[[1]]).is_err());
    }

    #[test]
    fn freeze_examples() {
        let b = seed(&[&[0, 1], &[-1, 0], &[1, 2]]);
        let f = b.freeze(&[1]).unwrap();
        assert_eq!(*f.matrix(), IntMatrix::from_i64(&[[0], [-1], [1]]));
        assert_eq!(f.mutable_vertices(), &[0]);
        assert!(!f.is_mutable(1));
        assert_eq!(b.freeze(&[]).unwrap(), b);
        let all = b.freeze(&[0, 1]).unwrap();
        assert_eq!((all.n(), all.m(), all.matrix().cols()), (0, 3, 0));
        assert!(b.freeze(&[2]).is_err());
    }

    #[test]
    fn presentation_examples() {
        let b = seed(&[&[0], &[3]]);
        let eqs = b.acyclic_presentation().unwrap();
        assert_eq!(eqs.len(), 1);
        assert_eq!(eqs[0].positive, vec![BigInt::zero(), BigInt::from(3)]);
        assert!(eqs[0].negative.iter().all(Zero::is_zero));

        let zero_col = seed(&[&[0, 0], &[0, 0], &[1, 0]]);
        let eqs = zero_col.acyclic_presentation().unwrap();
        assert!(eqs[1].positive.iter().chain(&eqs[1].negative).all(Zero::is_zero));

        let markov = seed(&[&[0, 2, -2], &[-2, 0, 2], &[2, -2, 0]]);
        assert_eq!(markov.acyclic_presentation(), Err(Error::NotAcyclic));
    }

    #[test]
    fn seed_json() {
        let b: ExtendedExchangeMatrix =
            serde_json::from_str(r#"{"n":2,"m":1,"B":[[0,1],[-1,0],[2,0]]}"#).unwrap();
        assert_eq!(b, seed(&[&[0, 1], &[-1, 0], &[2, 0]]));
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(s, r#"{"n":2,"m":1,"B":[[0,1],[-1,0],[2,0]]}"#);
        let frozen = b.freeze(&[0]).unwrap();
        let back: ExtendedExchangeMatrix =
            serde_json::from_str(&serde_json::to_string(&frozen).unwrap()).unwrap();
        assert_eq!(back, frozen);
        assert!(serde_json::from_str::<ExtendedExchangeMatrix>(r#"{"n":2,"m":1,"B":[[0,1],[-1,0]]}"#).is_err());
    }
}
