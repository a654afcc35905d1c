use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{bigint_json, snf, IntMatrix};
use crate::error::{Error, Result};

/// A finite abelian group `Z/f1 x ... x Z/fk` in invariant-factor form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    #[serde(with = "bigint_json::vec")]
    pub invariant_factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        FiniteAbelianGroup {
            invariant_factors: Vec::new(),
        }
    }

    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|x| format!("Z/{x}"))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// `Z^m / t Z^m` for a square matrix `t`.
pub fn cokernel(t: &IntMatrix) -> Result<FiniteAbelianGroup> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cokernel needs a square matrix, got {}x{}",
            t.rows(),
            t.cols()
        )));
    }
    let s = snf(t);
    if s.rank() < t.rows() {
        return Err(Error::InfiniteCokernel);
    }
    Ok(FiniteAbelianGroup {
        invariant_factors: s.factors.into_iter().filter(|f| !f.is_one()).collect(),
    })
}

/// A subgroup of `(Z/d)^n` given by generators.
///
/// Generators are stored reduced into `[0, d)`, without zero vectors or
/// duplicates, and sorted, so equal generator sets compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAbelianSubgroup {
    pub modulus: u64,
    pub ambient_rank: usize,
    pub generators: Vec<Vec<u64>>,
}

impl FiniteAbelianSubgroup {
    pub fn new(modulus: u64, ambient_rank: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        let gens = generators
            .into_iter()
            .map(|g| g.into_iter().map(BigInt::from).collect())
            .collect();
        Self::from_big(modulus, ambient_rank, gens)
    }

    pub fn from_big(modulus: u64, ambient_rank: usize, generators: Vec<Vec<BigInt>>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus("0".into()));
        }
        let d = BigInt::from(modulus);
        let mut set = BTreeSet::new();
        for g in generators {
            if g.len() != ambient_rank {
                return Err(Error::DimensionMismatch(format!(
                    "generator of length {} in (Z/{modulus})^{ambient_rank}",
                    g.len()
                )));
            }
            let reduced: Vec<u64> = g
                .iter()
                .map(|x| x.mod_floor(&d).to_u64().expect("residue fits in u64"))
                .collect();
            if reduced.iter().any(|&x| x != 0) {
                set.insert(reduced);
            }
        }
        Ok(FiniteAbelianSubgroup {
            modulus,
            ambient_rank,
            generators: set.into_iter().collect(),
        })
    }

    pub fn trivial(modulus: u64, ambient_rank: usize) -> Self {
        FiniteAbelianSubgroup {
            modulus,
            ambient_rank,
            generators: Vec::new(),
        }
    }

    /// The whole ambient group, generated by the unit vectors.
    pub fn full(modulus: u64, ambient_rank: usize) -> Self {
        let gens = (0..ambient_rank)
            .map(|i| (0..ambient_rank).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::new(modulus, ambient_rank, gens).expect("unit vectors are well formed")
    }

    /// `[generators as columns | d * I_n]`; its column span is the preimage in `Z^n`.
    fn lattice(&self) -> IntMatrix {
        let n = self.ambient_rank;
        let mut g = IntMatrix::zeros(n, self.generators.len());
        for (j, gen) in self.generators.iter().enumerate() {
            for i in 0..n {
                g[(i, j)] = BigInt::from(gen[i]);
            }
        }
        g.hstack(&IntMatrix::identity(n).scale(&BigInt::from(self.modulus)))
    }

    pub fn order(&self) -> BigInt {
        let s = snf(&self.lattice());
        let index: BigInt = s.nonzero_factors().iter().product();
        BigInt::from(self.modulus).pow(self.ambient_rank as u32) / index
    }

    pub fn ambient_order(&self) -> BigInt {
        BigInt::from(self.modulus).pow(self.ambient_rank as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.membership().contains(v)
    }

    /// A reusable membership test (one Smith form for many queries).
    pub fn membership(&self) -> Membership {
        let s = snf(&self.lattice());
        Membership {
            rank: self.ambient_rank,
            p: s.p,
            factors: s.factors,
        }
    }

    /// Every element, in lexicographic order. Intended for small groups.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let d = self.modulus;
        let mut seen = BTreeSet::new();
        let zero = vec![0u64; self.ambient_rank];
        let mut stack = vec![zero.clone()];
        seen.insert(zero);
        while let Some(x) = stack.pop() {
            for g in &self.generators {
                let y: Vec<u64> = x.iter().zip(g).map(|(a, b)| (a + b) % d).collect();
                if seen.insert(y.clone()) {
                    stack.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// `{ j : sum_i j_i g_i = 0 mod d for every generator g }`.
    pub fn annihilator(&self) -> FiniteAbelianSubgroup {
        let n = self.ambient_rank;
        let d = BigInt::from(self.modulus);
        let mut gt = IntMatrix::zeros(self.generators.len(), n);
        for (i, g) in self.generators.iter().enumerate() {
            for j in 0..n {
                gt[(i, j)] = BigInt::from(g[j]);
            }
        }
        // p gt q = diag(f); with j = q y the condition is f_i y_i = 0 mod d
        let s = snf(&gt);
        let mut gens = Vec::with_capacity(n);
        for i in 0..n {
            let scale = match s.factors.get(i) {
                Some(f) if !f.is_zero() => &d / f.gcd(&d),
                _ => BigInt::one(),
            };
            gens.push(s.q.column(i).iter().map(|x| x * &scale).collect());
        }
        Self::from_big(self.modulus, n, gens).expect("dimensions agree by construction")
    }

    pub fn is_subgroup_of(&self, other: &FiniteAbelianSubgroup) -> bool {
        if self.modulus != other.modulus || self.ambient_rank != other.ambient_rank {
            return false;
        }
        let test = other.membership();
        self.generators.iter().all(|g| test.contains(g))
    }

    /// Equality as subgroups, independent of the chosen generators.
    pub fn same_subgroup(&self, other: &FiniteAbelianSubgroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }
}

impl fmt::Display for FiniteAbelianSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self
            .generators
            .iter()
            .map(|g| {
                let parts: Vec<String> = g.iter().map(u64::to_string).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        write!(
            f,
            "<{}> in (Z/{})^{}",
            gens.join(", "),
            self.modulus,
            self.ambient_rank
        )
    }
}

pub struct Membership {
    rank: usize,
    p: IntMatrix,
    factors: Vec<BigInt>,
}

impl Membership {
    pub fn contains(&self, v: &[u64]) -> bool {
        if v.len() != self.rank {
            return false;
        }
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let w = self.p.mul_vec(&v);
        w.iter().enumerate().all(|(i, wi)| match self.factors.get(i) {
            Some(f) if !f.is_zero() => wi.is_multiple_of(f),
            _ => wi.is_zero(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cokernel_examples() {
        let g = cokernel(&IntMatrix::from_i64(&[[2]])).unwrap();
        assert_eq!(g.invariant_factors, vec![BigInt::from(2)]);
        assert!(cokernel(&IntMatrix::identity(3)).unwrap().is_trivial());
        let g = cokernel(&IntMatrix::from_i64(&[[1, 1], [1, -1]])).unwrap();
        assert_eq!(g.invariant_factors, vec![BigInt::from(2)]);
        assert_eq!(
            cokernel(&IntMatrix::from_i64(&[[1, 2], [2, 4]])),
            Err(Error::InfiniteCokernel)
        );
    }

    #[test]
    fn annihilator_examples() {
        let full = FiniteAbelianSubgroup::full(2, 2);
        let trivial = FiniteAbelianSubgroup::trivial(2, 2);
        assert!(trivial.annihilator().same_subgroup(&full));
        assert!(full.annihilator().same_subgroup(&trivial));
        let diag = FiniteAbelianSubgroup::new(2, 2, vec![vec![1, 1]]).unwrap();
        assert_eq!(diag.annihilator().elements(), vec![vec![0, 0], vec![1, 1]]);
        assert!(FiniteAbelianSubgroup::full(5, 3).annihilator().is_trivial());
    }

    #[test]
    fn order_matches_enumeration() {
        let g = FiniteAbelianSubgroup::new(6, 2, vec![vec![2, 3], vec![4, 0]]).unwrap();
        assert_eq!(g.order(), BigInt::from(g.elements().len()));
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(g.contains(&[x, y]), g.elements().contains(&vec![x, y]));
            }
        }
    }

    fn subgroup() -> impl Strategy<Value = FiniteAbelianSubgroup> {
        (1u64..=6, 0usize..=3).prop_flat_map(|(d, n)| {
            prop::collection::vec(prop::collection::vec(0i64..6, n), 0..=3)
                .prop_map(move |gens| FiniteAbelianSubgroup::new(d, n, gens).unwrap())
        })
    }

    proptest! {
        #[test]
        fn annihilator_is_an_involution(g in subgroup()) {
            let perp = g.annihilator();
            prop_assert!(perp.annihilator().same_subgroup(&g));
            prop_assert_eq!(g.order() * perp.order(), g.ambient_order());
        }

        #[test]
        fn annihilator_matches_pairing(g in subgroup()) {
            // oracle: enumerate the ambient group and test the pairing directly
            let d = g.modulus;
            let n = g.ambient_rank;
            let perp = g.annihilator().elements();
            let total = d.pow(n as u32);
            let mut brute = Vec::new();
            for code in 0..total {
                let mut j = Vec::with_capacity(n);
                let mut c = code;
                for _ in 0..n {
                    j.push(c % d);
                    c /= d;
                }
                j.reverse();
                let ok = g.generators.iter().all(|gen| {
                    gen.iter().zip(&j).map(|(a, b)| a * b).sum::<u64>() % d == 0
                });
                if ok {
                    brute.push(j);
                }
            }
            brute.sort();
            prop_assert_eq!(perp, brute);
        }
    }
}
