//! Bigraded dimension tables `(degree k, weight w, perverse level p, character)`
//! for `H^*(X(M))`, assembled from block tables of `C*` and `X(d)` by Kunneth
//! products and `gamma`-invariants, with the P=W and curious hard Lefschetz checks.
//!
//! Weights use the doubled convention: an entry with weight `w` lives in
//! `Gr^W_w`, so `w` is always even for the varieties built here.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlat::{bigint_json, diagonal_completion, gamma_embedding, FiniteAbelianSubgroup, IntMatrix};
use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub k: usize,
    pub w: usize,
    pub p: usize,
    /// One residue per `X(d)` factor.
    pub chi: Vec<u64>,
    pub dim: u64,
}

impl TableEntry {
    pub fn new(k: usize, w: usize, p: usize, chi: Vec<u64>, dim: u64) -> Self {
        TableEntry { k, w, p, chi, dim }
    }
}

/// Entries sorted by `(k, w, p, chi)`, one per key, all with positive dimension.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TableJson")]
pub struct BigradedTable {
    #[serde(rename = "D")]
    dimension: usize,
    entries: Vec<TableEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    #[serde(rename = "D")]
    dimension: usize,
    entries: Vec<TableEntry>,
}

impl TryFrom<TableJson> for BigradedTable {
    type Error = Error;

    fn try_from(raw: TableJson) -> Result<Self> {
        Ok(BigradedTable::new(raw.dimension, raw.entries))
    }
}

type Key = (usize, usize, usize, Vec<u64>);

impl BigradedTable {
    /// Sorts the entries and merges repeated keys; zero-dimensional entries are dropped.
    pub fn new(dimension: usize, entries: impl IntoIterator<Item = TableEntry>) -> Self {
        let mut acc: BTreeMap<Key, u64> = BTreeMap::new();
        for e in entries {
            *acc.entry((e.k, e.w, e.p, e.chi)).or_default() += e.dim;
        }
        Self::from_map(dimension, acc)
    }

    fn from_map(dimension: usize, acc: BTreeMap<Key, u64>) -> Self {
        let entries = acc
            .into_iter()
            .filter(|(_, dim)| *dim > 0)
            .map(|((k, w, p, chi), dim)| TableEntry { k, w, p, chi, dim })
            .collect();
        BigradedTable { dimension, entries }
    }

    /// The table of a point.
    pub fn point() -> Self {
        Self::new(0, [TableEntry::new(0, 0, 0, Vec::new(), 1)])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[TableEntry] {
        &self.entries
    }

    /// Number of character slots, taken from the first entry.
    pub fn factor_count(&self) -> usize {
        self.entries.first().map_or(0, |e| e.chi.len())
    }

    pub fn betti(&self) -> Vec<u64> {
        let top = self.entries.iter().map(|e| e.k + 1).max().unwrap_or(0);
        let mut b = vec![0; top];
        for e in &self.entries {
            b[e.k] += e.dim;
        }
        b
    }

    pub fn total_dim(&self) -> u64 {
        self.entries.iter().map(|e| e.dim).sum()
    }

    /// `dim Gr^W_w H^k`, summed over perverse levels and characters.
    pub fn weight_graded(&self) -> BTreeMap<(usize, usize), u64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry((e.k, e.w)).or_default() += e.dim;
        }
        out
    }

    /// `(k, w, p, dim)` with characters summed out.
    pub fn without_characters(&self) -> Vec<(usize, usize, usize, u64)> {
        let mut out: BTreeMap<(usize, usize, usize), u64> = BTreeMap::new();
        for e in &self.entries {
            *out.entry((e.k, e.w, e.p)).or_default() += e.dim;
        }
        out.into_iter().map(|((k, w, p), d)| (k, w, p, d)).collect()
    }
}

impl fmt::Display for BigradedTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "D = {}", self.dimension)?;
        writeln!(f, "{:>3} {:>3} {:>3} {:>6}  chi", "k", "w", "p", "dim")?;
        for e in &self.entries {
            let chi: Vec<String> = e.chi.iter().map(u64::to_string).collect();
            writeln!(f, "{:>3} {:>3} {:>3} {:>6}  ({})", e.k, e.w, e.p, e.dim, chi.join(","))?;
        }
        Ok(())
    }
}

/// `C*`: `H^0` of weight 0 and `H^1` of weight 2, with `P_k = W_{2k}`.
pub fn block_table_torus() -> BigradedTable {
    BigradedTable::new(
        1,
        [
            TableEntry::new(0, 0, 0, vec![], 1),
            TableEntry::new(1, 2, 1, vec![], 1),
        ],
    )
}

/// `X(d)`: `H^0`, `H^1` and the invariant part of `H^2` are pure of weights 0, 2, 4;
/// each nontrivial character `j` of the deck rotation contributes one class to `H^2`
/// of weight 2.
pub fn block_table_xd(d: u64) -> Result<BigradedTable> {
    if d == 0 {
        return Err(Error::InvalidModulus("X(d) needs d >= 1".into()));
    }
    let mut entries = vec![
        TableEntry::new(0, 0, 0, vec![0], 1),
        TableEntry::new(1, 2, 1, vec![0], 1),
        TableEntry::new(2, 4, 2, vec![0], 1),
    ];
    entries.extend((1..d).map(|j| TableEntry::new(2, 2, 1, vec![j], 1)));
    Ok(BigradedTable::new(2, entries))
}

/// Product table: degrees, weights and perverse levels add, characters concatenate,
/// dimensions multiply. The empty product is the point.
pub fn kunneth(tables: &[BigradedTable]) -> BigradedTable {
    tables.iter().fold(BigradedTable::point(), |acc, t| kunneth_pair(&acc, t))
}

fn kunneth_pair(a: &BigradedTable, b: &BigradedTable) -> BigradedTable {
    let mut acc: BTreeMap<Key, u64> = BTreeMap::new();
    for x in &a.entries {
        for y in &b.entries {
            let mut chi = x.chi.clone();
            chi.extend_from_slice(&y.chi);
            *acc.entry((x.k + y.k, x.w + y.w, x.p + y.p, chi)).or_default() += x.dim * y.dim;
        }
    }
    BigradedTable::from_map(a.dimension + b.dimension, acc)
}

/// `sum_i chi_i g_i = 0 mod d` for every generator `g`.
fn is_invariant(chi: &[u64], gamma: &FiniteAbelianSubgroup) -> bool {
    let d = gamma.modulus as u128;
    gamma.generators.iter().all(|g| {
        chi.iter()
            .zip(g)
            .fold(0u128, |s, (&c, &x)| (s + c as u128 * x as u128) % d)
            == 0
    })
}

fn check_ambient(table: &BigradedTable, gamma: &FiniteAbelianSubgroup) -> Result<()> {
    for e in &table.entries {
        if e.chi.len() != gamma.ambient_rank || e.chi.iter().any(|&c| c >= gamma.modulus) {
            let chi: Vec<String> = e.chi.iter().map(u64::to_string).collect();
            return Err(Error::AmbientMismatch(format!(
                "character ({}) does not live in (Z/{})^{}",
                chi.join(","),
                gamma.modulus,
                gamma.ambient_rank
            )));
        }
    }
    Ok(())
}

/// Keeps the entries whose character is trivial on `gamma`.
pub fn gamma_invariants(table: &BigradedTable, gamma: &FiniteAbelianSubgroup) -> Result<BigradedTable> {
    check_ambient(table, gamma)?;
    Ok(BigradedTable {
        dimension: table.dimension,
        entries: table
            .entries
            .iter()
            .filter(|e| is_invariant(&e.chi, gamma))
            .cloned()
            .collect(),
    })
}

/// The table of `X(M) = X(d)^n / gamma x (C*)^(m-n)`.
///
/// The product over the `X(d)` factors is filtered while it is built, so the
/// full `(d+2)^n` product is never stored.
pub fn pw_table(m: &IntMatrix) -> Result<BigradedTable> {
    let completion = diagonal_completion(m)?;
    let gamma = gamma_embedding(&completion)?;
    let block = block_table_xd(completion.modulus()?)?;
    let n = m.cols();

    let mut acc: BTreeMap<Key, u64> = BTreeMap::new();
    let blocks = block.entries();
    let mut idx = vec![0usize; n];
    loop {
        let chi: Vec<u64> = idx.iter().map(|&i| blocks[i].chi[0]).collect();
        if is_invariant(&chi, &gamma) {
            let (mut k, mut w, mut p, mut dim) = (0, 0, 0, 1u64);
            for &i in &idx {
                k += blocks[i].k;
                w += blocks[i].w;
                p += blocks[i].p;
                dim *= blocks[i].dim;
            }
            *acc.entry((k, w, p, chi)).or_default() += dim;
        }
        // odometer over the block entries
        let mut pos = 0;
        while pos < n {
            idx[pos] += 1;
            if idx[pos] < blocks.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
        if pos == n {
            break;
        }
    }
    let quotient = BigradedTable::from_map(2 * n, acc);
    let mut factors = vec![quotient];
    factors.extend(std::iter::repeat_n(block_table_torus(), m.rows() - n));
    Ok(kunneth(&factors))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PwReport {
    pub pass: bool,
    /// Entries with odd weight or with `p != w / 2`.
    pub violations: Vec<TableEntry>,
}

/// `P_k H^* = W_{2k} H^*`: every entry has even weight and perverse level `w / 2`.
pub fn check_pw(table: &BigradedTable) -> PwReport {
    let violations: Vec<TableEntry> = table
        .entries
        .iter()
        .filter(|e| e.w % 2 != 0 || e.p * 2 != e.w)
        .cloned()
        .collect();
    PwReport {
        pass: violations.is_empty(),
        violations,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChlStatus {
    Pass,
    Fail,
    SkippedOddDimension,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChlMismatch {
    pub k: usize,
    pub w: usize,
    pub dim: u64,
    pub partner_k: i64,
    pub partner_w: i64,
    pub partner_dim: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChlReport {
    pub status: ChlStatus,
    /// The weight the symmetry is centred on.
    pub center: usize,
    pub mismatches: Vec<ChlMismatch>,
    pub note: String,
}

const CHL_NOTE: &str = "symmetry centred on weight D: dim Gr^W_{D-2l} H^k = dim Gr^W_{D+2l} H^{k+2l}";

/// Curious hard Lefschetz symmetry of the weight-graded dimensions, for even `D`.
pub fn check_chl(table: &BigradedTable) -> ChlReport {
    let d = table.dimension;
    if d % 2 == 1 {
        return ChlReport {
            status: ChlStatus::SkippedOddDimension,
            center: d,
            mismatches: Vec::new(),
            note: "skipped (odd dimension)".into(),
        };
    }
    let graded = table.weight_graded();
    let mut mismatches = Vec::new();
    for (&(k, w), &dim) in &graded {
        // (k, D - 2l) <-> (k + 2l, D + 2l)
        let pk = k as i64 + d as i64 - w as i64;
        let pw = 2 * d as i64 - w as i64;
        let partner_dim = if pk >= 0 && pw >= 0 {
            graded.get(&(pk as usize, pw as usize)).copied().unwrap_or(0)
        } else {
            0
        };
        if partner_dim != dim {
            mismatches.push(ChlMismatch {
                k,
                w,
                dim,
                partner_k: pk,
                partner_w: pw,
                partner_dim,
            });
        }
    }
    ChlReport {
        status: if mismatches.is_empty() { ChlStatus::Pass } else { ChlStatus::Fail },
        center: d,
        mismatches,
        note: CHL_NOTE.into(),
    }
}

/// `WP(q, t) = sum dim Gr^W_w H^k q^{w/2} t^k`, stored as `coeffs[w/2][k]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightPolynomial {
    #[serde(with = "bigint_json::nested")]
    coeffs: Vec<Vec<BigInt>>,
}

impl WeightPolynomial {
    pub fn new(mut coeffs: Vec<Vec<BigInt>>) -> Self {
        for row in &mut coeffs {
            while row.last().is_some_and(Zero::is_zero) {
                row.pop();
            }
        }
        while coeffs.last().is_some_and(|r| r.is_empty()) {
            coeffs.pop();
        }
        WeightPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Vec<BigInt>] {
        &self.coeffs
    }

    pub fn coeff(&self, qexp: usize, texp: usize) -> BigInt {
        self.coeffs
            .get(qexp)
            .and_then(|r| r.get(texp))
            .cloned()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, q: &BigInt, t: &BigInt) -> BigInt {
        let mut total = BigInt::zero();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                total += c * q.pow(i as u32) * t.pow(j as u32);
            }
        }
        total
    }
}

impl Mul for &WeightPolynomial {
    type Output = WeightPolynomial;

    fn mul(self, rhs: &WeightPolynomial) -> WeightPolynomial {
        let rows = (self.coeffs.len() + rhs.coeffs.len()).saturating_sub(1);
        let mut out: Vec<Vec<BigInt>> = vec![Vec::new(); rows];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                let row = &mut out[i + j];
                if row.len() < a.len() + b.len() {
                    row.resize(a.len() + b.len(), BigInt::zero());
                }
                for (s, x) in a.iter().enumerate() {
                    for (t, y) in b.iter().enumerate() {
                        row[s + t] += x * y;
                    }
                }
            }
        }
        WeightPolynomial::new(out)
    }
}

fn require_even_weights(table: &BigradedTable) -> Result<()> {
    match table.entries.iter().find(|e| e.w % 2 != 0) {
        Some(e) => Err(Error::InvalidTable(format!("odd weight {} in degree {}", e.w, e.k))),
        None => Ok(()),
    }
}

pub fn weight_poly(table: &BigradedTable) -> Result<WeightPolynomial> {
    require_even_weights(table)?;
    let mut coeffs: Vec<Vec<BigInt>> = Vec::new();
    for e in &table.entries {
        let i = e.w / 2;
        if coeffs.len() <= i {
            coeffs.resize(i + 1, Vec::new());
        }
        if coeffs[i].len() <= e.k {
            coeffs[i].resize(e.k + 1, BigInt::zero());
        }
        coeffs[i][e.k] += e.dim;
    }
    Ok(WeightPolynomial::new(coeffs))
}

/// `E(q) = q^D WP(1/q, -1) = sum (-1)^k dim q^{D - w/2}`.
pub fn epoly(table: &BigradedTable) -> Result<IntPoly> {
    require_even_weights(table)?;
    let d = table.dimension;
    let mut coeffs = vec![BigInt::zero(); d + 1];
    for e in &table.entries {
        let half = e.w / 2;
        if half > d {
            return Err(Error::InvalidTable(format!(
                "weight {} exceeds twice the dimension {d}",
                e.w
            )));
        }
        let c = BigInt::from(e.dim);
        if e.k % 2 == 0 {
            coeffs[d - half] += c;
        } else {
            coeffs[d - half] -= c;
        }
    }
    Ok(IntPoly::new(coeffs))
}
