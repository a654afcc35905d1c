//! The isolated cluster variety `X(M)`: defining equations, the cluster-form
//! change of variables, finite covers between such varieties, the structure
//! decomposition, and numeric evaluation of the torus fibration `h`.
//!
//! `X(M)` sits in `C^{2n} x (C*)^m` and is cut out by
//! `x_j y_j = prod_i z_i^{a_ij} + 1` for each column `j` of the `m x n` matrix `M`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cluster::{EquationDescriptor, ExtendedExchangeMatrix};
use crate::error::{Error, Result};
use crate::intlat::{
    bigint_json, cokernel, diagonal_completion, gamma_embedding, DiagonalCompletion,
    FiniteAbelianGroup, FiniteAbelianSubgroup, IntMatrix,
};

/// Relative tolerance for the membership test of a numeric point.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietyDescriptor {
    matrix: IntMatrix,
}

impl VarietyDescriptor {
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Number of equations, one per column of `M`.
    pub fn n(&self) -> usize {
        self.matrix.cols()
    }

    /// Number of torus coordinates `z`.
    pub fn m(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dimension(&self) -> usize {
        self.n() + self.m()
    }

    /// Exponent vector of the monomial in equation `j` (column `j` of `M`).
    pub fn equation(&self, j: usize) -> Vec<BigInt> {
        self.matrix.column(j)
    }

    pub fn equations(&self) -> Vec<Vec<BigInt>> {
        (0..self.n()).map(|j| self.equation(j)).collect()
    }

    /// `prod_i z_i^{a_ij}` at a numeric point.
    pub fn monomial(&self, j: usize, z: &[Complex64]) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for (i, zi) in z.iter().enumerate() {
            let e = &self.matrix[(i, j)];
            let e = e
                .to_i32()
                .ok_or_else(|| Error::DimensionMismatch(format!("exponent {e} too large for numeric evaluation")))?;
            acc *= zi.powi(e);
        }
        Ok(acc)
    }
}

pub fn build_descriptor(m: &IntMatrix) -> VarietyDescriptor {
    VarietyDescriptor { matrix: m.clone() }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DescriptorJson {
    rows: usize,
    cols: usize,
    #[serde(with = "bigint_json::nested")]
    entries: Vec<Vec<BigInt>>,
    #[serde(with = "bigint_json::nested")]
    equations: Vec<Vec<BigInt>>,
}

impl Serialize for VarietyDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DescriptorJson {
            rows: self.m(),
            cols: self.n(),
            entries: self.matrix.to_rows(),
            equations: self.equations(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VarietyDescriptor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = DescriptorJson::deserialize(d)?;
        let matrix = IntMatrix::try_from_rows(raw.rows, raw.cols, raw.entries).map_err(D::Error::custom)?;
        let desc = build_descriptor(&matrix);
        if desc.equations() != raw.equations {
            return Err(D::Error::custom("equations do not match the matrix columns"));
        }
        Ok(desc)
    }
}

/// The seed `[0; M]` whose cluster variety is `X(M)`.
pub fn isolated_seed(m: &IntMatrix) -> ExtendedExchangeMatrix {
    let n = m.cols();
    ExtendedExchangeMatrix::new(IntMatrix::zeros(n, n).vstack(m))
        .expect("a zero mutable block is skew-symmetric")
}

/// `x'_j = y_j * prod_i z_i^{a-_ij}` turns `x_j y_j = z^{a_j} + 1` into the
/// exchange relation `x_j x'_j = z^{a+_j} + z^{a-_j}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterForm {
    /// For each `j`, the exponents `a-_ij` multiplying `y_j`.
    #[serde(with = "bigint_json::nested")]
    pub substitution: Vec<Vec<BigInt>>,
    /// The resulting relations, exponents over `(x_1..x_n, z_1..z_m)`.
    pub equations: Vec<EquationDescriptor>,
}

pub fn to_cluster_form(m: &IntMatrix) -> ClusterForm {
    let n = m.cols();
    let split = |j: usize, keep: fn(&BigInt) -> BigInt| -> Vec<BigInt> {
        m.column(j).iter().map(keep).collect()
    };
    let plus = |x: &BigInt| if x > &BigInt::zero() { x.clone() } else { BigInt::zero() };
    let minus = |x: &BigInt| if x < &BigInt::zero() { -x } else { BigInt::zero() };
    let pad = |v: Vec<BigInt>| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); n];
        out.extend(v);
        out
    };
    let substitution: Vec<Vec<BigInt>> = (0..n).map(|j| split(j, minus)).collect();
    let equations = (0..n)
        .map(|j| EquationDescriptor {
            vertex: j,
            positive: pad(split(j, plus)),
            negative: pad(split(j, minus)),
        })
        .collect();
    ClusterForm {
        substitution,
        equations,
    }
}

/// The finite cover `X(T M) -> X(M)`, `z_k = prod_l (z'_l)^{t_lk}`, with deck group `Z^m / T^T Z^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverDescriptor {
    pub transform: IntMatrix,
    pub source: IntMatrix,
    pub target: IntMatrix,
    pub deck: FiniteAbelianGroup,
    /// Row `k` holds the exponents of `z'` in the expression for `z_k`.
    pub substitution: IntMatrix,
}

impl CoverDescriptor {
    /// Rewrites a monomial in `z` as a monomial in `z'`.
    pub fn pull_back(&self, exponents: &[BigInt]) -> Vec<BigInt> {
        self.substitution.transpose().mul_vec(exponents)
    }

    /// The cover `X(T2 T1 M) -> X(M)` obtained by following `outer` with `self`,
    /// built by composing the substitutions.
    pub fn then(&self, outer: &CoverDescriptor) -> Result<CoverDescriptor> {
        if outer.target != self.source {
            return Err(Error::DimensionMismatch(
                "outer cover does not start where this one ends".into(),
            ));
        }
        // z_k = prod_l (z'_l)^{t1_lk}, z'_l = prod_p (z''_p)^{t2_pl}
        let substitution = &self.substitution * &outer.substitution;
        let transform = substitution.transpose();
        let deck = cokernel(&transform.transpose())?;
        Ok(CoverDescriptor {
            source: outer.source.clone(),
            target: self.target.clone(),
            transform,
            deck,
            substitution,
        })
    }
}

pub fn cover_descriptor(t: &IntMatrix, m: &IntMatrix) -> Result<CoverDescriptor> {
    if !t.is_square() || t.rows() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "transform is {}x{}, matrix has {} rows",
            t.rows(),
            t.cols(),
            m.rows()
        )));
    }
    if t.determinant().is_zero() {
        return Err(Error::SingularTransform);
    }
    let cover = CoverDescriptor {
        transform: t.clone(),
        source: t * m,
        target: m.clone(),
        deck: cokernel(&t.transpose())?,
        substitution: t.transpose(),
    };
    for j in 0..m.cols() {
        if cover.pull_back(&m.column(j)) != cover.source.column(j) {
            return Err(Error::DimensionMismatch(format!(
                "substitution does not carry equation {j} onto the cover"
            )));
        }
    }
    Ok(cover)
}

/// `X(M) = X(d)^n / gamma x (C*)^(m-n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDecomposition {
    #[serde(with = "bigint_json")]
    pub d: BigInt,
    pub n: usize,
    pub m: usize,
    pub gamma: FiniteAbelianSubgroup,
    pub torus_rank: usize,
    pub completion: DiagonalCompletion,
}

/// `gamma` acts on `X(d)^n x (C*)^(m-n)` by `z_k -> zeta^{g_k} z_k` for `k <= n`,
/// `zeta` a primitive `d`-th root of unity; the torus factor is untouched.
pub fn structure_decomposition(m: &IntMatrix) -> Result<StructureDecomposition> {
    let completion = diagonal_completion(m)?;
    let gamma = gamma_embedding(&completion)?;
    Ok(StructureDecomposition {
        d: completion.d.clone(),
        n: m.cols(),
        m: m.rows(),
        gamma,
        torus_rank: m.rows() - m.cols(),
        completion,
    })
}

/// A numeric point `(x, y, z)`; complex numbers serialize as `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FibrationPoint {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
    pub z: Vec<Complex64>,
}

impl FibrationPoint {
    pub fn real(x: &[f64], y: &[f64], z: &[f64]) -> Self {
        let c = |v: &[f64]| v.iter().map(|&a| Complex64::new(a, 0.0)).collect();
        FibrationPoint {
            x: c(x),
            y: c(y),
            z: c(z),
        }
    }
}

/// Largest relative residual of the defining equations at `p`.
pub fn membership_residual(desc: &VarietyDescriptor, p: &FibrationPoint) -> Result<f64> {
    if p.x.len() != desc.n() || p.y.len() != desc.n() || p.z.len() != desc.m() {
        return Err(Error::DimensionMismatch(format!(
            "point has {}/{}/{} coordinates, variety needs {}/{}/{}",
            p.x.len(),
            p.y.len(),
            p.z.len(),
            desc.n(),
            desc.n(),
            desc.m()
        )));
    }
    if let Some(k) = p.z.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::ZeroCoordinate(k));
    }
    let mut worst: f64 = 0.0;
    for j in 0..desc.n() {
        let mono = desc.monomial(j, &p.z)?;
        let lhs = p.x[j] * p.y[j];
        let scale = 1.0 + p.x[j].norm() * p.y[j].norm() + mono.norm();
        worst = worst.max((lhs - (mono + 1.0)).norm() / scale);
    }
    Ok(worst)
}

/// `h(x, y, z) = (|x_j^2 - y_j^2|, log|z_k|)`.
pub fn fibration_eval(desc: &VarietyDescriptor, p: &FibrationPoint) -> Result<Vec<f64>> {
    let residual = membership_residual(desc, p)?;
    if residual > MEMBERSHIP_TOLERANCE {
        return Err(Error::NotOnVariety { residual });
    }
    let mut out: Vec<f64> = p
        .x
        .iter()
        .zip(&p.y)
        .map(|(x, y)| (x * x - y * y).norm())
        .collect();
    out.extend(p.z.iter().map(|z| z.norm().ln()));
    Ok(out)
}

/// A point of `X(M)` sampled from `seed`: `|z_k|` uniform in `[1/2, 2]` with a uniform
/// argument, then `c_j = z^{a_j} + 1` split as `x_j y_j` with `|x_j| = |y_j|`
/// (or `x_j = 0` and `y_j` on the unit circle when `c_j = 0`).
pub fn random_point(desc: &VarietyDescriptor, seed: u64) -> Result<FibrationPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let z: Vec<Complex64> = (0..desc.m())
        .map(|_| {
            let r = rng.gen_range(0.5..=2.0);
            Complex64::from_polar(r, rng.gen_range(0.0..tau))
        })
        .collect();
    let mut x = Vec::with_capacity(desc.n());
    let mut y = Vec::with_capacity(desc.n());
    for j in 0..desc.n() {
        let c = desc.monomial(j, &z)? + 1.0;
        let phase = rng.gen_range(0.0..tau);
        if c.norm() == 0.0 {
            x.push(Complex64::new(0.0, 0.0));
            y.push(Complex64::from_polar(1.0, phase));
        } else {
            let xj = Complex64::from_polar(c.norm().sqrt(), phase);
            y.push(c / xj);
            x.push(xj);
        }
    }
    Ok(FibrationPoint { x, y, z })
}
