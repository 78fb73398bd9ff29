use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A vector of `Zⁿ`, `n ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntVector(Vec<BigInt>);

impl IntVector {
    pub fn new(components: Vec<BigInt>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain(
                "integer vector must have at least one component",
            ));
        }
        Ok(IntVector(components))
    }

    pub fn from_i64s(components: &[i64]) -> Result<Self> {
        Self::new(components.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn components(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_components(self) -> Vec<BigInt> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|k| = |k₁| + … + |kₙ|`.
    pub fn ell1(&self) -> BigInt {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Nonnegative gcd of all components (zero for the zero vector).
    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// True iff the components are coprime.
    pub fn is_primitive(&self) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::domain(
                "primitivity is undefined for the zero vector",
            ));
        }
        Ok(self.content().is_one())
    }

    pub fn to_f64s(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.0.iter().map(ToPrimitive::to_i64).collect()
    }

    /// Euclidean scalar product with a real vector.
    pub fn dot_f64(&self, omega: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(omega)
            .map(|(k, w)| k.to_f64().unwrap_or(f64::NAN) * w)
            .sum()
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A dense integer matrix, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: Vec<Vec<BigInt>>,
    ncols: usize,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let ncols = rows.first().map(Vec::len).unwrap_or(0);
        if rows.is_empty() || ncols == 0 {
            return Err(Error::domain(
                "matrix must have at least one row and one column",
            ));
        }
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::domain("matrix rows have unequal lengths"));
        }
        Ok(IntMatrix { rows, ncols })
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(n, n, &vec![BigInt::one(); n])
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        IntMatrix {
            rows: vec![vec![BigInt::zero(); ncols]; nrows],
            ncols,
        }
    }

    /// `nrows × ncols` matrix with `diag` on the leading diagonal.
    pub fn diagonal(nrows: usize, ncols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for (i, d) in diag.iter().enumerate().take(nrows.min(ncols)) {
            m.rows[i][i] = d.clone();
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub(crate) fn rows_mut(&mut self) -> &mut Vec<Vec<BigInt>> {
        &mut self.rows
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols
    }

    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix> {
        if self.ncols != rhs.nrows() {
            return Err(Error::domain(format!(
                "shape mismatch: {}x{} times {}x{}",
                self.nrows(),
                self.ncols,
                rhs.nrows(),
                rhs.ncols
            )));
        }
        let mut out = Self::zeros(self.nrows(), rhs.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            for j in 0..rhs.ncols {
                let mut acc = BigInt::zero();
                for (l, a) in row.iter().enumerate() {
                    if !a.is_zero() {
                        acc += a * &rhs.rows[l][j];
                    }
                }
                out.rows[i][j] = acc;
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = Self::zeros(self.ncols, self.nrows());
        for (i, row) in self.rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                out.rows[j][i] = x.clone();
            }
        }
        out
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::domain("determinant of a non-square matrix"));
        }
        Ok(bareiss_det(self.rows.clone()))
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut m = self.rows.clone();
        let (nr, nc) = (self.nrows(), self.ncols);
        let mut rank = 0;
        for c in 0..nc {
            let Some(p) = (rank..nr).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(rank, p);
            for i in rank + 1..nr {
                if m[i][c].is_zero() {
                    continue;
                }
                let (a, b) = (m[rank][c].clone(), m[i][c].clone());
                for j in c..nc {
                    let v = &m[i][j] * &a - &b * &m[rank][j];
                    m[i][j] = v;
                }
                let g = m[i].iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
                if g > BigInt::one() {
                    for x in m[i].iter_mut() {
                        *x /= &g;
                    }
                }
            }
            rank += 1;
            if rank == nr {
                break;
            }
        }
        rank
    }

    /// ℓ¹-norm of every row.
    pub fn row_l1_norms(&self) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.abs()).sum())
            .collect()
    }

    /// Largest row ℓ¹-norm, the matrix norm `|A|` used for completion bounds.
    pub fn max_row_l1(&self) -> BigInt {
        self.row_l1_norms().into_iter().max().unwrap_or_default()
    }

    /// Matrix with row `i` and column `j` removed.
    pub(crate) fn minor(&self, i: usize, j: usize) -> Vec<Vec<BigInt>> {
        self.rows
            .iter()
            .enumerate()
            .filter(|&(r, _)| r != i)
            .map(|(_, row)| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(ToPrimitive::to_i64).collect())
            .collect()
    }
}

pub(crate) fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    if negate {
        -d
    } else {
        d
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(ToString::to_string).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Row basis of a sub-module `Λ ⊂ Zⁿ`: an `r × n` matrix of full row rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct SubmoduleBasis(IntMatrix);

impl SubmoduleBasis {
    pub fn new(rows: IntMatrix) -> Result<Self> {
        if rows.nrows() > rows.ncols() {
            return Err(Error::domain(format!(
                "a sub-module of Z^{} has rank at most {}, got {} rows",
                rows.ncols(),
                rows.ncols(),
                rows.nrows()
            )));
        }
        let rank = rows.rank();
        if rank < rows.nrows() {
            return Err(Error::domain(format!(
                "basis rows are linearly dependent (rank {rank} < {})",
                rows.nrows()
            )));
        }
        Ok(SubmoduleBasis(rows))
    }

    pub fn from_vector(k: &IntVector) -> Result<Self> {
        Self::new(IntMatrix::from_rows(vec![k.components().to_vec()])?)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }
}

impl TryFrom<IntMatrix> for SubmoduleBasis {
    type Error = Error;
    fn try_from(m: IntMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<SubmoduleBasis> for IntMatrix {
    fn from(b: SubmoduleBasis) -> Self {
        b.0
    }
}

/// A square integer matrix with determinant `±1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct UnimodularMatrix(IntMatrix);

impl UnimodularMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        let det = m.det()?;
        if det.abs() != BigInt::one() {
            return Err(Error::domain(format!(
                "matrix is not unimodular (det = {det})"
            )));
        }
        Ok(UnimodularMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        UnimodularMatrix(IntMatrix::identity(n))
    }

    pub(crate) fn new_unchecked(m: IntMatrix) -> Self {
        UnimodularMatrix(m)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> IntMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn det(&self) -> BigInt {
        bareiss_det(self.0.rows.clone())
    }
}

impl TryFrom<IntMatrix> for UnimodularMatrix {
    type Error = Error;
    fn try_from(m: IntMatrix) -> Result<Self> {
        Self::new(m)
    }
}

impl From<UnimodularMatrix> for IntMatrix {
    fn from(u: UnimodularMatrix) -> Self {
        u.0
    }
}

// JSON form: integers that fit in an i64 are plain numbers, larger ones are
// decimal strings, so nothing is ever silently rounded by a JSON reader.

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonInt {
    Small(i64),
    Big(String),
}

impl JsonInt {
    fn from_big(x: &BigInt) -> Self {
        match x.to_i64() {
            Some(v) => JsonInt::Small(v),
            None => JsonInt::Big(x.to_string()),
        }
    }

    fn into_big<E: serde::de::Error>(self) -> std::result::Result<BigInt, E> {
        match self {
            JsonInt::Small(v) => Ok(BigInt::from(v)),
            JsonInt::Big(s) => s
                .parse()
                .map_err(|_| E::custom(format!("invalid integer {s:?}"))),
        }
    }
}

pub(crate) fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    JsonInt::from_big(x).serialize(s)
}

pub(crate) fn ser_bigint_vec<S: Serializer>(
    x: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    x.iter()
        .map(JsonInt::from_big)
        .collect::<Vec<_>>()
        .serialize(s)
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<JsonInt> = self.0.iter().map(JsonInt::from_big).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<JsonInt>::deserialize(d)?;
        let comps = raw
            .into_iter()
            .map(JsonInt::into_big)
            .collect::<std::result::Result<_, _>>()?;
        IntVector::new(comps).map_err(serde::de::Error::custom)
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<JsonInt>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(JsonInt::from_big).collect())
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<Vec<JsonInt>>::deserialize(d)?;
        let rows = raw
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(JsonInt::into_big)
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        IntMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
