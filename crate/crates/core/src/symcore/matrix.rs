use std::fmt;
use std::ops::Index;

use itertools::Itertools;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{Mode, Number, Rational, Scalar};
use crate::{Error, Result};

/// Strictly increasing set of 0-based indices.
///
/// Serialized (and displayed) 1-based, matching the `{1, ..., n}`
/// convention used on the command line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// `{0, ..., n-1}`.
    pub fn full(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    /// Sorts and deduplicates.
    pub fn from_zero_based(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    /// Converts 1-based indices; zero is rejected and duplicates are an error.
    pub fn from_one_based(indices: &[usize]) -> Result<Self> {
        let mut v = Vec::with_capacity(indices.len());
        for &i in indices {
            if i == 0 {
                return Err(Error::Parse("index sets are 1-based; 0 is not allowed".into()));
            }
            v.push(i - 1);
        }
        let len = v.len();
        let set = Self::from_zero_based(v);
        if set.len() != len {
            return Err(Error::Parse("duplicate index in index set".into()));
        }
        Ok(set)
    }

    /// Subset of `{0, ..., n-1}` encoded by the bits of `mask`.
    pub fn from_mask(mask: u64) -> Self {
        IndexSet((0..64).filter(|b| mask >> b & 1 == 1).collect())
    }

    pub fn mask(&self) -> u64 {
        self.0.iter().fold(0, |m, &i| m | 1 << i)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last >= n => Err(Error::IndexOutOfRange { index: last + 1, n }),
            _ => Ok(()),
        }
    }

    pub fn complement(&self, n: usize) -> Self {
        IndexSet((0..n).filter(|&i| !self.contains(i)).collect())
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_zero_based(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &Self) -> Self {
        IndexSet(self.iter().filter(|&i| other.contains(i)).collect())
    }

    pub fn difference(&self, other: &Self) -> Self {
        IndexSet(self.iter().filter(|&i| !other.contains(i)).collect())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    /// Positions of the members of `self` inside `within`.
    pub fn relative_to(&self, within: &Self) -> Result<Self> {
        self.iter()
            .map(|i| {
                within.0.binary_search(&i).map_err(|_| Error::Parse(format!("index {} not in enclosing set", i + 1)))
            })
            .collect::<Result<Vec<_>>>()
            .map(IndexSet)
    }

    /// All `k`-subsets of `{0, ..., n-1}` in lexicographic order.
    pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = IndexSet> {
        (0..n).combinations(k).map(IndexSet)
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|i| i + 1).collect()
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.0.iter().map(|i| i + 1).join(","))
    }
}

impl Serialize for IndexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(deserializer)?;
        IndexSet::from_one_based(&v).map_err(serde::de::Error::custom)
    }
}

/// Dense real symmetric matrix, stored row-major.
///
/// Every constructor mirrors the upper triangle, so `a[(i, j)] == a[(j, i)]`
/// holds exactly.
#[derive(Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    /// Builds from `f(i, j)` evaluated on the upper triangle `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                if i != j {
                    data[j * n + i] = v.clone();
                }
                data[i * n + j] = v;
            }
        }
        SymMatrix { n, data }
    }

    /// Rejects ragged or non-symmetric input (exact comparison).
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { n, row: row + 1, len: r.len() });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if rows[i][j] != rows[j][i] {
                    return Err(Error::NotSymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(SymMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_fn(n, |_, _| T::zero())
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.n.max(1)).take(self.n)
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn diagonal_product(&self) -> T {
        (0..self.n).fold(T::one(), |acc, i| acc * self.get(i, i).clone())
    }

    /// `max_i sum_j |a_ij|`.
    pub fn inf_norm(&self) -> f64 {
        self.rows().map(|r| r.iter().map(|x| x.to_f64().abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `A[alpha]`, rows and columns in ascending order. The empty set gives
    /// the order-0 matrix, whose determinant is 1.
    pub fn principal_submatrix(&self, alpha: &IndexSet) -> Result<Self> {
        alpha.check_range(self.n)?;
        let idx = alpha.as_slice();
        let m = idx.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in idx {
            for &j in idx {
                data.push(self.get(i, j).clone());
            }
        }
        Ok(SymMatrix { n: m, data })
    }

    /// Rectangular block `A[rows, cols]`, row-major.
    pub fn block(&self, rows: &IndexSet, cols: &IndexSet) -> Vec<T> {
        rows.iter().flat_map(|i| cols.iter().map(move |j| self.get(i, j).clone())).collect()
    }

    pub fn determinant(&self) -> T {
        T::det_kernel(self.n, self.data.clone())
    }

    /// `B[i][j] = A[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: perm.len() });
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Parse("not a permutation".into()));
            }
        }
        Ok(Self::from_fn(self.n, |i, j| self.get(perm[i], perm[j]).clone()))
    }

    /// Diagonal congruence `S A S` with `S = diag(scale)`.
    pub fn congruence(&self, scale: &[T]) -> Result<Self> {
        if scale.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: scale.len() });
        }
        Ok(Self::from_fn(self.n, |i, j| scale[i].clone() * self.get(i, j).clone() * scale[j].clone()))
    }

    /// `A + eps * v v^T`.
    pub fn add_outer(&self, eps: &T, v: &[T]) -> Result<Self> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: v.len() });
        }
        Ok(Self::from_fn(self.n, |i, j| self.get(i, j).clone() + eps.clone() * v[i].clone() * v[j].clone()))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SymMatrix<U> {
        SymMatrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> SymMatrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn mode(&self) -> Mode {
        T::MODE
    }
}

impl SymMatrix<f64> {
    /// Accepts float rows that are symmetric up to `rel_tol * max(1, |A|)`
    /// and mirrors the upper triangle.
    pub fn from_rows_symmetrized(rows: Vec<Vec<f64>>, rel_tol: f64) -> Result<Self> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { n, row: row + 1, len: r.len() });
            }
        }
        let scale = rows.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            for j in i + 1..n {
                if (rows[i][j] - rows[j][i]).abs() > rel_tol * scale {
                    return Err(Error::NotSymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(Self::from_fn(n, |i, j| rows[i][j]))
    }
}

impl SymMatrix<Rational> {
    /// Entrywise nearest point of the grid `k / denominator`.
    pub fn rationalize(a: &SymMatrix<f64>, denominator: i64) -> Result<Self> {
        let mut bad = None;
        let m = SymMatrix::from_fn(a.order(), |i, j| {
            Rational::round_to_grid(*a.get(i, j), denominator).unwrap_or_else(|| {
                bad = Some((i, j));
                Rational::zero()
            })
        });
        match bad {
            Some((i, j)) => Err(Error::Parse(format!("non-finite entry at ({}, {})", i + 1, j + 1))),
            None => Ok(m),
        }
    }
}

impl<T> Index<(usize, usize)> for SymMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T: Scalar> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl<T: Scalar> fmt::Display for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.data.iter().map(|x| x.to_string()).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(0);
        for row in cells.chunks(self.n.max(1)).take(self.n) {
            let line = row.iter().map(|c| format!("{c:>width$}")).join("  ");
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Serializes in the matrix-file layout: `{"n", "mode", "entries"}`.
impl<T: Scalar> Serialize for SymMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Vec<Number>> = self.rows().map(|r| r.iter().map(Scalar::to_number).collect()).collect();
        let mut s = serializer.serialize_struct("SymMatrix", 3)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("mode", &T::MODE)?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}
