//! Integer vectors in `Z^n` and in the quotient `N = Z^n / Z(1, ..., 1)`,
//! integer matrices, Smith normal form and rational span tests.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A lattice vector. When `quotient` is set the vector is read modulo the
/// all-ones line, and its canonical representative has last coordinate 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeVector {
    pub coords: Vec<BigInt>,
    #[serde(default)]
    pub quotient: bool,
}

impl LatticeVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        Self { coords, quotient: false }
    }

    pub fn in_quotient(coords: Vec<BigInt>) -> Self {
        Self { coords, quotient: true }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        Self::new(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn quotient_from_i64(coords: &[i64]) -> Self {
        Self::in_quotient(coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Rank of the lattice the vector lives in.
    pub fn ambient_rank(&self) -> usize {
        if self.quotient {
            self.coords.len().saturating_sub(1)
        } else {
            self.coords.len()
        }
    }

    pub fn canonical(&self) -> Self {
        if !self.quotient || self.coords.is_empty() {
            return self.clone();
        }
        let last = self.coords.last().unwrap().clone();
        Self::in_quotient(self.coords.iter().map(|c| c - &last).collect())
    }

    /// Coordinates in `Z^d`: for a quotient vector the canonical form with
    /// its trailing zero dropped, which identifies `N` with `Z^(n-1)`.
    pub fn plain_coords(&self) -> Vec<BigInt> {
        if self.quotient {
            let mut c = self.canonical().coords;
            c.pop();
            c
        } else {
            self.coords.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.plain_coords().iter().all(Zero::is_zero)
    }

    /// `gcd` of the coordinates (in the quotient: of the canonical form) is one.
    pub fn is_primitive(&self) -> bool {
        let g = self
            .plain_coords()
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c));
        g.is_one()
    }

    /// Pairing with a dual vector, `sum_i m_i * v_i`. For quotient vectors the
    /// dual vector must have coordinate sum zero for this to be well defined.
    pub fn pair(&self, m: &[BigInt]) -> BigInt {
        self.coords.iter().zip(m).map(|(a, b)| a * b).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
            quotient: self.quotient,
        }
    }
}

impl PartialEq for LatticeVector {
    fn eq(&self, other: &Self) -> bool {
        self.quotient == other.quotient
            && self.coords.len() == other.coords.len()
            && self.canonical().coords == other.canonical().coords
    }
}

impl Eq for LatticeVector {}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))?;
        if self.quotient {
            write!(f, " mod 1")?;
        }
        Ok(())
    }
}

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Precondition("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(&rows).expect("rectangular input")
    }

    /// Matrix whose columns are the given vectors, each of length `dim`.
    pub fn from_columns(columns: &[Vec<BigInt>], dim: usize) -> Self {
        let mut m = Self::zeros(dim, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), dim, "column length mismatch");
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.entries.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.entries.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

/// Result of a Smith normal form computation: `u * m * v` is diagonal with
/// entries `diagonal`, each dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
    pub u: IntegerMatrix,
    pub v: IntegerMatrix,
}

impl SmithForm {
    /// Product of the nonzero invariant factors.
    pub fn nonzero_product(&self) -> BigInt {
        self.diagonal.iter().filter(|d| !d.is_zero()).product()
    }

    pub fn all_ones(&self) -> bool {
        self.diagonal[..self.rank].iter().all(One::is_one)
    }
}

pub fn smith_normal_form(m: &IntegerMatrix) -> SmithForm {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntegerMatrix::identity(rows);
    let mut v = IntegerMatrix::identity(cols);
    let steps = rows.min(cols);

    for t in 0..steps {
        // smallest nonzero entry of the trailing block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[(i, j)].is_zero())
            .min_by(|&x, &y| a[x].abs().cmp(&a[y].abs()));
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                let nq = -q;
                a.add_row(i, t, &nq);
                u.add_row(i, t, &nq);
                if !a[(i, t)].is_zero() {
                    a.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                let nq = -q;
                a.add_col(j, t, &nq);
                v.add_col(j, t, &nq);
                if !a[(t, j)].is_zero() {
                    a.swap_cols(t, j);
                    v.swap_cols(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block by the pivot
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&a[(t, t)]));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    a.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            a.negate_row(t);
            u.negate_row(t);
        }
    }

    let diagonal: Vec<BigInt> = (0..steps).map(|i| a[(i, i)].clone()).collect();
    let rank = diagonal.iter().filter(|d| !d.is_zero()).count();
    SmithForm { diagonal, rank, u, v }
}

/// Index of the lattice spanned by `vectors` inside `Z^dim`; `None` when the
/// span has rank below `dim` (infinite index).
pub fn lattice_index(vectors: &[Vec<BigInt>], dim: usize) -> Option<BigInt> {
    if dim == 0 {
        return Some(BigInt::one());
    }
    let snf = smith_normal_form(&IntegerMatrix::from_columns(vectors, dim));
    (snf.rank == dim).then(|| snf.nonzero_product())
}

/// Rank over the rationals of a list of integer vectors.
pub fn rational_rank(vectors: &[Vec<BigInt>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in rank + 1..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let f = &rows[r][c] / &pivot;
            for k in c..cols {
                let delta = &rows[rank][k] * &f;
                rows[r][k] -= delta;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Whether `v` lies in the rational span of `spanning`. Quotient vectors are
/// compared modulo the all-ones line.
pub fn rational_solve_membership(v: &LatticeVector, spanning: &[LatticeVector]) -> bool {
    if v.is_zero() {
        return true;
    }
    let mut vecs: Vec<Vec<BigInt>> = spanning.iter().map(LatticeVector::plain_coords).collect();
    let before = rational_rank(&vecs);
    vecs.push(v.plain_coords());
    rational_rank(&vecs) == before
}
