use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed};

use crate::error::Error;
use crate::Result;

use super::index_set::IndexSet;

/// Ring-level scalar: exact arithmetic, total order, signs.
///
/// Implemented by `i64`, `BigInt`, `Ratio<BigInt>` and friends. Division is
/// only ever used where it is exact (Bareiss pivots, field scalars).
pub trait Scalar: Clone + Eq + Ord + Num + Signed + fmt::Debug + fmt::Display {}
impl<T> Scalar for T where T: Clone + Eq + Ord + Num + Signed + fmt::Debug + fmt::Display {}

/// Scalar with integer structure (gcd, exact divisibility).
pub trait IntScalar: Scalar + Integer {}
impl<T> IntScalar for T where T: Scalar + Integer {}

/// Scalar forming a field, so Gaussian elimination may divide freely.
pub trait FieldScalar: Scalar {}
impl<I> FieldScalar for Ratio<I> where I: Clone + Integer + fmt::Debug + fmt::Display, Ratio<I>: Scalar {}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend(r);
        }
        Matrix { rows: nrows, cols: ncols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> Vec<T> {
        self.row(r).to_vec()
    }

    pub fn col_vec(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Rows selected by `rows`, in their given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix { rows: rows.len(), cols: self.cols, data: data.to_vec() }
    }

    pub fn select_rows_set(&self, set: &IndexSet) -> Self {
        self.select_rows(set.as_slice())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                data.push(self.get(r, c).clone());
            }
        }
        Matrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Stack `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn from_row(row: Vec<T>) -> Self {
        Matrix { rows: 1, cols: row.len(), data: row }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c).clone() + a.clone() * other.get(k, c).clone();
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        self.iter_rows().map(|row| super::vecops::dot(row, v)).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    ///
    /// Valid over any integral domain: every division is exact. Keeps
    /// intermediate growth polynomial for integer matrices.
    pub fn det(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut m = self.data.clone();
        let at = |m: &Vec<T>, r: usize, c: usize| m[r * n + c].clone();
        let mut sign_flip = false;
        let mut prev = T::one();
        for k in 0..n - 1 {
            if at(&m, k, k).is_zero() {
                match (k + 1..n).find(|&r| !at(&m, r, k).is_zero()) {
                    Some(r) => {
                        for c in 0..n {
                            m.swap(k * n + c, r * n + c);
                        }
                        sign_flip = !sign_flip;
                    }
                    None => return Ok(T::zero()),
                }
            }
            let pivot = at(&m, k, k);
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (at(&m, i, j) * pivot.clone() - at(&m, i, k) * at(&m, k, j))
                        / prev.clone();
                    m[i * n + j] = v;
                }
                m[i * n + k] = T::zero();
            }
            prev = pivot;
        }
        let d = at(&m, n - 1, n - 1);
        Ok(if sign_flip { -d } else { d })
    }

    /// Rank by fraction-free elimination with full pivoting.
    pub fn rank(&self) -> usize {
        let (rows, cols) = (self.rows, self.cols);
        let mut m = self.data.clone();
        let mut rank = 0;
        let mut prev = T::one();
        let mut row_order: Vec<usize> = (0..rows).collect();
        while rank < rows.min(cols) {
            // find a nonzero pivot at or below/after (rank, rank)
            let mut pivot_pos = None;
            'search: for r in rank..rows {
                for c in rank..cols {
                    if !m[row_order[r] * cols + c].is_zero() {
                        pivot_pos = Some((r, c));
                        break 'search;
                    }
                }
            }
            let (pr, pc) = match pivot_pos {
                Some(p) => p,
                None => break,
            };
            row_order.swap(rank, pr);
            if pc != rank {
                for &ro in row_order.iter() {
                    m.swap(ro * cols + rank, ro * cols + pc);
                }
            }
            let pivot = m[row_order[rank] * cols + rank].clone();
            for r in rank + 1..rows {
                let head = m[row_order[r] * cols + rank].clone();
                for c in rank + 1..cols {
                    let v = (m[row_order[r] * cols + c].clone() * pivot.clone()
                        - head.clone() * m[row_order[rank] * cols + c].clone())
                        / prev.clone();
                    m[row_order[r] * cols + c] = v;
                }
                m[row_order[r] * cols + rank] = T::zero();
            }
            prev = pivot;
            rank += 1;
        }
        rank
    }
}

impl<T: FieldScalar> Matrix<T> {
    /// Unique solution of `self * x = rhs` for square `self`, if any.
    pub fn solve_square(&self, rhs: &[T]) -> Result<Option<Vec<T>>> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        assert_eq!(rhs.len(), self.rows, "rhs length mismatch");
        let n = self.rows;
        let mut aug: Vec<Vec<T>> = (0..n)
            .map(|r| {
                let mut row = self.row_vec(r);
                row.push(rhs[r].clone());
                row
            })
            .collect();
        for k in 0..n {
            let pivot_row = match (k..n).find(|&r| !aug[r][k].is_zero()) {
                Some(r) => r,
                None => return Ok(None),
            };
            aug.swap(k, pivot_row);
            let pivot = aug[k][k].clone();
            for c in k..=n {
                aug[k][c] = aug[k][c].clone() / pivot.clone();
            }
            for r in 0..n {
                if r != k && !aug[r][k].is_zero() {
                    let factor = aug[r][k].clone();
                    for c in k..=n {
                        aug[r][c] = aug[r][c].clone() - factor.clone() * aug[k][c].clone();
                    }
                }
            }
        }
        Ok(Some(aug.into_iter().map(|row| row[n].clone()).collect()))
    }

    pub fn inverse(&self) -> Result<Option<Matrix<T>>> {
        if self.rows != self.cols {
            return Err(Error::NonSquare);
        }
        let n = self.rows;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            match self.solve_square(&e)? {
                Some(col) => cols.push(col),
                None => return Ok(None),
            }
        }
        let mut inv = Matrix::zeros(n, n);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                inv.set(i, j, col[i].clone());
            }
        }
        Ok(Some(inv))
    }

    /// Basis of the (right) kernel, one vector per column of the result.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (rows, cols) = (self.rows, self.cols);
        let mut m: Vec<Vec<T>> = (0..rows).map(|r| self.row_vec(r)).collect();
        let mut pivot_col_of_row = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let pivot_row = (r..rows).find(|&i| !m[i][c].is_zero());
            let pr = match pivot_row {
                Some(p) => p,
                None => continue,
            };
            m.swap(r, pr);
            let pivot = m[r][c].clone();
            for cc in c..cols {
                m[r][cc] = m[r][cc].clone() / pivot.clone();
            }
            for i in 0..rows {
                if i != r && !m[i][c].is_zero() {
                    let factor = m[i][c].clone();
                    for cc in c..cols {
                        m[i][cc] = m[i][cc].clone() - factor.clone() * m[r][cc].clone();
                    }
                }
            }
            pivot_col_of_row.push(c);
            r += 1;
            if r == rows {
                break;
            }
        }
        let pivot_cols: Vec<usize> = pivot_col_of_row;
        let free_cols: Vec<usize> =
            (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
        let mut basis = Vec::with_capacity(free_cols.len());
        for &fc in &free_cols {
            let mut v = vec![T::zero(); cols];
            v[fc] = T::one();
            for (row_idx, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m[row_idx][fc].clone();
            }
            basis.push(v);
        }
        basis
    }
}

impl Matrix<crate::Int> {
    pub fn to_rat(&self) -> Matrix<crate::Rat> {
        self.map(|x| crate::Rat::from_integer(x.clone()))
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::Int::from(x)).collect())
                .collect(),
        )
    }
}

impl Matrix<crate::Rat> {
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Result<Matrix<crate::Int>> {
        if !self.is_integral() {
            return Err(Error::NotIntegral("matrix has fractional entries".into()));
        }
        Ok(self.map(|x| x.to_integer()))
    }
}
