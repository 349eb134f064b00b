//! Dense matrices over `ℚ(i)` and exact Gauss elimination.
//!
//! Pivoting is deterministic: columns are scanned left to right and the pivot
//! is the nonzero entry with the lowest row index among unused rows.

use std::fmt;

use num_traits::{One, Zero};

use super::scalar::GaussRat;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<GaussRat>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![GaussRat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = GaussRat::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<GaussRat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| GaussRat::int(x)).collect()).collect())
            .expect("rectangular literal")
    }

    /// Builds a matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_columns(rows: usize, columns: &[Vec<GaussRat>]) -> Self {
        let mut m = Matrix::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, x) in col.iter().enumerate() {
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

    pub fn row(&self, i: usize) -> &[GaussRat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<GaussRat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn conj(&self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(GaussRat::conj).collect() }
    }

    pub fn conj_transpose(&self) -> Matrix {
        self.transpose().conj()
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += &(a * b);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[GaussRat]) -> Result<Vec<GaussRat>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("{} columns, vector of {}", self.cols, v.len())));
        }
        let mut out = vec![GaussRat::zero(); self.rows];
        for (i, o) in out.iter_mut().enumerate() {
            for (a, b) in self.row(i).iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    *o += &(a * b);
                }
            }
        }
        Ok(out)
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, o: &Matrix) -> Result<Matrix> {
        if self.rows != o.rows {
            return Err(Error::DimensionMismatch("hcat row counts differ".into()));
        }
        let mut m = Matrix::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..o.cols {
                m[(i, self.cols + j)] = o[(i, j)].clone();
            }
        }
        Ok(m)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, o: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + o.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..o.rows {
            for j in 0..o.cols {
                m[(self.rows + i, self.cols + j)] = o[(i, j)].clone();
            }
        }
        m
    }

    /// Kronecker product with the identity of size `m` on the right: every
    /// entry `a` becomes `a·I_m`.
    pub fn kron_identity(&self, m: usize) -> Matrix {
        let mut out = Matrix::zeros(self.rows * m, self.cols * m);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for r in 0..m {
                    out[(i * m + r, j * m + r)] = a.clone();
                }
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m[(row, col)].inv().expect("nonzero pivot");
            for j in col..m.cols {
                if !m[(row, j)].is_zero() {
                    m[(row, j)] = &m[(row, j)] * &inv;
                }
            }
            for i in 0..m.rows {
                if i == row || m[(i, col)].is_zero() {
                    continue;
                }
                let f = m[(i, col)].clone();
                for j in col..m.cols {
                    if m[(row, j)].is_zero() {
                        continue;
                    }
                    let t = &f * &m[(row, j)];
                    m[(i, j)] -= &t;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one vector per free column, in column order.
    pub fn kernel_basis(&self) -> Vec<Vec<GaussRat>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut v = vec![GaussRat::zero(); self.cols];
            v[free] = GaussRat::one();
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = -r[(k, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Pivot columns of the original matrix, which form a basis of the image.
    pub fn image_basis(&self) -> Vec<Vec<GaussRat>> {
        let (_, pivots) = self.rref();
        pivots.iter().map(|&j| self.column(j)).collect()
    }

    pub fn determinant(&self) -> Result<GaussRat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let mut m = self.clone();
        let mut det = GaussRat::one();
        for col in 0..m.cols {
            let Some(p) = (col..m.rows).find(|&i| !m[(i, col)].is_zero()) else {
                return Ok(GaussRat::zero());
            };
            if p != col {
                m.swap_rows(p, col);
                det = -det;
            }
            let pivot = m[(col, col)].clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("nonzero pivot");
            for i in col + 1..m.rows {
                if m[(i, col)].is_zero() {
                    continue;
                }
                let f = &m[(i, col)] * &inv;
                for j in col..m.cols {
                    let t = &f * &m[(col, j)];
                    m[(i, j)] -= &t;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let aug = self.hcat(&Matrix::identity(n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::NotInvertible("singular matrix".into()));
        }
        Ok(r.select(&(0..n).collect::<Vec<_>>(), &(n..2 * n).collect::<Vec<_>>()))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = GaussRat;
    fn index(&self, (i, j): (usize, usize)) -> &GaussRat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut GaussRat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Rank of a list of vectors of common length `dim`.
pub fn span_rank(dim: usize, vectors: &[Vec<GaussRat>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    Matrix::from_columns(dim, vectors).rank()
}

/// Extracts a basis of the span of `vectors` (a maximal independent prefix-greedy subset).
pub fn span_basis(dim: usize, vectors: &[Vec<GaussRat>]) -> Vec<Vec<GaussRat>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    Matrix::from_columns(dim, vectors).image_basis()
}

/// `dim (span(ambient) + span(sub)) / span(sub)`.
pub fn subspace_quotient_dim(dim: usize, ambient: &[Vec<GaussRat>], sub: &[Vec<GaussRat>]) -> usize {
    let mut all = sub.to_vec();
    all.extend_from_slice(ambient);
    span_rank(dim, &all) - span_rank(dim, sub)
}

/// Coordinates of `v` in terms of the independent columns `basis`, or `None`
/// when `v` is outside their span.
pub fn solve_in_basis(dim: usize, basis: &[Vec<GaussRat>], v: &[GaussRat]) -> Option<Vec<GaussRat>> {
    let n = basis.len();
    let mut cols = basis.to_vec();
    cols.push(v.to_vec());
    let (r, pivots) = Matrix::from_columns(dim, &cols).rref();
    if pivots.contains(&n) {
        return None;
    }
    debug_assert_eq!(pivots.len(), n, "basis must be independent");
    Some((0..n).map(|k| r[(k, n)].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> GaussRat {
        GaussRat::from_ints(re, im)
    }

    #[test]
    fn identity_rank() {
        assert_eq!(Matrix::identity(3).rank(), 3);
    }

    #[test]
    fn gaussian_rank_one() {
        // second row is i times the first
        let m = Matrix::from_rows(vec![vec![g(1, 0), g(0, 1)], vec![g(0, 1), g(-1, 0)]]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let m = Matrix::from_int_rows(&[&[1, 1]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 1);
        // spans the same line as (1, −1)
        assert_eq!(ker[0][0], -ker[0][1].clone());
        assert!(!ker[0][0].is_zero());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = Matrix::from_int_rows(&[&[1, 2, 3, 4], &[2, 4, 6, 8], &[0, 1, 0, 1]]);
        let ker = m.kernel_basis();
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).unwrap().iter().all(Zero::is_zero));
        }
        assert_eq!(m.image_basis().len(), 2);
    }

    #[test]
    fn dimension_mismatch_errors() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(a.mul(&a), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn inverse_and_determinant() {
        let m = Matrix::from_rows(vec![vec![g(1, 1), g(2, 0)], vec![g(0, 0), g(0, -1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Matrix::identity(2));
        assert_eq!(m.determinant().unwrap(), &g(1, 1) * &g(0, -1));
    }

    #[test]
    fn quotient_dims() {
        let e1 = vec![g(1, 0), g(0, 0)];
        let e2 = vec![g(0, 0), g(1, 0)];
        assert_eq!(subspace_quotient_dim(2, &[e1.clone(), e2.clone()], &[e1.clone()]), 1);
        assert_eq!(solve_in_basis(2, &[e1.clone(), e2.clone()], &[g(3, 0), g(0, 2)]), Some(vec![g(3, 0), g(0, 2)]));
        assert_eq!(solve_in_basis(2, &[e1], &e2), None);
    }
}
