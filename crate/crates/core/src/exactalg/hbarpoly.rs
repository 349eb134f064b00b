//! Univariate polynomials in `ħ` over `ℚ(i)`, matrices of them, and the
//! Smith normal form over this Euclidean domain.

use std::fmt;

use num_traits::{One, Zero};

use super::scalar::GaussRat;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct HbarPoly {
    coeffs: Vec<GaussRat>,
}

impl HbarPoly {
    pub fn from_coeffs(coeffs: Vec<GaussRat>) -> Self {
        let mut p = HbarPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: GaussRat) -> Self {
        HbarPoly::from_coeffs(vec![c])
    }

    /// `c·ħ^k`.
    pub fn monomial(c: GaussRat, k: usize) -> Self {
        let mut coeffs = vec![GaussRat::zero(); k + 1];
        coeffs[k] = c;
        HbarPoly::from_coeffs(coeffs)
    }

    pub fn hbar_pow(k: usize) -> Self {
        HbarPoly::monomial(GaussRat::one(), k)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[GaussRat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> GaussRat {
        self.coeffs.get(k).cloned().unwrap_or_else(GaussRat::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Exponent of the largest power of `ħ` dividing `self`; `None` for zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn leading(&self) -> Option<&GaussRat> {
        self.coeffs.last()
    }

    pub fn is_unit(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn scale(&self, c: &GaussRat) -> Self {
        HbarPoly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn add(&self, o: &HbarPoly) -> HbarPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        HbarPoly::from_coeffs((0..n).map(|i| &self.coeff(i) + &o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &HbarPoly) -> HbarPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        HbarPoly::from_coeffs((0..n).map(|i| &self.coeff(i) - &o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &HbarPoly) -> HbarPoly {
        if self.is_zero() || o.is_zero() {
            return HbarPoly::zero();
        }
        let mut coeffs = vec![GaussRat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += &(a * b);
                }
            }
        }
        HbarPoly::from_coeffs(coeffs)
    }

    /// Euclidean division: `self = q·d + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &HbarPoly) -> (HbarPoly, HbarPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.leading().and_then(GaussRat::inv).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        let n = self.coeffs.len();
        if n <= dd {
            return (HbarPoly::zero(), self.clone());
        }
        let mut q = vec![GaussRat::zero(); n - dd];
        for k in (dd..n).rev() {
            let c = &r[k] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (i, b) in d.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    r[k - dd + i] -= &(&c * b);
                }
            }
            q[k - dd] = c;
        }
        (HbarPoly::from_coeffs(q), HbarPoly::from_coeffs(r))
    }

    /// Scales to a monic polynomial; returns the scaling factor used.
    pub fn monic(&self) -> (HbarPoly, GaussRat) {
        match self.leading() {
            None => (self.clone(), GaussRat::one()),
            Some(l) => {
                let inv = l.inv().expect("nonzero leading coefficient");
                (self.scale(&inv), inv)
            }
        }
    }

    pub fn divides(&self, o: &HbarPoly) -> bool {
        if self.is_zero() {
            return o.is_zero();
        }
        o.div_rem(self).1.is_zero()
    }
}

impl Zero for HbarPoly {
    fn zero() -> Self {
        HbarPoly { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl std::ops::Add for HbarPoly {
    type Output = HbarPoly;
    fn add(self, o: HbarPoly) -> HbarPoly {
        HbarPoly::add(&self, &o)
    }
}

impl One for HbarPoly {
    fn one() -> Self {
        HbarPoly::constant(GaussRat::one())
    }
}

impl std::ops::Mul for HbarPoly {
    type Output = HbarPoly;
    fn mul(self, o: HbarPoly) -> HbarPoly {
        HbarPoly::mul(&self, &o)
    }
}

impl fmt::Display for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}·ħ"),
                _ => format!("{c}·ħ^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for HbarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct HbarPolyMatrix {
    rows: usize,
    cols: usize,
    data: Vec<HbarPoly>,
}

impl HbarPolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        HbarPolyMatrix { rows, cols, data: vec![HbarPoly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = HbarPolyMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = HbarPoly::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<HbarPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(HbarPolyMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, o: &HbarPolyMatrix) -> Result<HbarPolyMatrix> {
        if self.cols != o.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out = HbarPolyMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Rows `from..` of the matrix.
    pub fn rows_from(&self, from: usize) -> HbarPolyMatrix {
        let from = from.min(self.rows);
        HbarPolyMatrix {
            rows: self.rows - from,
            cols: self.cols,
            data: self.data[from * self.cols..].to_vec(),
        }
    }

    pub fn direct_sum(&self, o: &HbarPolyMatrix) -> HbarPolyMatrix {
        let mut m = HbarPolyMatrix::zeros(self.rows + o.rows, self.cols + o.cols);
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

    /// Reduction modulo `ħ^n` viewed as a `ℚ(i)`-linear map between the
    /// truncated modules, using the basis `e_i·ħ^a` ordered by `(i, a)`.
    pub fn truncated_linear_map(&self, n: usize) -> super::Matrix {
        let mut m = super::Matrix::zeros(self.rows * n, self.cols * n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let p = &self[(i, j)];
                for (k, c) in p.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    for a in 0..n.saturating_sub(k) {
                        m[(i * n + a + k, j * n + a)] = c.clone();
                    }
                }
            }
        }
        m
    }

    /// Determinant via fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<HbarPoly> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(HbarPoly::one());
        }
        let mut a = self.clone();
        let mut sign = GaussRat::one();
        let mut prev = HbarPoly::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return Ok(HbarPoly::zero());
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[(i, j)].mul(&a[(k, k)]).sub(&a[(i, k)].mul(&a[(k, j)]));
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero(), "Bareiss division is exact");
                    a[(i, j)] = q;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(a[(n - 1, n - 1)].scale(&sign))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[target] += c·row[source]`.
    fn add_row_multiple(&mut self, target: usize, source: usize, c: &HbarPoly) {
        for j in 0..self.cols {
            let s = &self[(source, j)];
            if !s.is_zero() {
                let v = self[(target, j)].add(&c.mul(s));
                self[(target, j)] = v;
            }
        }
    }

    /// `col[target] += c·col[source]`.
    fn add_col_multiple(&mut self, target: usize, source: usize, c: &HbarPoly) {
        for i in 0..self.rows {
            let s = &self[(i, source)];
            if !s.is_zero() {
                let v = self[(i, target)].add(&c.mul(s));
                self[(i, target)] = v;
            }
        }
    }

    fn scale_row(&mut self, i: usize, c: &GaussRat) {
        for j in 0..self.cols {
            self[(i, j)] = self[(i, j)].scale(c);
        }
    }

    fn scale_col(&mut self, j: usize, c: &GaussRat) {
        for i in 0..self.rows {
            self[(i, j)] = self[(i, j)].scale(c);
        }
    }
}

impl std::ops::Index<(usize, usize)> for HbarPolyMatrix {
    type Output = HbarPoly;
    fn index(&self, (i, j): (usize, usize)) -> &HbarPoly {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for HbarPolyMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut HbarPoly {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for HbarPolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `M = U·D·W` with `U`, `W` invertible over `ℚ(i)[ħ]` and `D` diagonal with
/// monic entries, each dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub u: HbarPolyMatrix,
    pub d: HbarPolyMatrix,
    pub w: HbarPolyMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries of `D` in order.
    pub fn invariant_factors(&self) -> Vec<HbarPoly> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).filter(|p| !p.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(m: &HbarPolyMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    // Invariant: m = u · a · w.
    let mut u = HbarPolyMatrix::identity(rows);
    let mut w = HbarPolyMatrix::identity(cols);

    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest-degree nonzero entry in the trailing block, first by column then row.
        let mut best: Option<(usize, usize, usize)> = None;
        for j in t..cols {
            for i in t..rows {
                if let Some(deg) = a[(i, j)].degree() {
                    if best.is_none_or(|(d, _, _)| deg < d) {
                        best = Some((deg, i, j));
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        if pi != t {
            a.swap_rows(t, pi);
            u.swap_cols(t, pi);
        }
        if pj != t {
            a.swap_cols(t, pj);
            w.swap_rows(t, pj);
        }

        let pivot = a[(t, t)].clone();
        let mut dirty = false;
        for i in t + 1..rows {
            if a[(i, t)].is_zero() {
                continue;
            }
            let (q, r) = a[(i, t)].div_rem(&pivot);
            let neg_q = HbarPoly::zero().sub(&q);
            a.add_row_multiple(i, t, &neg_q);
            // u ← u·E⁻¹, E⁻¹ adds q·row t to row i, i.e. col t of u gains q·col i.
            u.add_col_multiple(t, i, &q);
            dirty |= !r.is_zero();
        }
        for j in t + 1..cols {
            if a[(t, j)].is_zero() {
                continue;
            }
            let (q, r) = a[(t, j)].div_rem(&pivot);
            let neg_q = HbarPoly::zero().sub(&q);
            a.add_col_multiple(j, t, &neg_q);
            // w ← F⁻¹·w, row t of w gains q·row j.
            w.add_row_multiple(t, j, &q);
            dirty |= !r.is_zero();
        }
        if dirty {
            continue;
        }
        // Divisibility: fold a row with a non-multiple into row t and retry.
        let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !pivot.divides(&a[(i, j)])));
        if let Some(i) = offender {
            a.add_row_multiple(t, i, &HbarPoly::one());
            u.add_col_multiple(i, t, &HbarPoly::constant(-GaussRat::one()));
            continue;
        }
        let (_, s) = pivot.monic();
        a.scale_row(t, &s);
        let s_inv = s.inv().expect("unit");
        u.scale_col(t, &s_inv);
        t += 1;
    }
    SmithDecomposition { u, d: a, w }
}
