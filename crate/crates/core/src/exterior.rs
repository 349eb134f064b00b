//! Exterior algebra on a finite-dimensional space and the `ħ`-deformed
//! Koszul complex `(∧•W ⊗ ℚ(i)[ħ], l(ħ) ∧ ·)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{
    complex_cohomology_over_pid, CohomologyModule, GaussRat, HbarPoly, HbarPolyMatrix, Matrix,
};

/// Basis `j`-vectors of `∧^j W`, `dim W = g`, as bitmasks in lexicographic
/// order of their index tuples.
pub fn basis(g: usize, j: usize) -> Vec<u32> {
    fn rec(start: usize, g: usize, left: usize, mask: u32, out: &mut Vec<u32>) {
        if left == 0 {
            out.push(mask);
            return;
        }
        for i in start..g {
            rec(i + 1, g, left - 1, mask | (1 << i), out);
        }
    }
    let mut out = Vec::new();
    if j <= g {
        rec(0, g, j, 0, &mut out);
    }
    out
}

fn index_of(g: usize, mask: u32) -> usize {
    basis(g, mask.count_ones() as usize).iter().position(|&m| m == mask).expect("mask in range")
}

/// Sign of `e_I ∧ e_J` relative to `e_{I∪J}`; zero when the index sets meet.
fn wedge_sign(a: u32, b: u32) -> i64 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0;
    let mut rest = a;
    while rest != 0 {
        let i = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (b & ((1u32 << i) - 1)).count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Homogeneous element of `∧^j W`; absent basis elements have coefficient 0.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiVector {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<u32, GaussRat>,
}

impl MultiVector {
    pub fn zero(dim: usize, degree: usize) -> Self {
        MultiVector { dim, degree: degree.min(dim), coeffs: BTreeMap::new() }
    }

    pub fn scalar(dim: usize, c: GaussRat) -> Self {
        let mut m = MultiVector::zero(dim, 0);
        m.set(&[], c);
        m
    }

    /// Degree-one element with the given coordinates.
    pub fn vector(coords: &[GaussRat]) -> Self {
        let mut m = MultiVector::zero(coords.len(), 1);
        for (i, c) in coords.iter().enumerate() {
            m.set(&[i], c.clone());
        }
        m
    }

    /// The basis element `e_{i₁} ∧ … ∧ e_{i_j}` (0-based, strictly increasing).
    pub fn basis_element(dim: usize, indices: &[usize]) -> Self {
        let mut m = MultiVector::zero(dim, indices.len());
        m.set(indices, GaussRat::int(1));
        m
    }

    fn set(&mut self, indices: &[usize], c: GaussRat) {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        let mask = indices.iter().fold(0u32, |m, &i| m | (1 << i));
        if c.is_zero() {
            self.coeffs.remove(&mask);
        } else {
            self.coeffs.insert(mask, c);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient at a strictly increasing index tuple.
    pub fn coeff(&self, indices: &[usize]) -> GaussRat {
        let mask = indices.iter().fold(0u32, |m, &i| m | (1 << i));
        self.coeffs.get(&mask).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Nonzero coefficients keyed by index tuple.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &GaussRat)> {
        self.coeffs.iter().map(|(&mask, c)| ((0..32).filter(|i| mask & (1 << i) != 0).collect(), c))
    }

    /// Coordinates in the lexicographic basis of `∧^j W`.
    pub fn to_coords(&self) -> Vec<GaussRat> {
        basis(self.dim, self.degree).iter().map(|m| self.coeffs.get(m).cloned().unwrap_or_else(GaussRat::zero)).collect()
    }

    pub fn add(&self, o: &MultiVector) -> MultiVector {
        assert_eq!((self.dim, self.degree), (o.dim, o.degree), "adding multivectors of different shape");
        let mut out = self.clone();
        for (m, c) in &o.coeffs {
            let v = &out.coeffs.get(m).cloned().unwrap_or_else(GaussRat::zero) + c;
            if v.is_zero() {
                out.coeffs.remove(m);
            } else {
                out.coeffs.insert(*m, v);
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussRat) -> MultiVector {
        let mut out = MultiVector::zero(self.dim, self.degree);
        if !c.is_zero() {
            out.coeffs = self.coeffs.iter().map(|(m, x)| (*m, x * c)).collect();
        }
        out
    }
}

/// Exterior product. Exceeding `dim W` yields the zero multivector of degree
/// `dim W` rather than an error.
pub fn wedge(a: &MultiVector, b: &MultiVector) -> MultiVector {
    assert_eq!(a.dim, b.dim, "wedge of multivectors over different spaces");
    let mut out = MultiVector::zero(a.dim, a.degree + b.degree);
    if a.degree + b.degree > a.dim {
        return out;
    }
    for (ma, ca) in &a.coeffs {
        for (mb, cb) in &b.coeffs {
            let s = wedge_sign(*ma, *mb);
            if s == 0 {
                continue;
            }
            let v = &(ca * cb) * &GaussRat::int(s);
            let e = out.coeffs.entry(ma | mb).or_insert_with(GaussRat::zero);
            *e += &v;
        }
    }
    out.coeffs.retain(|_, c| !c.is_zero());
    out
}

/// Matrix of `ω ↦ l ∧ ω` from `∧^j` to `∧^{j+1}` in lexicographic bases.
pub fn wedge_matrix(l: &[GaussRat], j: usize) -> Matrix {
    let g = l.len();
    let src = basis(g, j);
    let dst_len = basis(g, j + 1).len();
    let mut m = Matrix::zeros(dst_len, src.len());
    for (col, &mask) in src.iter().enumerate() {
        for (i, c) in l.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let s = wedge_sign(1 << i, mask);
            if s != 0 {
                m[(index_of(g, mask | (1 << i)), col)] = c * &GaussRat::int(s);
            }
        }
    }
    m
}

/// `dim ker(· ∧ l : ∧^j → ∧^{j+1})`, by elimination.
pub fn koszul_kernel_dim(l: &[GaussRat], j: usize, g: usize) -> Result<usize> {
    if l.len() != g {
        return Err(Error::DimensionMismatch(format!("covector of length {} in dimension {g}", l.len())));
    }
    if l.iter().all(Zero::is_zero) {
        return Err(Error::ZeroCovector);
    }
    if j > g {
        return Ok(0);
    }
    let m = wedge_matrix(l, j);
    Ok(m.cols() - m.rank())
}

/// Koszul complex over `ℚ(i)[ħ]` with differential `Σ_m ħ^m l_m ∧ ·`.
#[derive(Clone, Debug)]
pub struct KoszulHbarComplex {
    g: usize,
    l_series: BTreeMap<usize, Vec<GaussRat>>,
}

impl KoszulHbarComplex {
    /// Zero covectors are dropped; `m = 0` terms are rejected.
    pub fn new(g: usize, l_series: BTreeMap<usize, Vec<GaussRat>>) -> Result<Self> {
        let mut series = BTreeMap::new();
        for (m, l) in l_series {
            if m == 0 {
                return Err(Error::Invalid("series index must be at least 1".into()));
            }
            if l.len() != g {
                return Err(Error::DimensionMismatch(format!("l_{m} has length {}, expected {g}", l.len())));
            }
            if l.iter().any(|c| !c.is_zero()) {
                series.insert(m, l);
            }
        }
        Ok(KoszulHbarComplex { g, l_series: series })
    }

    /// `ħ^t · l`.
    pub fn monomial(l: Vec<GaussRat>, t: usize) -> Result<Self> {
        let g = l.len();
        KoszulHbarComplex::new(g, BTreeMap::from([(t, l)]))
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    pub fn l_series(&self) -> &BTreeMap<usize, Vec<GaussRat>> {
        &self.l_series
    }

    /// Rank of the cochain module in degree `j` (0 outside `0..=g`).
    pub fn rank(&self, j: i64) -> usize {
        if j < 0 || j as usize > self.g {
            0
        } else {
            basis(self.g, j as usize).len()
        }
    }

    /// Differential from degree `j` to `j + 1`.
    pub fn differential(&self, j: i64) -> HbarPolyMatrix {
        let (rows, cols) = (self.rank(j + 1), self.rank(j));
        let mut d = HbarPolyMatrix::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return d;
        }
        for (&m, l) in &self.l_series {
            let w = wedge_matrix(l, j as usize);
            for r in 0..rows {
                for c in 0..cols {
                    if !w[(r, c)].is_zero() {
                        d[(r, c)] = d[(r, c)].add(&HbarPoly::monomial(w[(r, c)].clone(), m));
                    }
                }
            }
        }
        d
    }

    /// Checks `d_{j+1} ∘ d_j = 0` in every degree.
    pub fn check(&self) -> Result<()> {
        for j in 0..self.g as i64 {
            if !self.differential(j + 1).mul(&self.differential(j))?.is_zero() {
                return Err(Error::CompositionNonzero(format!("Koszul degree {j}")));
            }
        }
        Ok(())
    }
}

/// `H^j` of the Koszul complex as a `ℂ[[ħ]]`-module, via Smith normal form.
pub fn oracle_cohomology(k: &KoszulHbarComplex, j: i64) -> Result<CohomologyModule> {
    complex_cohomology_over_pid(&k.differential(j - 1), &k.differential(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::binom;

    fn v(xs: &[i64]) -> Vec<GaussRat> {
        xs.iter().map(|&x| GaussRat::int(x)).collect()
    }

    #[test]
    fn basic_wedges() {
        let e1 = MultiVector::basis_element(2, &[0]);
        let e2 = MultiVector::basis_element(2, &[1]);
        assert_eq!(wedge(&e1, &e2), MultiVector::basis_element(2, &[0, 1]));
        assert!(wedge(&e1, &e1).is_zero());
        let a = MultiVector::vector(&v(&[1, 1]));
        let b = MultiVector::vector(&v(&[1, -1]));
        assert_eq!(wedge(&a, &b), MultiVector::basis_element(2, &[0, 1]).scale(&GaussRat::int(-2)));
    }

    #[test]
    fn overflow_is_zero_not_error() {
        let e = MultiVector::basis_element(2, &[0, 1]);
        let w = wedge(&e, &MultiVector::basis_element(2, &[0]));
        assert!(w.is_zero());
        assert_eq!(w.degree(), 2);
    }

    #[test]
    fn kernel_dims() {
        assert_eq!(koszul_kernel_dim(&v(&[1, 0]), 1, 2).unwrap(), 1);
        assert_eq!(koszul_kernel_dim(&v(&[2, -1, 3]), 2, 3).unwrap(), 2);
        assert_eq!(koszul_kernel_dim(&v(&[1, 0]), 0, 2).unwrap(), 0);
        assert_eq!(koszul_kernel_dim(&v(&[0, 0]), 1, 2), Err(Error::ZeroCovector));
    }

    #[test]
    fn oracle_small_cases() {
        let k = KoszulHbarComplex::monomial(v(&[1, 0]), 1).unwrap();
        k.check().unwrap();
        assert_eq!(oracle_cohomology(&k, 0).unwrap(), CohomologyModule::zero());
        assert_eq!(oracle_cohomology(&k, 1).unwrap(), CohomologyModule::new(0, [(1, 1)]));
        assert_eq!(oracle_cohomology(&k, 2).unwrap(), CohomologyModule::new(0, [(1, 1)]));
    }

    #[test]
    fn zero_series_gives_free_modules() {
        let k = KoszulHbarComplex::new(3, BTreeMap::new()).unwrap();
        for j in 0..=3 {
            assert_eq!(oracle_cohomology(&k, j).unwrap(), CohomologyModule::free(binom(3, j)));
        }
    }

    #[test]
    fn wedge_matrix_matches_wedge() {
        let l = v(&[1, 2, -1]);
        let m = wedge_matrix(&l, 1);
        let lv = MultiVector::vector(&l);
        for (c, mask) in basis(3, 1).into_iter().enumerate() {
            let i = mask.trailing_zeros() as usize;
            let w = wedge(&lv, &MultiVector::basis_element(3, &[i])).to_coords();
            assert_eq!(m.column(c), w);
        }
    }
}
