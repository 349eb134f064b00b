//! Integer lattice tools: unimodular column reduction, integer kernels and
//! the symplectic divisors of an alternating integer form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn int_matrix(rows: &[&[i64]]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Result of reducing `A` by unimodular column operations: `A·U = [B | 0]`
/// where the first `rank` columns of `B` are in column echelon form.
#[derive(Clone, Debug)]
pub struct ColumnReduction {
    pub reduced: IntMatrix,
    pub transform: IntMatrix,
    pub rank: usize,
}

impl ColumnReduction {
    /// Columns of `U` spanning the integer kernel of `A` (a saturated sublattice).
    pub fn kernel(&self) -> Vec<Vec<BigInt>> {
        let n = self.transform.len();
        (self.rank..n).map(|j| self.transform.iter().map(|row| row[j].clone()).collect()).collect()
    }

    /// Columns of `U` completing the kernel to a basis of `ℤⁿ`.
    pub fn complement(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank).map(|j| self.transform.iter().map(|row| row[j].clone()).collect()).collect()
    }
}

/// Column-reduces an `m × n` integer matrix with extended-gcd steps.
pub fn column_reduce(a: &IntMatrix, n: usize) -> ColumnReduction {
    let mut a = a.clone();
    let mut u = identity(n);
    let m = a.len();
    let mut c = 0;
    for i in 0..m {
        if c == n {
            break;
        }
        // Fold every entry a[i][j], j > c, into column c.
        for j in c + 1..n {
            if a[i][j].is_zero() {
                continue;
            }
            let x = a[i][c].clone();
            let y = a[i][j].clone();
            let eg = x.extended_gcd(&y);
            let (g, s, t) = (eg.gcd, eg.x, eg.y);
            // [col_c, col_j] ← [s·col_c + t·col_j, −(y/g)·col_c + (x/g)·col_j]
            let (p, q) = (-(&y / &g), &x / &g);
            combine_columns(&mut a, c, j, &s, &t, &p, &q);
            combine_columns(&mut u, c, j, &s, &t, &p, &q);
        }
        if a[i][c].is_negative() {
            negate_column(&mut a, c);
            negate_column(&mut u, c);
        }
        if !a[i][c].is_zero() {
            c += 1;
        }
    }
    ColumnReduction { reduced: a, transform: u, rank: c }
}

fn combine_columns(m: &mut IntMatrix, c: usize, j: usize, s: &BigInt, t: &BigInt, p: &BigInt, q: &BigInt) {
    for row in m.iter_mut() {
        let (x, y) = (row[c].clone(), row[j].clone());
        row[c] = s * &x + t * &y;
        row[j] = p * &x + q * &y;
    }
}

fn negate_column(m: &mut IntMatrix, c: usize) {
    for row in m.iter_mut() {
        row[c] = -row[c].clone();
    }
}

/// Basis of `{x ∈ ℤⁿ : A·x = 0}`.
pub fn integer_kernel(a: &IntMatrix, n: usize) -> Vec<Vec<BigInt>> {
    column_reduce(a, n).kernel()
}

/// Diagonal of the Smith normal form of an integer matrix (nonzero entries, positive).
pub fn integer_smith_diagonal(a: &IntMatrix) -> Vec<BigInt> {
    let mut a = a.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.as_ref().is_none_or(|(v, _, _)| a[i][j].abs() < *v) {
                    best = Some((a[i][j].abs(), i, j));
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let pivot = a[t][t].clone();
        let mut dirty = false;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&pivot);
            if !q.is_zero() {
                for j in t..cols {
                    let v = &a[t][j] * &q;
                    a[i][j] -= v;
                }
            }
            dirty |= !a[i][t].is_zero();
        }
        for j in t + 1..cols {
            let q = a[t][j].div_floor(&pivot);
            if !q.is_zero() {
                for i in t..rows {
                    let v = &a[i][t] * &q;
                    a[i][j] -= v;
                }
            }
            dirty |= !a[t][j].is_zero();
        }
        if dirty {
            continue;
        }
        let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&pivot)));
        if let Some(i) = offender {
            for j in t..cols {
                let v = a[i][j].clone();
                a[t][j] += v;
            }
            continue;
        }
        out.push(pivot.abs());
        t += 1;
    }
    out
}

/// Elementary divisors `d₁ | … | d_m` of the Frobenius normal form of a
/// nondegenerate alternating integer matrix of size `2m`.
pub fn integer_alternating_divisors(e: &IntMatrix) -> Result<Vec<BigInt>> {
    let n = e.len();
    if e.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch("alternating form must be square".into()));
    }
    if n % 2 == 1 {
        return Err(Error::OddSize(n));
    }
    for i in 0..n {
        for j in 0..n {
            if e[i][j] != -e[j][i].clone() {
                return Err(Error::NotAlternating(format!("entries ({i},{j}) and ({j},{i})")));
            }
        }
    }
    let diag = integer_smith_diagonal(e);
    if diag.len() < n {
        return Err(Error::DegenerateForm);
    }
    // The Smith diagonal of an alternating form is d₁, d₁, d₂, d₂, …
    Ok(diag.into_iter().step_by(2).collect())
}
