//! Spectral sequence of a decreasing filtration on a finite-dimensional
//! cochain complex over `ℚ(i)`.
//!
//! Spots are indexed by `(p, q)` with total degree `n = p + q`. Pages are
//! computed from the groups `A_p^r = {x ∈ F_p : dx ∈ F_{p+r}}` as
//! `E_p^r = A_p^r / (d A_{p−r+1}^{r−1} + A_{p+1}^{r−1})`.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{span_basis, CohomologyModule, GaussRat, HbarPolyMatrix, Matrix};

type Vector = Vec<GaussRat>;

/// Cochain complex `C^start → … → C^{start+len−1}` with a filtration level per basis vector.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    start: i64,
    dims: Vec<usize>,
    /// `differentials[i]` maps degree `start + i` to `start + i + 1`.
    differentials: Vec<Matrix>,
    levels: Vec<Vec<usize>>,
    truncation: Option<usize>,
}

impl FilteredComplex {
    /// `differentials` has one fewer entry than `levels` (the top map is zero).
    pub fn new(start: i64, levels: Vec<Vec<usize>>, differentials: Vec<Matrix>) -> Result<Self> {
        let dims: Vec<usize> = levels.iter().map(Vec::len).collect();
        if differentials.len() + 1 != dims.len().max(1) {
            return Err(Error::InvalidComplex(format!(
                "{} degrees need {} differentials, got {}",
                dims.len(),
                dims.len().saturating_sub(1),
                differentials.len()
            )));
        }
        for (i, d) in differentials.iter().enumerate() {
            if d.rows() != dims[i + 1] || d.cols() != dims[i] {
                return Err(Error::InvalidComplex(format!(
                    "d^{} is {}x{}, expected {}x{}",
                    start + i as i64,
                    d.rows(),
                    d.cols(),
                    dims[i + 1],
                    dims[i]
                )));
            }
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    if !d[(r, c)].is_zero() && levels[i + 1][r] < levels[i][c] {
                        return Err(Error::InvalidComplex(format!(
                            "d^{} lowers the filtration at column {c}",
                            start + i as i64
                        )));
                    }
                }
            }
        }
        for (i, pair) in differentials.windows(2).enumerate() {
            if !pair[1].mul(&pair[0])?.is_zero() {
                return Err(Error::InvalidComplex(format!("d∘d ≠ 0 starting in degree {}", start + i as i64)));
            }
        }
        Ok(FilteredComplex { start, dims, differentials, levels, truncation: None })
    }

    /// Reduction modulo `ħ^n` of a complex of free `ℚ(i)[ħ]`-modules, filtered by powers of `ħ`.
    /// The basis vector `e_i ħ^a` sits at index `i·n + a` and level `a`.
    pub fn from_hbar_complex(start: i64, ranks: &[usize], differentials: &[HbarPolyMatrix], n: usize) -> Result<Self> {
        let levels = ranks.iter().map(|&r| (0..r * n).map(|i| i % n).collect()).collect();
        let ds = differentials.iter().map(|d| d.truncated_linear_map(n)).collect();
        let mut c = FilteredComplex::new(start, levels, ds)?;
        c.truncation = Some(n);
        Ok(c)
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn degrees(&self) -> std::ops::Range<i64> {
        self.start..self.start + self.dims.len() as i64
    }

    pub fn dim(&self, n: i64) -> usize {
        self.index(n).map_or(0, |i| self.dims[i])
    }

    pub fn level(&self, n: i64, basis: usize) -> usize {
        self.levels[self.index(n).expect("degree in range")][basis]
    }

    /// One more than the largest filtration level.
    pub fn width(&self) -> usize {
        self.levels.iter().flatten().map(|&l| l + 1).max().unwrap_or(0)
    }

    pub fn truncation(&self) -> Option<usize> {
        self.truncation
    }

    /// `d^n`, or `None` when it is the zero map between degrees out of range.
    pub fn differential(&self, n: i64) -> Option<&Matrix> {
        let i = self.index(n)?;
        self.differentials.get(i)
    }

    fn index(&self, n: i64) -> Option<usize> {
        let i = n - self.start;
        (i >= 0 && (i as usize) < self.dims.len()).then_some(i as usize)
    }

    fn apply(&self, n: i64, x: &[GaussRat]) -> Vector {
        match self.differential(n) {
            Some(d) => d.mul_vec(x).expect("dimensions checked"),
            None => vec![GaussRat::zero(); self.dim(n + 1)],
        }
    }

    /// Filtration levels raised by `a` and degrees moved by `b`.
    pub fn shifted(&self, a: usize, b: i64) -> FilteredComplex {
        let mut c = self.clone();
        c.start += b;
        for l in c.levels.iter_mut().flatten() {
            *l += a;
        }
        c.truncation = self.truncation.map(|n| n + a);
        c
    }

    /// Direct sum of `m` copies (tensor with a trivial multiplicity space).
    pub fn with_multiplicity(&self, m: usize) -> FilteredComplex {
        let levels = self.levels.iter().map(|l| l.iter().copied().cycle().take(l.len() * m).collect()).collect();
        let differentials = self
            .differentials
            .iter()
            .map(|d| (1..m).fold(if m == 0 { Matrix::zeros(0, 0) } else { d.clone() }, |acc, _| acc.direct_sum(d)))
            .collect();
        let mut c = FilteredComplex::new(self.start, levels, differentials).expect("direct sum of a valid complex");
        c.truncation = self.truncation;
        c
    }

    /// `dim H^n` of the total complex.
    pub fn cohomology_dim(&self, n: i64) -> usize {
        let kernel = self.dim(n) - self.differential(n).map_or(0, Matrix::rank);
        kernel - self.differential(n - 1).map_or(0, Matrix::rank)
    }
}

/// One spot of a page: its dimension and representatives in `C^{p+q}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpotEntry {
    pub dim: usize,
    pub representatives: Vec<Vector>,
    pub truncation_affected: bool,
}

#[derive(Clone, Debug)]
pub struct SpectralPage {
    pub r: usize,
    /// Keyed by `(p, q)`; only spots with `0 ≤ p < width` and a nonzero cochain space appear.
    pub entries: BTreeMap<(i64, i64), SpotEntry>,
    /// `d_r` out of `(p, q)` into `(p + r, q − r + 1)`, in representative coordinates.
    pub differentials: BTreeMap<(i64, i64), Matrix>,
}

impl SpectralPage {
    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.entries.get(&(p, q)).map_or(0, |e| e.dim)
    }

    pub fn has_nonzero_differential(&self) -> bool {
        self.differentials.values().any(|m| !m.is_zero())
    }

    pub fn dims(&self) -> PageDims {
        PageDims {
            r: self.r,
            spots: self
                .entries
                .iter()
                .filter(|(_, e)| e.dim > 0)
                .map(|(&(p, q), e)| SpotDim { p, q, dim: e.dim, truncation_affected: e.truncation_affected })
                .collect(),
        }
    }
}

/// Serializable dimension table of a page.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageDims {
    pub r: usize,
    pub spots: Vec<SpotDim>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpotDim {
    pub p: i64,
    pub q: i64,
    pub dim: usize,
    pub truncation_affected: bool,
}

/// Page computation with memoized `A_p^r` groups.
pub struct SpectralSequence<'a> {
    complex: &'a FilteredComplex,
    cycles: HashMap<(i64, i64, i64), Rc<Vec<Vector>>>,
    spots: HashMap<(i64, i64, i64), Rc<Spot>>,
}

struct Spot {
    denominator: Vec<Vector>,
    representatives: Vec<Vector>,
}

impl<'a> SpectralSequence<'a> {
    pub fn new(complex: &'a FilteredComplex) -> Self {
        SpectralSequence { complex, cycles: HashMap::new(), spots: HashMap::new() }
    }

    fn unit(dim: usize, i: usize) -> Vector {
        let mut v = vec![GaussRat::zero(); dim];
        v[i] = GaussRat::one();
        v
    }

    /// `A_p^r` in degree `n`.
    fn cycles(&mut self, n: i64, p: i64, r: i64) -> Rc<Vec<Vector>> {
        // Only the column threshold `p` and the row threshold `p + r`, each
        // clamped to `0..=width`, matter; normalizing shares work across pages.
        let c = self.complex;
        let width = c.width() as i64;
        let top = p + r.max(0);
        let p = p.clamp(0, width);
        let r = top.clamp(p, width) - p;
        if let Some(a) = self.cycles.get(&(n, p, r)) {
            return a.clone();
        }
        let dim = c.dim(n);
        let cols: Vec<usize> = (0..dim).filter(|&i| c.level(n, i) as i64 >= p).collect();
        let out: Vec<Vector> = if cols.is_empty() {
            Vec::new()
        } else {
            let rows: Vec<usize> = match c.differential(n) {
                Some(_) => (0..c.dim(n + 1)).filter(|&i| (c.level(n + 1, i) as i64) < p + r).collect(),
                None => Vec::new(),
            };
            if rows.is_empty() {
                cols.iter().map(|&i| Self::unit(dim, i)).collect()
            } else {
                let sub = c.differential(n).expect("rows nonempty").select(&rows, &cols);
                sub.kernel_basis()
                    .into_iter()
                    .map(|k| {
                        let mut v = vec![GaussRat::zero(); dim];
                        for (x, &i) in k.into_iter().zip(&cols) {
                            v[i] = x;
                        }
                        v
                    })
                    .collect()
            }
        };
        let out = Rc::new(out);
        self.cycles.insert((n, p, r), out.clone());
        out
    }

    fn spot(&mut self, n: i64, p: i64, r: i64) -> Rc<Spot> {
        if let Some(s) = self.spots.get(&(n, p, r)) {
            return s.clone();
        }
        let dim = self.complex.dim(n);
        let a = self.cycles(n, p, r);
        let mut den: Vec<Vector> = self.cycles(n - 1, p - r + 1, r - 1).iter().map(|x| self.complex.apply(n - 1, x)).collect();
        den.extend(self.cycles(n, p + 1, r - 1).iter().cloned());
        let denominator = span_basis(dim, &den);
        let mut representatives = Vec::new();
        if !a.is_empty() {
            let mut cols = denominator.clone();
            cols.extend(a.iter().cloned());
            let (_, pivots) = Matrix::from_columns(dim, &cols).rref();
            representatives = pivots.iter().filter(|&&j| j >= denominator.len()).map(|&j| cols[j].clone()).collect();
        }
        let s = Rc::new(Spot { denominator, representatives });
        self.spots.insert((n, p, r), s.clone());
        s
    }

    /// Coordinates of each `y` on the representatives of spot `(n, p)` on page `r`.
    /// One elimination over `[denominator | representatives | ys]` serves every `y`.
    fn project(&mut self, n: i64, p: i64, r: i64, ys: &[Vector]) -> Result<Vec<Vector>> {
        let s = self.spot(n, p, r);
        let (lo, k) = (s.denominator.len(), s.denominator.len() + s.representatives.len());
        let outside = || Error::InvalidComplex(format!("image outside A at degree {n}, level {p}"));
        if ys.is_empty() {
            return Ok(Vec::new());
        }
        if k == 0 {
            return if ys.iter().flatten().all(Zero::is_zero) { Ok(vec![Vec::new(); ys.len()]) } else { Err(outside()) };
        }
        let mut cols = s.denominator.clone();
        cols.extend(s.representatives.iter().cloned());
        cols.extend(ys.iter().cloned());
        let (m, pivots) = Matrix::from_columns(self.complex.dim(n), &cols).rref();
        if pivots.len() != k || pivots.iter().enumerate().any(|(i, &j)| i != j) {
            return Err(outside());
        }
        Ok((0..ys.len()).map(|y| (lo..k).map(|i| m[(i, k + y)].clone()).collect()).collect())
    }

    /// Matrix of `d_r` out of spot `(p, q)`, checked for independence of the lift.
    pub fn d_r_map(&mut self, r: usize, p: i64, q: i64) -> Result<Matrix> {
        let (n, ri) = (p + q, r as i64);
        let source = self.spot(n, p, ri);
        let target = self.spot(n + 1, p + ri, ri);
        let mut images: Vec<Vector> = source.representatives.iter().map(|x| self.complex.apply(n, x)).collect();
        let reps = images.len();
        if !source.denominator.is_empty() {
            let shift = source.denominator.iter().fold(vec![GaussRat::zero(); self.complex.dim(n)], |acc, v| {
                acc.iter().zip(v).map(|(a, b)| a + b).collect()
            });
            for x in &source.representatives {
                let other: Vector = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
                images.push(self.complex.apply(n, &other));
            }
        }
        let coords = self.project(n + 1, p + ri, ri, &images)?;
        let (cols, lifted) = coords.split_at(reps);
        if !lifted.is_empty() && lifted != cols {
            return Err(Error::InvalidComplex(format!("d_{r} depends on the lift at ({p}, {q})")));
        }
        Ok(Matrix::from_columns(target.representatives.len(), cols))
    }

    pub fn page(&mut self, r: usize) -> Result<SpectralPage> {
        let c = self.complex;
        let width = c.width() as i64;
        let mut entries = BTreeMap::new();
        let mut differentials = BTreeMap::new();
        for n in c.degrees() {
            for p in 0..width {
                let s = self.spot(n, p, r as i64);
                let truncation_affected = c.truncation().is_some_and(|t| p + 1 >= t as i64);
                entries.insert(
                    (p, n - p),
                    SpotEntry { dim: s.representatives.len(), representatives: s.representatives.clone(), truncation_affected },
                );
            }
        }
        for (&(p, q), e) in &entries {
            if e.dim > 0 {
                differentials.insert((p, q), self.d_r_map(r, p, q)?);
            }
        }
        Ok(SpectralPage { r, entries, differentials })
    }
}

pub fn page(c: &FilteredComplex, r: usize) -> Result<SpectralPage> {
    SpectralSequence::new(c).page(r)
}

pub fn d_r_map(c: &FilteredComplex, r: usize, p: i64, q: i64) -> Result<Matrix> {
    SpectralSequence::new(c).d_r_map(r, p, q)
}

/// Result of running a spectral sequence to its limit.
#[derive(Clone, Debug)]
pub struct Convergence {
    pub pages: Vec<SpectralPage>,
    /// First page from which every differential vanishes (at least 1).
    pub degeneration_page: usize,
    /// Per total degree, `dim E_∞^{p, n−p}` for `p = 0..width`.
    pub graded: BTreeMap<i64, Vec<usize>>,
}

impl Convergence {
    pub fn stable(&self) -> &SpectralPage {
        self.pages.last().expect("at least one page")
    }
}

/// Runs pages `0..=width + 1`; beyond the filtration width nothing changes.
pub fn e_infinity(c: &FilteredComplex) -> Result<Convergence> {
    let mut ss = SpectralSequence::new(c);
    let width = c.width();
    let mut pages = Vec::with_capacity(width + 2);
    let mut last_nonzero = None;
    for r in 0..=width + 1 {
        let page = ss.page(r)?;
        if page.has_nonzero_differential() {
            last_nonzero = Some(r);
        }
        pages.push(page);
    }
    let degeneration_page = last_nonzero.map_or(1, |r| (r + 1).max(1));
    let stable = pages.last().expect("nonempty");
    let graded = c.degrees().map(|n| (n, (0..width as i64).map(|p| stable.dim(p, n - p)).collect())).collect();
    Ok(Convergence { pages, degeneration_page, graded })
}

/// Graded dimensions of `M/ħ^n M` for the `ħ`-adic filtration.
pub fn module_graded_dims(m: &CohomologyModule, n: usize) -> Vec<usize> {
    (0..n).map(|p| m.free_rank() + m.torsion().filter(|&(a, _)| a as usize > p).map(|(_, k)| k).sum::<usize>()).collect()
}

/// Graded dimensions contributed by `Tor(M, ℂ[ħ]/ħ^n)` (levels `n − a .. n`).
pub fn tor_graded_dims(m: &CohomologyModule, n: usize) -> Vec<usize> {
    (0..n).map(|p| m.torsion().filter(|&(a, _)| p + (a as usize).min(n) >= n).map(|(_, k)| k).sum()).collect()
}

/// Recovers `ℂ[[ħ]]`-modules from the `E_∞` table of a complex truncated at
/// `ħ^n`, peeling off the `Tor` contribution of the next degree from the top down.
/// Torsion exponents are assumed to be `< n`; level `n − 1` is read as free.
/// Missing levels count as zero.
pub fn reconstruct_modules(graded: &BTreeMap<i64, Vec<usize>>, n: usize) -> Result<BTreeMap<i64, CohomologyModule>> {
    let mut out: BTreeMap<i64, CohomologyModule> = BTreeMap::new();
    for (&deg, dims) in graded.iter().rev() {
        let dims: Vec<usize> = (0..n.max(dims.len())).map(|p| dims.get(p).copied().unwrap_or(0)).collect();
        let tor = out.get(&(deg + 1)).map(|m| tor_graded_dims(m, n)).unwrap_or_else(|| vec![0; n]);
        let rest: Vec<usize> = dims[..n]
            .iter()
            .zip(&tor)
            .map(|(&d, &t)| d.checked_sub(t))
            .collect::<Option<_>>()
            .ok_or_else(|| Error::Invalid(format!("degree {deg}: Tor part exceeds E_∞")))?;
        if rest.windows(2).any(|w| w[1] > w[0]) || dims[n..].iter().any(|&d| d != 0) {
            return Err(Error::Invalid(format!("degree {deg}: graded dimensions {rest:?} are not of module shape")));
        }
        let free = rest.last().copied().unwrap_or(0);
        let torsion = (1..n).map(|a| (a as u32, rest[a - 1] - rest[a]));
        out.insert(deg, CohomologyModule::new(free, torsion));
    }
    Ok(out)
}
