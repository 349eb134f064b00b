//! Complex tori `V/Λ`, Hermitian forms with integral imaginary part on `Λ`,
//! semicharacters, and the degeneracy subtorus of a form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{
    binom, column_reduce, format_rational, integer_alternating_divisors, rat_int, reduce_mod, span_rank, GaussRat,
    IntMatrix, Matrix, Rational,
};

/// Integer coordinates of a lattice element with respect to the generators.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn zero(rank: usize) -> Self {
        LatticePoint(vec![0; rank])
    }

    pub fn generator(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticePoint(v)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn add(&self, o: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| -a).collect())
    }
}

/// Sum of a slice of lattice points of the given rank.
pub fn lattice_sum(rank: usize, points: &[LatticePoint]) -> LatticePoint {
    points.iter().fold(LatticePoint::zero(rank), |acc, p| acc.add(p))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PeriodLattice {
    g: usize,
    generators: Vec<Vec<GaussRat>>,
}

impl PeriodLattice {
    /// Requires `2g` generators in `ℚ(i)^g` spanning `V` over `ℝ`.
    pub fn new(g: usize, generators: Vec<Vec<GaussRat>>) -> Result<Self> {
        if generators.len() != 2 * g || generators.iter().any(|v| v.len() != g) {
            return Err(Error::DimensionMismatch(format!("lattice for g = {g} needs {} generators of length {g}", 2 * g)));
        }
        let lattice = PeriodLattice { g, generators };
        if lattice.real_rank() != 2 * g {
            return Err(Error::Invalid("lattice generators are not ℝ-linearly independent".into()));
        }
        Ok(lattice)
    }

    /// `e₁, …, e_g, i·e₁, …, i·e_g`.
    pub fn standard(g: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * g);
        for unit in [GaussRat::int(1), GaussRat::i()] {
            for k in 0..g {
                let mut v = vec![GaussRat::zero(); g];
                v[k] = unit.clone();
                gens.push(v);
            }
        }
        PeriodLattice { g, generators: gens }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn rank(&self) -> usize {
        2 * self.g
    }

    pub fn generators(&self) -> &[Vec<GaussRat>] {
        &self.generators
    }

    fn real_rank(&self) -> usize {
        let cols: Vec<Vec<GaussRat>> = self
            .generators
            .iter()
            .map(|v| v.iter().flat_map(|c| [GaussRat::real(c.re.clone()), GaussRat::real(c.im.clone())]).collect())
            .collect();
        span_rank(2 * self.g, &cols)
    }

    /// The vector `Σ nᵢ λᵢ ∈ V`.
    pub fn vector(&self, p: &LatticePoint) -> Vec<GaussRat> {
        let mut out = vec![GaussRat::zero(); self.g];
        for (n, gen) in p.0.iter().zip(&self.generators) {
            if *n == 0 {
                continue;
            }
            let n = GaussRat::int(*n);
            for (o, c) in out.iter_mut().zip(gen) {
                *o += &(c * &n);
            }
        }
        out
    }

    /// Generators `λ'_j = Σ_i u_{ij} λ_i` for a unimodular `u`.
    pub fn change_basis(&self, u: &[Vec<i64>]) -> Result<Self> {
        let n = self.rank();
        if u.len() != n || u.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch("basis change must be square of size 2g".into()));
        }
        let gens = (0..n).map(|j| self.vector(&LatticePoint((0..n).map(|i| u[i][j]).collect()))).collect();
        PeriodLattice::new(self.g, gens)
    }
}

/// Hermitian form `H(v, w) = vᵀ·M·w̄`, linear in the first argument.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HermitianNS {
    matrix: Matrix,
}

impl HermitianNS {
    pub fn new(matrix: Matrix) -> Self {
        HermitianNS { matrix }
    }

    pub fn zero(g: usize) -> Self {
        HermitianNS { matrix: Matrix::zeros(g, g) }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn form(&self, v: &[GaussRat], w: &[GaussRat]) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                let m = &self.matrix[(i, j)];
                if !m.is_zero() && !wj.is_zero() {
                    acc += &(&(vi * m) * &wj.conj());
                }
            }
        }
        acc
    }

    /// `M·w̄`, the coefficient vector of the linear form `v ↦ H(v, w)`.
    pub fn linear_part(&self, w: &[GaussRat]) -> Vec<GaussRat> {
        let wbar: Vec<GaussRat> = w.iter().map(GaussRat::conj).collect();
        self.matrix.mul_vec(&wbar).expect("shape checked at validation")
    }

    pub fn is_hermitian(&self) -> bool {
        self.matrix.rows() == self.matrix.cols() && self.matrix.conj_transpose() == self.matrix
    }

    /// `E(λᵢ, λⱼ) = Im H(λᵢ, λⱼ)` on the generators.
    pub fn imaginary_form(&self, lattice: &PeriodLattice) -> Vec<Vec<Rational>> {
        let gens = lattice.generators();
        gens.iter().map(|a| gens.iter().map(|b| self.form(a, b).im).collect()).collect()
    }

    /// The imaginary form as an integer matrix; `None` when some entry is not integral.
    pub fn integral_form(&self, lattice: &PeriodLattice) -> Option<IntMatrix> {
        self.imaginary_form(lattice)
            .into_iter()
            .map(|row| row.into_iter().map(|x| x.is_integer().then(|| x.to_integer())).collect())
            .collect()
    }
}

/// `χ(λᵢ) = exp(iπ rᵢ)` on the generators, extended by
/// `χ(Σ nᵢλᵢ) = Π χ(λᵢ)^{nᵢ} · exp(iπ Σ_{i<j} nᵢnⱼ E(λᵢ, λⱼ))`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Semicharacter {
    phases: Vec<Rational>,
}

impl Semicharacter {
    pub fn new(phases: Vec<Rational>) -> Self {
        Semicharacter { phases: phases.iter().map(|r| reduce_mod(r, 2).0).collect() }
    }

    pub fn trivial(rank: usize) -> Self {
        Semicharacter { phases: vec![Rational::zero(); rank] }
    }

    pub fn phases(&self) -> &[Rational] {
        &self.phases
    }

    pub fn is_trivial(&self) -> bool {
        self.phases.iter().all(Zero::is_zero)
    }

    /// Phase `r` in `[0, 2)` with `χ(λ) = exp(iπ r)`.
    pub fn phase(&self, e: &IntMatrix, p: &LatticePoint) -> Rational {
        let n = &p.0;
        let mut acc = Rational::zero();
        for (i, ni) in n.iter().enumerate() {
            if *ni == 0 {
                continue;
            }
            acc += &self.phases[i] * rat_int(*ni);
            for (j, nj) in n.iter().enumerate().skip(i + 1) {
                if *nj != 0 {
                    acc += Rational::from_integer(&e[i][j] * BigInt::from(ni * nj));
                }
            }
        }
        reduce_mod(&acc, 2).0
    }

    /// Phases on the generators `λ'_j = Σ_i u_{ij} λ_i`.
    pub fn change_basis(&self, e: &IntMatrix, u: &[Vec<i64>]) -> Semicharacter {
        let n = self.phases.len();
        Semicharacter::new((0..n).map(|j| self.phase(e, &LatticePoint((0..n).map(|i| u[i][j]).collect()))).collect())
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassicalAHData {
    pub h: HermitianNS,
    pub chi: Semicharacter,
}

/// A named violation of an input invariant.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub detail: String,
}

impl Violation {
    pub fn new(name: &str, detail: impl Into<String>) -> Self {
        Violation { name: name.to_string(), detail: detail.into() }
    }
}

pub const SHAPE: &str = "shape";
pub const HERMITIAN_SYMMETRY: &str = "Hermitian symmetry";
pub const INTEGRALITY: &str = "integrality of Im H on the lattice";

/// Lists every violated invariant; an empty list means the data is valid.
pub fn validate(ah: &ClassicalAHData, lattice: &PeriodLattice) -> Vec<Violation> {
    let g = lattice.g();
    let mut out = Vec::new();
    let m = ah.h.matrix();
    if m.rows() != g || m.cols() != g {
        out.push(Violation::new(SHAPE, format!("H is {}x{}, expected {g}x{g}", m.rows(), m.cols())));
        return out;
    }
    if ah.chi.phases().len() != 2 * g {
        out.push(Violation::new(SHAPE, format!("{} semicharacter phases, expected {}", ah.chi.phases().len(), 2 * g)));
    }
    for i in 0..g {
        for j in i..g {
            if m[(i, j)] != m[(j, i)].conj() {
                out.push(Violation::new(
                    HERMITIAN_SYMMETRY,
                    format!("H[{i}][{j}] = {} but conj(H[{j}][{i}]) = {}", m[(i, j)], m[(j, i)].conj()),
                ));
            }
        }
    }
    let e = ah.h.imaginary_form(lattice);
    for i in 0..2 * g {
        for j in i + 1..2 * g {
            if !e[i][j].is_integer() {
                out.push(Violation::new(
                    INTEGRALITY,
                    format!("E(λ{}, λ{}) = {}", i + 1, j + 1, format_rational(&e[i][j])),
                ));
            }
        }
    }
    out
}

fn require_valid(ah: &ClassicalAHData, lattice: &PeriodLattice) -> Result<IntMatrix> {
    if let Some(v) = validate(ah, lattice).into_iter().next() {
        return Err(Error::Invalid(format!("{}: {}", v.name, v.detail)));
    }
    Ok(ah.h.integral_form(lattice).expect("validated integrality"))
}

/// The kernel `V_{H,0}` of `H`, a complement, and the lattice `Λ ∩ V_{H,0}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DegeneracyData {
    pub v0_basis: Vec<Vec<GaussRat>>,
    pub complement_basis: Vec<Vec<GaussRat>>,
    /// `g₀ × g` matrix of the projection `V → V_{H,0}` along the complement,
    /// in coordinates of `v0_basis`.
    pub s_matrix: Matrix,
    pub lambda0_basis: Vec<LatticePoint>,
    /// Lattice points completing `lambda0_basis` to a basis of `Λ`.
    pub quotient_lattice_basis: Vec<LatticePoint>,
    /// Images of `quotient_lattice_basis` in `V/V_{H,0}`, in complement coordinates.
    pub quotient_coords: Vec<Vec<GaussRat>>,
}

impl DegeneracyData {
    pub fn g0(&self) -> usize {
        self.v0_basis.len()
    }
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Invalid("lattice coordinate exceeds 64 bits".into()))
}

/// Computes `V_{H,0} = ker Hᵀ` and `Λ ∩ V_{H,0}`. The complement is built
/// from standard basis vectors by echelon order unless one is supplied.
pub fn degeneracy_subtorus_with(
    h: &HermitianNS,
    lattice: &PeriodLattice,
    complement: Option<Vec<Vec<GaussRat>>>,
) -> Result<DegeneracyData> {
    let g = lattice.g();
    let v0 = h.matrix().transpose().kernel_basis();
    let complement = match complement {
        Some(c) => {
            let mut all = v0.clone();
            all.extend(c.iter().cloned());
            if c.len() + v0.len() != g || span_rank(g, &all) != g {
                return Err(Error::Invalid("supplied complement does not complete ker H".into()));
            }
            c
        }
        None => {
            let mut chosen: Vec<Vec<GaussRat>> = Vec::new();
            for i in 0..g {
                let mut e = vec![GaussRat::zero(); g];
                e[i] = GaussRat::int(1);
                let mut trial = v0.clone();
                trial.extend(chosen.iter().cloned());
                trial.push(e.clone());
                if span_rank(g, &trial) == trial.len() {
                    chosen.push(e);
                }
            }
            chosen
        }
    };

    let mut cols = v0.clone();
    cols.extend(complement.iter().cloned());
    let change = Matrix::from_columns(g, &cols).inverse()?;
    let g0 = v0.len();
    let s_matrix = change.select(&(0..g0).collect::<Vec<_>>(), &(0..g).collect::<Vec<_>>());

    // Σ nᵢ Hᵀλᵢ = 0, split into real and imaginary rows and cleared of denominators.
    let ht = h.matrix().transpose();
    let images: Vec<Vec<GaussRat>> = lattice.generators().iter().map(|v| ht.mul_vec(v)).collect::<Result<_>>()?;
    let n = lattice.rank();
    let mut rows: IntMatrix = Vec::new();
    for k in 0..g {
        for part in 0..2 {
            let row: Vec<Rational> =
                images.iter().map(|img| if part == 0 { img[k].re.clone() } else { img[k].im.clone() }).collect();
            let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            rows.push(row.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect());
        }
    }
    let red = column_reduce(&rows, n);
    let kernel = red.kernel();
    if kernel.len() != 2 * g0 {
        return Err(Error::SubtorusFailure { lattice_rank: kernel.len(), expected: 2 * g0 });
    }
    let to_point = |v: &Vec<BigInt>| -> Result<LatticePoint> { Ok(LatticePoint(v.iter().map(to_i64).collect::<Result<_>>()?)) };
    let lambda0_basis = kernel.iter().map(to_point).collect::<Result<Vec<_>>>()?;
    let quotient_lattice_basis = red.complement().iter().map(to_point).collect::<Result<Vec<_>>>()?;
    let quotient_coords = quotient_lattice_basis
        .iter()
        .map(|p| {
            let c = change.mul_vec(&lattice.vector(p))?;
            Ok(c[g0..].to_vec())
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DegeneracyData { v0_basis: v0, complement_basis: complement, s_matrix, lambda0_basis, quotient_lattice_basis, quotient_coords })
}

pub fn degeneracy_subtorus(h: &HermitianNS, lattice: &PeriodLattice) -> Result<DegeneracyData> {
    degeneracy_subtorus_with(h, lattice, None)
}

/// Pullback of `l ∈ V̄^∨` to `V_{H,0}`: `l⁰ᵢ = ⟨l, bᵢ⟩ = Σ_k l_k·conj(bᵢ_k)`.
pub fn restrict_covector(l: &[GaussRat], d: &DegeneracyData) -> Vec<GaussRat> {
    d.v0_basis.iter().map(|b| pairing(l, b)).collect()
}

/// `⟨l, v⟩ = Σ lᵢ v̄ᵢ`.
pub fn pairing(l: &[GaussRat], v: &[GaussRat]) -> GaussRat {
    let mut acc = GaussRat::zero();
    for (a, b) in l.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc += &(a * &b.conj());
        }
    }
    acc
}

/// Inertia `(positive, negative, zero)` of a Hermitian matrix, by symmetric pivoting.
pub fn hermitian_inertia(m: &Matrix) -> (usize, usize, usize) {
    let mut a = m.clone();
    let (mut pos, mut neg) = (0, 0);
    let total = a.rows();
    loop {
        let n = a.rows();
        if n == 0 {
            break;
        }
        let pivot = match (0..n).find(|&i| !a[(i, i)].is_zero()) {
            Some(i) => i,
            None => {
                let Some((i, j)) = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).find(|&(i, j)| !a[(i, j)].is_zero())
                else {
                    break;
                };
                // Replace eᵢ by eᵢ + c·eⱼ with c ∈ {1, i} so that H(v, v) ≠ 0.
                let c = if !a[(i, j)].re.is_zero() { GaussRat::int(1) } else { GaussRat::i() };
                let mut b = a.clone();
                for k in 0..n {
                    let v = &a[(i, k)] + &(&c * &a[(j, k)]);
                    b[(i, k)] = v.clone();
                    b[(k, i)] = v.conj();
                }
                let cc = c.conj();
                let diag = &(&a[(i, i)] + &(&(&c * &cc) * &a[(j, j)])) + &(&(&cc * &a[(i, j)]) + &(&c * &a[(j, i)]));
                b[(i, i)] = diag;
                a = b;
                i
            }
        };
        let d = a[(pivot, pivot)].clone();
        debug_assert!(d.is_real());
        if d.re.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        let inv = d.inv().expect("nonzero pivot");
        let keep: Vec<usize> = (0..n).filter(|&k| k != pivot).collect();
        let mut next = a.select(&keep, &keep);
        for (r, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                let v = &(&a[(i, pivot)] * &a[(pivot, j)]) * &inv;
                next[(r, c)] = &next[(r, c)] - &v;
            }
        }
        a = next;
    }
    (pos, neg, total - pos - neg)
}

/// Gram matrix `H(cₐ, c_b)` of `H` on a list of vectors.
fn gram(h: &HermitianNS, vs: &[Vec<GaussRat>]) -> Matrix {
    let mut m = Matrix::zeros(vs.len(), vs.len());
    for (a, va) in vs.iter().enumerate() {
        for (b, vb) in vs.iter().enumerate() {
            m[(a, b)] = h.form(va, vb);
        }
    }
    m
}

/// Negative inertia of `H` descended to `V/V_{H,0}`.
pub fn index_k(h: &HermitianNS, d: &DegeneracyData) -> usize {
    hermitian_inertia(&gram(h, &d.complement_basis)).1
}

/// Positive inertia on the complement, the counterpart of [`index_k`].
pub fn positive_index(h: &HermitianNS, d: &DegeneracyData) -> usize {
    hermitian_inertia(&gram(h, &d.complement_basis)).0
}

/// `h̄ = Π dᵢ` for the symplectic divisors of `E` on the quotient lattice.
pub fn descended_pfaffian(ah: &ClassicalAHData, lattice: &PeriodLattice, d: &DegeneracyData) -> Result<BigInt> {
    let e = require_valid(ah, lattice)?;
    let q = &d.quotient_lattice_basis;
    let descended: IntMatrix = q
        .iter()
        .map(|a| {
            q.iter()
                .map(|b| {
                    let mut acc = BigInt::zero();
                    for (i, ai) in a.0.iter().enumerate() {
                        for (j, bj) in b.0.iter().enumerate() {
                            if *ai != 0 && *bj != 0 {
                                acc += &e[i][j] * BigInt::from(ai * bj);
                            }
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    if descended.is_empty() {
        return Ok(BigInt::one());
    }
    Ok(integer_alternating_divisors(&descended)?.iter().product())
}

/// Numerical invariants of classical data.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClassicalSummary {
    pub g: usize,
    pub g0: usize,
    pub k: usize,
    pub hbar_bar: usize,
    /// Whether `χ` is trivial on `Λ ∩ V_{H,0}`.
    pub chi_trivial_on_lambda0: bool,
}

impl ClassicalSummary {
    /// `h^j(X, L)` for `j = 0..=g`.
    pub fn dims(&self) -> Vec<usize> {
        (0..=self.g as i64)
            .map(|j| {
                if self.chi_trivial_on_lambda0 {
                    self.hbar_bar * binom(self.g0 as i64, j - self.k as i64)
                } else {
                    0
                }
            })
            .collect()
    }
}

pub fn classical_summary_with(ah: &ClassicalAHData, lattice: &PeriodLattice, d: &DegeneracyData) -> Result<ClassicalSummary> {
    let e = require_valid(ah, lattice)?;
    let chi_trivial = d.lambda0_basis.iter().all(|p| ah.chi.phase(&e, p).is_zero());
    let hbar_bar = descended_pfaffian(ah, lattice, d)?
        .to_usize()
        .ok_or_else(|| Error::Invalid("descended Pfaffian too large".into()))?;
    Ok(ClassicalSummary { g: lattice.g(), g0: d.g0(), k: index_k(&ah.h, d), hbar_bar, chi_trivial_on_lambda0: chi_trivial })
}

pub fn classical_summary(ah: &ClassicalAHData, lattice: &PeriodLattice) -> Result<ClassicalSummary> {
    let d = degeneracy_subtorus(&ah.h, lattice)?;
    classical_summary_with(ah, lattice, &d)
}

/// `h⁰, …, h^g` of the classical line bundle.
pub fn classical_dims(ah: &ClassicalAHData, lattice: &PeriodLattice) -> Result<Vec<usize>> {
    Ok(classical_summary(ah, lattice)?.dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;

    fn g(re: i64, im: i64) -> GaussRat {
        GaussRat::from_ints(re, im)
    }

    fn diag(entries: &[i64]) -> HermitianNS {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = GaussRat::int(e);
        }
        HermitianNS::new(m)
    }

    #[test]
    fn zero_form_has_full_kernel() {
        let l = PeriodLattice::standard(2);
        let d = degeneracy_subtorus(&HermitianNS::zero(2), &l).unwrap();
        assert_eq!(d.g0(), 2);
        assert_eq!(d.lambda0_basis.len(), 4);
        assert!(d.quotient_lattice_basis.is_empty());
    }

    #[test]
    fn diag_one_zero() {
        let l = PeriodLattice::standard(2);
        let d = degeneracy_subtorus(&diag(&[1, 0]), &l).unwrap();
        assert_eq!(d.g0(), 1);
        assert_eq!(span_rank(2, &d.v0_basis), 1);
        assert!(d.v0_basis[0][0].is_zero());
        // Λ₀ is generated by e₂ and i·e₂, i.e. generators 2 and 4.
        for p in &d.lambda0_basis {
            assert_eq!(p.0[0], 0);
            assert_eq!(p.0[2], 0);
        }
        let l0 = restrict_covector(&[g(1, 0), g(0, 0)], &d);
        assert!(l0[0].is_zero());
        let l0 = restrict_covector(&[g(0, 0), g(1, 0)], &d);
        assert!(!l0[0].is_zero());
    }

    #[test]
    fn nondegenerate_has_trivial_kernel() {
        let d = degeneracy_subtorus(&diag(&[1, 1]), &PeriodLattice::standard(2)).unwrap();
        assert_eq!(d.g0(), 0);
        assert!(d.lambda0_basis.is_empty());
    }

    #[test]
    fn splitting_property() {
        let d = degeneracy_subtorus(&diag(&[0, 1, 0]), &PeriodLattice::standard(3)).unwrap();
        let s_iota = d.s_matrix.mul(&Matrix::from_columns(3, &d.v0_basis)).unwrap();
        assert_eq!(s_iota, Matrix::identity(2));
    }

    #[test]
    fn inertia_examples() {
        let l = PeriodLattice::standard(2);
        let h = diag(&[1, -1]);
        let d = degeneracy_subtorus(&h, &l).unwrap();
        assert_eq!(index_k(&h, &d), 1);
        let off = HermitianNS::new(Matrix::from_rows(vec![vec![g(0, 0), g(0, 1)], vec![g(0, -1), g(0, 0)]]).unwrap());
        assert_eq!(hermitian_inertia(off.matrix()), (1, 1, 0));
    }

    #[test]
    fn classical_dims_examples() {
        let l2 = PeriodLattice::standard(2);
        let triv = ClassicalAHData { h: HermitianNS::zero(2), chi: Semicharacter::trivial(4) };
        assert_eq!(classical_dims(&triv, &l2).unwrap(), vec![1, 2, 1]);

        let l1 = PeriodLattice::standard(1);
        let h = diag(&[2]);
        assert_eq!(h.imaginary_form(&l1)[0][1], rat(-2, 1));
        let ah = ClassicalAHData { h, chi: Semicharacter::new(vec![rat(0, 1), rat(1, 1)]) };
        let s = classical_summary(&ah, &l1).unwrap();
        assert_eq!((s.k, s.hbar_bar), (0, 2));
        assert_eq!(s.dims(), vec![2, 0]);

        let ah = ClassicalAHData { h: diag(&[1, 0]), chi: Semicharacter::trivial(4) };
        assert_eq!(classical_dims(&ah, &l2).unwrap(), vec![1, 1, 0]);
    }

    #[test]
    fn nontrivial_character_on_kernel_vanishes() {
        let ah = ClassicalAHData { h: HermitianNS::zero(2), chi: Semicharacter::new(vec![rat(1, 2), rat(0, 1), rat(0, 1), rat(0, 1)]) };
        assert_eq!(classical_dims(&ah, &PeriodLattice::standard(2)).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn validation_reports() {
        let l = PeriodLattice::standard(1);
        let ok = ClassicalAHData { h: diag(&[2]), chi: Semicharacter::trivial(2) };
        assert!(validate(&ok, &l).is_empty());
        let half = ClassicalAHData {
            h: HermitianNS::new(Matrix::from_rows(vec![vec![GaussRat::real(rat(1, 2))]]).unwrap()),
            chi: Semicharacter::trivial(2),
        };
        assert_eq!(validate(&half, &l)[0].name, INTEGRALITY);
        let l2 = PeriodLattice::standard(2);
        let skew = ClassicalAHData {
            h: HermitianNS::new(Matrix::from_rows(vec![vec![g(0, 0), g(1, 0)], vec![g(2, 0), g(0, 0)]]).unwrap()),
            chi: Semicharacter::trivial(4),
        };
        assert!(validate(&skew, &l2).iter().any(|v| v.name == HERMITIAN_SYMMETRY));
    }

    #[test]
    fn semicharacter_extension_is_consistent() {
        let l = PeriodLattice::standard(1);
        let e = diag(&[2]).integral_form(&l).unwrap();
        let chi = Semicharacter::new(vec![rat(1, 3), rat(1, 2)]);
        let a = LatticePoint(vec![2, -1]);
        let b = LatticePoint(vec![-3, 4]);
        // χ(a + b) = χ(a) χ(b) exp(iπ E(a, b)) mod 2
        let eab = BigInt::from(a.0[0] * b.0[1] - a.0[1] * b.0[0]) * &e[0][1];
        let lhs = chi.phase(&e, &a.add(&b));
        let rhs = reduce_mod(&(chi.phase(&e, &a) + chi.phase(&e, &b) + Rational::from_integer(eab)), 2).0;
        assert_eq!(lhs, rhs);
        assert!(chi.phase(&e, &LatticePoint::zero(2)).is_zero());
    }
}
