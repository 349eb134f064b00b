//! Constant Poisson bivectors, the Moyal star product on sums of
//! `polynomial × exp(π·affine)` terms, and deformed factors of automorphy.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{binomial, reduce_mod, GaussRat, HbarSeries, Matrix, PiScalar, Rational};
use crate::exactalg::IntMatrix;
use crate::torus::{
    pairing, validate, ClassicalAHData, HermitianNS, LatticePoint, PeriodLattice, Semicharacter, Violation,
};

/// Constant holomorphic Poisson bivector `Π^{ab}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PoissonBivector {
    matrix: Matrix,
}

impl PoissonBivector {
    pub fn new(matrix: Matrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::DimensionMismatch("Poisson bivector must be square".into()));
        }
        let n = matrix.rows();
        for i in 0..n {
            for j in 0..n {
                if matrix[(i, j)] != -matrix[(j, i)].clone() {
                    return Err(Error::NotAlternating(format!("Π[{i}][{j}] vs Π[{j}][{i}]")));
                }
            }
        }
        Ok(PoissonBivector { matrix })
    }

    pub fn zero(g: usize) -> Self {
        PoissonBivector { matrix: Matrix::zeros(g, g) }
    }

    /// `Π^{ab} = c`, `Π^{ba} = −c`, zero elsewhere (0-based indices).
    pub fn elementary(g: usize, a: usize, b: usize, c: GaussRat) -> Self {
        let mut m = Matrix::zeros(g, g);
        m[(a, b)] = c.clone();
        m[(b, a)] = -c;
        PoissonBivector { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Π(a, b) = Σ Π^{pq} a_p b_q`.
    pub fn pair(&self, a: &[GaussRat], b: &[GaussRat]) -> GaussRat {
        let mut acc = GaussRat::zero();
        let n = self.dim();
        for p in 0..n {
            if a[p].is_zero() {
                continue;
            }
            for q in 0..n {
                let m = &self.matrix[(p, q)];
                if !m.is_zero() && !b[q].is_zero() {
                    acc += &(&(&a[p] * m) * &b[q]);
                }
            }
        }
        acc
    }
}

/// `Hᵀ·Π·H = 0`.
pub fn compatibility(h: &HermitianNS, pi: &PoissonBivector) -> bool {
    let ht = h.matrix().transpose();
    match ht.mul(pi.matrix()).and_then(|m| m.mul(h.matrix())) {
        Ok(m) => m.is_zero(),
        Err(_) => false,
    }
}

/// Exponent vector of a monomial `v₁^{e₁}⋯v_g^{e_g}`.
pub type Monomial = Vec<u32>;
type Poly = BTreeMap<Monomial, HbarSeries>;

/// `exp(π(a·v + c))` with `Im c ∈ [0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ExpKey {
    pub linear: Vec<GaussRat>,
    pub constant: GaussRat,
}

impl ExpKey {
    /// Normalizes `c` using `exp(iπ) = −1`; returns the key and the sign absorbed.
    fn normalized(linear: Vec<GaussRat>, constant: GaussRat) -> (ExpKey, bool) {
        let (im, q) = reduce_mod(&constant.im, 1);
        let negate = q.is_odd();
        (ExpKey { linear, constant: GaussRat::new(constant.re, im) }, negate)
    }

    fn is_trivial(&self) -> bool {
        self.constant.is_zero() && self.linear.iter().all(Zero::is_zero)
    }
}

fn poly_add_into(target: &mut Poly, mono: &Monomial, c: &HbarSeries) {
    if c.is_zero() {
        return;
    }
    match target.get_mut(mono) {
        Some(e) => {
            e.add_assign(c);
            if e.is_zero() {
                target.remove(mono);
            }
        }
        None => {
            target.insert(mono.clone(), c.clone());
        }
    }
}

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in p {
        for (mb, cb) in q {
            let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            poly_add_into(&mut out, &m, &ca.mul(cb));
        }
    }
    out
}

fn poly_scale(p: &Poly, s: &HbarSeries) -> Poly {
    let mut out = Poly::new();
    for (m, c) in p {
        poly_add_into(&mut out, m, &c.mul(s));
    }
    out
}

/// `∂/∂v_a` on the polynomial part only.
fn poly_partial(p: &Poly, a: usize) -> Poly {
    let mut out = Poly::new();
    for (m, c) in p {
        if m[a] == 0 {
            continue;
        }
        let mut d = m.clone();
        d[a] -= 1;
        poly_add_into(&mut out, &d, &c.scale_gauss(&GaussRat::int(m[a] as i64)));
    }
    out
}

fn gauss_pow(x: &GaussRat, k: u32) -> GaussRat {
    (0..k).fold(GaussRat::one(), |acc, _| &acc * x)
}

/// Symbolic function `Σ P_k(v)·exp(π(a_k·v + c_k))` with coefficients in
/// `ℚ(i)[π][ħ]/(ħ^order)`.
#[derive(Clone, PartialEq, Eq)]
pub struct ExpAffine {
    g: usize,
    order: usize,
    terms: BTreeMap<ExpKey, Poly>,
}

impl ExpAffine {
    pub fn zero(g: usize, order: usize) -> Self {
        ExpAffine { g, order, terms: BTreeMap::new() }
    }

    pub fn constant(g: usize, c: HbarSeries) -> Self {
        let order = c.order();
        let mut f = ExpAffine::zero(g, order);
        f.insert(ExpKey { linear: vec![GaussRat::zero(); g], constant: GaussRat::zero() }, vec![0; g], c);
        f
    }

    pub fn one(g: usize, order: usize) -> Self {
        ExpAffine::constant(g, HbarSeries::one(order))
    }

    /// `c·v^m`.
    pub fn monomial(g: usize, order: usize, m: Monomial, c: PiScalar) -> Self {
        let mut f = ExpAffine::zero(g, order);
        f.insert(ExpKey { linear: vec![GaussRat::zero(); g], constant: GaussRat::zero() }, m, HbarSeries::constant(c, order));
        f
    }

    /// The coordinate function `v_a`.
    pub fn variable(g: usize, order: usize, a: usize) -> Self {
        let mut m = vec![0; g];
        m[a] = 1;
        ExpAffine::monomial(g, order, m, PiScalar::one())
    }

    /// `coeff·exp(π(linear·v + constant))`.
    pub fn exponential(linear: Vec<GaussRat>, constant: GaussRat, coeff: HbarSeries) -> Self {
        let g = linear.len();
        let mut f = ExpAffine::zero(g, coeff.order());
        f.insert(ExpKey { linear, constant }, vec![0; g], coeff);
        f
    }

    fn insert(&mut self, key: ExpKey, mono: Monomial, c: HbarSeries) {
        let (key, negate) = ExpKey::normalized(key.linear, key.constant);
        let c = if negate { c.neg() } else { c };
        let c = c.truncate(self.order);
        if c.is_zero() {
            return;
        }
        let poly = self.terms.entry(key.clone()).or_default();
        poly_add_into(poly, &mono, &c);
        if poly.is_empty() {
            self.terms.remove(&key);
        }
    }

    fn insert_poly(&mut self, key: ExpKey, poly: &Poly) {
        for (m, c) in poly {
            self.insert(key.clone(), m.clone(), c.clone());
        }
    }

    pub fn dim(&self) -> usize {
        self.g
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.values().map(BTreeMap::len).sum()
    }

    /// Exponential keys with their polynomial parts.
    pub fn terms(&self) -> impl Iterator<Item = (&ExpKey, &BTreeMap<Monomial, HbarSeries>)> {
        self.terms.iter()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        let mut out = ExpAffine::zero(self.g, order);
        for (k, p) in &self.terms {
            out.insert_poly(k.clone(), p);
        }
        out
    }

    /// Equality after truncating both sides to order `n`.
    pub fn eq_at(&self, o: &ExpAffine, n: usize) -> bool {
        self.truncate(n) == o.truncate(n)
    }

    fn combine(&self, o: &ExpAffine, sign: bool) -> ExpAffine {
        assert_eq!(self.g, o.g, "functions on different spaces");
        let order = self.order.min(o.order);
        let mut out = self.truncate(order);
        for (k, p) in &o.terms {
            for (m, c) in p {
                out.insert(k.clone(), m.clone(), if sign { c.neg() } else { c.clone() });
            }
        }
        out
    }

    pub fn add(&self, o: &ExpAffine) -> ExpAffine {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &ExpAffine) -> ExpAffine {
        self.combine(o, true)
    }

    pub fn neg(&self) -> ExpAffine {
        ExpAffine::zero(self.g, self.order).sub(self)
    }

    pub fn scale(&self, s: &HbarSeries) -> ExpAffine {
        let mut out = ExpAffine::zero(self.g, self.order.min(s.order()));
        for (k, p) in &self.terms {
            out.insert_poly(k.clone(), &poly_scale(p, s));
        }
        out
    }

    /// Multiplication by `ħ^k` at the same order.
    pub fn shift_up(&self, k: usize) -> ExpAffine {
        let mut out = ExpAffine::zero(self.g, self.order);
        for (key, p) in &self.terms {
            for (m, c) in p {
                out.insert(key.clone(), m.clone(), c.shift_up(k));
            }
        }
        out
    }

    /// Exact division by `ħ^k`; the order drops by `k`.
    pub fn divide_hbar(&self, k: usize) -> Result<ExpAffine> {
        if k > self.order {
            return Err(Error::TruncationMismatch { needed: k, got: self.order });
        }
        let mut out = ExpAffine::zero(self.g, self.order - k);
        for (key, p) in &self.terms {
            for (m, c) in p {
                out.insert(key.clone(), m.clone(), c.divide_hbar(k)?);
            }
        }
        Ok(out)
    }

    /// Pointwise (commutative) product.
    pub fn mul(&self, o: &ExpAffine) -> ExpAffine {
        assert_eq!(self.g, o.g, "functions on different spaces");
        let mut out = ExpAffine::zero(self.g, self.order.min(o.order));
        for (ka, pa) in &self.terms {
            for (kb, pb) in &o.terms {
                let key = ExpKey {
                    linear: ka.linear.iter().zip(&kb.linear).map(|(x, y)| x + y).collect(),
                    constant: &ka.constant + &kb.constant,
                };
                out.insert_poly(key, &poly_mul(pa, pb));
            }
        }
        out
    }

    /// `f ∘ T_λ`, i.e. `v ↦ f(v + λ)`.
    pub fn translate(&self, lambda: &[GaussRat]) -> ExpAffine {
        let mut out = ExpAffine::zero(self.g, self.order);
        for (k, p) in &self.terms {
            let shift: GaussRat = k.linear.iter().zip(lambda).fold(GaussRat::zero(), |acc, (a, l)| &acc + &(a * l));
            let key = ExpKey { linear: k.linear.clone(), constant: &k.constant + &shift };
            for (m, c) in p {
                // Π (v_a + λ_a)^{m_a}, expanded.
                let mut expanded: Vec<(Monomial, GaussRat)> = vec![(vec![0; self.g], GaussRat::one())];
                for a in 0..self.g {
                    let mut next = Vec::new();
                    for (mono, coef) in &expanded {
                        for i in 0..=m[a] {
                            let b = GaussRat::real(Rational::from_integer(binomial(m[a] as usize, i as usize)));
                            let w = &(&b * &gauss_pow(&lambda[a], m[a] - i)) * coef;
                            if w.is_zero() {
                                continue;
                            }
                            let mut mm = mono.clone();
                            mm[a] = i;
                            next.push((mm, w));
                        }
                    }
                    expanded = next;
                }
                for (mono, coef) in expanded {
                    out.insert(key.clone(), mono, c.scale_gauss(&coef));
                }
            }
        }
        out
    }

    /// `∂f/∂v_a`.
    pub fn derivative(&self, a: usize) -> ExpAffine {
        let mut out = ExpAffine::zero(self.g, self.order);
        for (k, p) in &self.terms {
            out.insert_poly(k.clone(), &poly_partial(p, a));
            if !k.linear[a].is_zero() {
                let s = HbarSeries::constant(PiScalar::monomial(k.linear[a].clone(), 1), self.order);
                out.insert_poly(k.clone(), &poly_scale(p, &s));
            }
        }
        out
    }

    /// Poisson bracket `{f, g} = Σ Π^{ab} ∂_a f ∂_b g`.
    pub fn bracket(&self, o: &ExpAffine, pi: &PoissonBivector) -> ExpAffine {
        let mut out = ExpAffine::zero(self.g, self.order.min(o.order));
        for a in 0..self.g {
            for b in 0..self.g {
                let m = &pi.matrix()[(a, b)];
                if m.is_zero() {
                    continue;
                }
                let s = HbarSeries::constant(PiScalar::constant(m.clone()), out.order);
                out = out.add(&self.derivative(a).mul(&o.derivative(b)).scale(&s));
            }
        }
        out
    }

    /// Moyal product `Σ_{k<n} ħ^k/k! · f P^k g` with `P = Σ Π^{ab} ←∂_a →∂_b`.
    pub fn star(&self, o: &ExpAffine, pi: &PoissonBivector, n: usize) -> Result<ExpAffine> {
        assert_eq!(self.g, o.g, "functions on different spaces");
        if self.order < n || o.order < n {
            return Err(Error::TruncationMismatch { needed: n, got: self.order.min(o.order) });
        }
        let g = self.g;
        let mut out = ExpAffine::zero(g, n);
        for (ka, pa) in &self.terms {
            for (kb, pb) in &o.terms {
                let (poly, kappa) = star_terms(g, pa, &ka.linear, pb, &kb.linear, pi, n);
                let correction = HbarSeries::monomial(PiScalar::monomial(kappa, 2), 1, n).exp()?;
                let key = ExpKey {
                    linear: ka.linear.iter().zip(&kb.linear).map(|(x, y)| x + y).collect(),
                    constant: &ka.constant + &kb.constant,
                };
                out.insert_poly(key, &poly_scale(&poly, &correction));
            }
        }
        Ok(out)
    }

    /// Inverse of a single unit term `u·exp(π(a·v + c))` with `u` constant in `v`.
    /// Star and pointwise inverses agree for such terms.
    pub fn inverse(&self) -> Result<ExpAffine> {
        let mut it = self.terms.iter();
        let (Some((k, p)), None) = (it.next(), it.next()) else {
            return Err(Error::NotInvertible("not a single exponential term".into()));
        };
        let zero = vec![0; self.g];
        let (Some(u), 1) = (p.get(&zero), p.len()) else {
            return Err(Error::NotInvertible("polynomial part is not constant".into()));
        };
        let linear = k.linear.iter().map(|x| -x.clone()).collect();
        Ok(ExpAffine::exponential(linear, -k.constant.clone(), u.inv()?))
    }

    /// Whether the value is constant in `v` (only the trivial key with monomial `1`).
    pub fn as_constant(&self) -> Option<HbarSeries> {
        if self.is_zero() {
            return Some(HbarSeries::zero(self.order));
        }
        let zero = vec![0; self.g];
        let (k, p) = self.terms.iter().next()?;
        (self.terms.len() == 1 && k.is_trivial() && p.len() == 1).then(|| p.get(&zero).cloned()).flatten()
    }
}

/// Polynomial part and `π²`-coefficient `κ = Π(a, b)` of
/// `(P e^{πa·v}) ⋆ (Q e^{πb·v})`, before multiplying by `exp(ħπ²κ)`.
fn star_terms(
    g: usize,
    p: &Poly,
    a: &[GaussRat],
    q: &Poly,
    b: &[GaussRat],
    pi: &PoissonBivector,
    n: usize,
) -> (Poly, GaussRat) {
    let m = pi.matrix();
    // u_p = Σ_q Π^{pq} b_q acts on the left factor, w_q = Σ_p Π^{pq} a_p on the right.
    let u: Vec<GaussRat> = (0..g).map(|r| (0..g).fold(GaussRat::zero(), |acc, s| &acc + &(&m[(r, s)] * &b[s]))).collect();
    let w: Vec<GaussRat> = (0..g).map(|s| (0..g).fold(GaussRat::zero(), |acc, r| &acc + &(&m[(r, s)] * &a[r]))).collect();
    let kappa = pi.pair(a, b);

    // Bivariate polynomial P(x)Q(y) with exponents [x; y].
    let mut r = Poly::new();
    for (ma, ca) in p {
        for (mb, cb) in q {
            let mut mono = ma.clone();
            mono.extend_from_slice(mb);
            poly_add_into(&mut r, &mono, &ca.truncate(n).mul(&cb.truncate(n)));
        }
    }

    let apply_t = |f: &Poly| -> Poly {
        let mut out = Poly::new();
        for s in 0..g {
            for t in 0..g {
                if m[(s, t)].is_zero() {
                    continue;
                }
                let d = poly_partial(&poly_partial(f, s), g + t);
                for (mono, c) in &d {
                    poly_add_into(&mut out, mono, &c.scale_gauss(&m[(s, t)]));
                }
            }
        }
        for s in 0..g {
            if !u[s].is_zero() {
                for (mono, c) in &poly_partial(f, s) {
                    poly_add_into(&mut out, mono, &c.scale(&PiScalar::monomial(u[s].clone(), 1)));
                }
            }
            if !w[s].is_zero() {
                for (mono, c) in &poly_partial(f, g + s) {
                    poly_add_into(&mut out, mono, &c.scale(&PiScalar::monomial(w[s].clone(), 1)));
                }
            }
        }
        out
    };

    let mut total = r.clone();
    let mut acc = r;
    for k in 1..n {
        acc = apply_t(&acc);
        if acc.is_empty() {
            break;
        }
        let inv_k = GaussRat::real(Rational::new(1.into(), (k as i64).into()));
        acc = acc.into_iter().map(|(mono, c)| (mono, c.scale_gauss(&inv_k))).collect();
        for (mono, c) in &acc {
            poly_add_into(&mut total, mono, &c.shift_up(k));
        }
    }

    // Restrict to the diagonal x = y = v.
    let mut out = Poly::new();
    for (mono, c) in total {
        let v: Monomial = (0..g).map(|i| mono[i] + mono[g + i]).collect();
        poly_add_into(&mut out, &v, &c);
    }
    (out, kappa)
}

impl fmt::Display for ExpAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (k, p) in &self.terms {
            let exp = if k.is_trivial() {
                String::new()
            } else {
                let lin: Vec<String> = k
                    .linear
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| format!("{c}·v{}", i + 1))
                    .collect();
                let mut inner = lin.join(" + ");
                if !k.constant.is_zero() {
                    if !inner.is_empty() {
                        inner.push_str(" + ");
                    }
                    inner.push_str(&k.constant.to_string());
                }
                format!("·exp(π({inner}))")
            };
            for (m, c) in p {
                let mono: String = m
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| if *e == 1 { format!("·v{}", i + 1) } else { format!("·v{}^{e}", i + 1) })
                    .collect();
                parts.push(format!("[{c}]{mono}{exp}"));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for ExpAffine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExpAffine(order {}: {self})", self.order)
    }
}

/// The full input `((H, χ); l(ħ))` together with the lattice and `Π`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuantumAHData {
    pub lattice: PeriodLattice,
    pub ah: ClassicalAHData,
    /// `m ↦ l_m ∈ V̄^∨`, finitely supported, `m ≥ 1`.
    pub l_series: BTreeMap<usize, Vec<GaussRat>>,
    pub poisson: PoissonBivector,
}

pub const POISSON_COMPATIBILITY: &str = "Poisson compatibility";
pub const SERIES: &str = "l-series";

impl QuantumAHData {
    pub fn g(&self) -> usize {
        self.lattice.g()
    }

    /// Classical violations plus series shape and `Hᵀ Π H = 0`.
    pub fn violations(&self) -> Vec<Violation> {
        let g = self.g();
        let mut out = validate(&self.ah, &self.lattice);
        for (m, l) in &self.l_series {
            if *m == 0 {
                out.push(Violation::new(SERIES, "series index 0 is not allowed"));
            }
            if l.len() != g {
                out.push(Violation::new(SERIES, format!("l_{m} has {} components, expected {g}", l.len())));
            }
        }
        if self.poisson.dim() != g {
            out.push(Violation::new(crate::torus::SHAPE, format!("Π is {0}x{0}, expected {g}x{g}", self.poisson.dim())));
        } else if out.iter().all(|v| v.name != crate::torus::SHAPE) && !compatibility(&self.ah.h, &self.poisson) {
            let m = self.ah.h.matrix().transpose().mul(self.poisson.matrix()).and_then(|x| x.mul(self.ah.h.matrix()));
            let detail = match m {
                Ok(m) => {
                    let (i, j) = (0..g)
                        .flat_map(|i| (0..g).map(move |j| (i, j)))
                        .find(|&(i, j)| !m[(i, j)].is_zero())
                        .unwrap_or((0, 0));
                    format!("(HᵀΠH)[{i}][{j}] = {}", m[(i, j)])
                }
                Err(e) => e.to_string(),
            };
            out.push(Violation::new(POISSON_COMPATIBILITY, detail));
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        match self.violations().into_iter().next() {
            None => Ok(()),
            Some(v) if v.name == POISSON_COMPATIBILITY => Err(Error::Incompatible),
            Some(v) => Err(Error::Invalid(format!("{}: {}", v.name, v.detail))),
        }
    }

    /// Same data with the series cut to indices `< cutoff`.
    pub fn with_series_below(&self, cutoff: usize) -> QuantumAHData {
        let mut d = self.clone();
        d.l_series.retain(|m, _| *m < cutoff);
        d
    }
}

/// `λ ↦ Φ_λ(v) = χ(λ)·exp(πH(v,λ) + (π/2)H(λ,λ) + Σ_m ħ^m π⟨l_m, λ⟩)` at order `N`.
#[derive(Clone, Debug)]
pub struct AutomorphyFactor {
    lattice: PeriodLattice,
    h: HermitianNS,
    e: IntMatrix,
    chi: Semicharacter,
    l_series: BTreeMap<usize, Vec<GaussRat>>,
    poisson: PoissonBivector,
    order: usize,
    corruption: Option<(usize, Rational)>,
}

impl AutomorphyFactor {
    pub fn new(data: &QuantumAHData, order: usize) -> Result<Self> {
        data.check()?;
        let e = data.ah.h.integral_form(&data.lattice).expect("checked integrality");
        Ok(AutomorphyFactor {
            lattice: data.lattice.clone(),
            h: data.ah.h.clone(),
            e,
            chi: data.ah.chi.clone(),
            l_series: data.l_series.clone(),
            poisson: data.poisson.clone(),
            order,
            corruption: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn poisson(&self) -> &PoissonBivector {
        &self.poisson
    }

    pub fn lattice(&self) -> &PeriodLattice {
        &self.lattice
    }

    pub fn with_order(&self, order: usize) -> Self {
        AutomorphyFactor { order, ..self.clone() }
    }

    /// `Φ mod ħ^s` in exponential form: only `l_m` with `m < s` are kept.
    pub fn reduced(&self, s: usize) -> Self {
        let mut r = self.clone();
        r.l_series.retain(|m, _| *m < s);
        r
    }

    /// Test hook: multiplies `Φ_{λᵢ}` (for the generator `λᵢ` only) by
    /// `exp(iπ·shift)`, which breaks the cocycle identity.
    pub fn with_corrupted_phase(&self, generator: usize, shift: Rational) -> Self {
        AutomorphyFactor { corruption: Some((generator, shift)), ..self.clone() }
    }

    /// `χ(λ)` as a phase `r` with `χ(λ) = exp(iπ r)`.
    pub fn chi_phase(&self, lambda: &LatticePoint) -> Rational {
        let mut r = self.chi.phase(&self.e, lambda);
        if let Some((i, shift)) = &self.corruption {
            if *lambda == LatticePoint::generator(self.lattice.rank(), *i) {
                r += shift;
            }
        }
        r
    }

    pub fn phi(&self, lambda: &LatticePoint) -> ExpAffine {
        let g = self.lattice.g();
        let n = self.order;
        let v = self.lattice.vector(lambda);
        let linear = self.h.linear_part(&v);
        let half = GaussRat::real(Rational::new(1.into(), 2.into()));
        let re = &self.h.form(&v, &v) * &half;
        let constant = &re + &GaussRat::new(Rational::zero(), self.chi_phase(lambda));
        let mut exponent = HbarSeries::zero(n);
        for (m, l) in &self.l_series {
            if *m < n {
                exponent.add_assign(&HbarSeries::monomial(PiScalar::monomial(pairing(l, &v), 1), *m, n));
            }
        }
        let coeff = exponent.exp().expect("exponent has no constant term");
        debug_assert_eq!(linear.len(), g);
        ExpAffine::exponential(linear, constant, coeff)
    }

    pub fn phi_inv(&self, lambda: &LatticePoint) -> ExpAffine {
        self.phi(lambda).inverse().expect("Φ_λ is a single unit term")
    }

    /// `Φ_{λ₂} ⋆ (Φ_{λ₁} ∘ T_{λ₂}) = Φ_{λ₁+λ₂}` at order `N`.
    pub fn check_cocycle(&self, l1: &LatticePoint, l2: &LatticePoint) -> Result<bool> {
        let shifted = self.phi(l1).translate(&self.lattice.vector(l2));
        let lhs = self.phi(l2).star(&shifted, &self.poisson, self.order)?;
        Ok(lhs == self.phi(&l1.add(l2)))
    }
}

pub fn build_phi(data: &QuantumAHData, lambda: &LatticePoint, order: usize) -> Result<ExpAffine> {
    Ok(AutomorphyFactor::new(data, order)?.phi(lambda))
}
