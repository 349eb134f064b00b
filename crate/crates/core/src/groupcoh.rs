//! Cochains of the period lattice with values in [`ExpAffine`], the group
//! cohomology differential for translation and twisted actions, cup
//! products, and the extension class of the quantized bundle.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exactalg::{GaussRat, HbarSeries, PiScalar};
use crate::moyal::{AutomorphyFactor, ExpAffine, PoissonBivector, QuantumAHData};
use crate::torus::{lattice_sum, pairing, LatticePoint, PeriodLattice};

pub type CochainRule = Arc<dyn Fn(&[LatticePoint]) -> Result<ExpAffine> + Send + Sync>;

/// A `p`-cochain given as an evaluable rule on `p`-tuples of lattice points.
#[derive(Clone)]
pub struct LatticeCochain {
    degree: usize,
    tag: String,
    rule: CochainRule,
}

impl LatticeCochain {
    pub fn new(
        degree: usize,
        tag: impl Into<String>,
        rule: impl Fn(&[LatticePoint]) -> Result<ExpAffine> + Send + Sync + 'static,
    ) -> Self {
        LatticeCochain { degree, tag: tag.into(), rule: Arc::new(rule) }
    }

    /// The `0`-cochain with the given value.
    pub fn constant(value: ExpAffine) -> Self {
        LatticeCochain::new(0, "constant", move |_| Ok(value.clone()))
    }

    /// `λ₁, …, λ_p ↦ Π_r ⟨a_r, λ_r⟩`, constant in `v`.
    pub fn multilinear_phase(lattice: &PeriodLattice, covectors: Vec<Vec<GaussRat>>, order: usize) -> Self {
        let lattice = lattice.clone();
        let g = lattice.g();
        LatticeCochain::new(covectors.len(), "multilinear-phase", move |pts| {
            let mut value = GaussRat::from_ints(1, 0);
            for (a, p) in covectors.iter().zip(pts) {
                value = &value * &pairing(a, &lattice.vector(p));
            }
            Ok(ExpAffine::constant(g, HbarSeries::constant(PiScalar::constant(value), order)))
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn eval(&self, pts: &[LatticePoint]) -> Result<ExpAffine> {
        if pts.len() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "{}-cochain evaluated on {} points",
                self.degree,
                pts.len()
            )));
        }
        (self.rule)(pts)
    }

    pub fn add(&self, o: &LatticeCochain) -> LatticeCochain {
        assert_eq!(self.degree, o.degree, "adding cochains of different degree");
        let (a, b) = (self.clone(), o.clone());
        LatticeCochain::new(self.degree, format!("{} + {}", self.tag, o.tag), move |pts| Ok(a.eval(pts)?.add(&b.eval(pts)?)))
    }

    /// Division of every value by `ħ^k`.
    pub fn divide_hbar(&self, k: usize) -> LatticeCochain {
        let a = self.clone();
        LatticeCochain::new(self.degree, format!("({}) / ħ^{k}", self.tag), move |pts| a.eval(pts)?.divide_hbar(k))
    }
}

impl fmt::Debug for LatticeCochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LatticeCochain(degree {}, {})", self.degree, self.tag)
    }
}

/// Action of `Λ` on functions: translation, or `A^Φ_λ(f) = (f ∘ T_λ) ⋆ Φ_λ^{-1}`.
#[derive(Clone, Debug)]
pub enum ModuleAction {
    Translation(PeriodLattice),
    Twisted(AutomorphyFactor),
}

impl ModuleAction {
    pub fn lattice(&self) -> &PeriodLattice {
        match self {
            ModuleAction::Translation(l) => l,
            ModuleAction::Twisted(phi) => phi.lattice(),
        }
    }

    pub fn apply(&self, lambda: &LatticePoint, f: &ExpAffine) -> Result<ExpAffine> {
        let shifted = f.translate(&self.lattice().vector(lambda));
        match self {
            ModuleAction::Translation(_) => Ok(shifted),
            ModuleAction::Twisted(phi) => {
                let n = f.order();
                if phi.order() < n {
                    return Err(Error::TruncationMismatch { needed: n, got: phi.order() });
                }
                shifted.star(&phi.phi_inv(lambda), phi.poisson(), n)
            }
        }
    }
}

/// Coboundary `δ` for the given action, following the standard inhomogeneous formula.
pub fn delta(f: &LatticeCochain, action: &ModuleAction) -> LatticeCochain {
    let p = f.degree();
    let f = f.clone();
    let action = action.clone();
    let tag = format!("δ({})", f.tag());
    LatticeCochain::new(p + 1, tag, move |pts| {
        let mut acc = action.apply(&pts[0], &f.eval(&pts[1..])?)?;
        for i in 0..p {
            let mut merged: Vec<LatticePoint> = pts[..i].to_vec();
            merged.push(pts[i].add(&pts[i + 1]));
            merged.extend_from_slice(&pts[i + 2..]);
            let term = f.eval(&merged)?;
            acc = if i % 2 == 0 { acc.sub(&term) } else { acc.add(&term) };
        }
        let last = f.eval(&pts[..p])?;
        acc = if p % 2 == 0 { acc.sub(&last) } else { acc.add(&last) };
        Ok(acc)
    })
}

/// Pairing of cochain values used by [`cup`].
#[derive(Clone, Debug)]
pub enum Pairing {
    Commutative,
    Star(PoissonBivector),
}

impl Pairing {
    fn apply(&self, a: &ExpAffine, b: &ExpAffine) -> Result<ExpAffine> {
        match self {
            Pairing::Commutative => Ok(a.mul(b)),
            Pairing::Star(pi) => a.star(b, pi, a.order().min(b.order())),
        }
    }
}

/// `(f ∪ g)_{λ₀…λ_{p+q−1}} = f_{λ₀…λ_{p−1}} * ((λ₀ + … + λ_{p−1})·g_{λ_p…λ_{p+q−1}})`.
pub fn cup(f: &LatticeCochain, g: &LatticeCochain, g_action: &ModuleAction, pairing: &Pairing) -> LatticeCochain {
    let (p, q) = (f.degree(), g.degree());
    let (f, g, action, pairing) = (f.clone(), g.clone(), g_action.clone(), pairing.clone());
    let rank = action.lattice().rank();
    let tag = format!("{} ∪ {}", f.tag(), g.tag());
    LatticeCochain::new(p + q, tag, move |pts| {
        let shift = lattice_sum(rank, &pts[..p]);
        let right = action.apply(&shift, &g.eval(&pts[p..])?)?;
        pairing.apply(&f.eval(&pts[..p])?, &right)
    })
}

/// Checks `A_{λ₁}(A_{λ₂}(f)) = A_{λ₁+λ₂}(f)` on each sample.
pub fn twisted_action_check(action: &ModuleAction, samples: &[(LatticePoint, LatticePoint, ExpAffine)]) -> Result<bool> {
    for (l1, l2, f) in samples {
        let lhs = action.apply(l1, &action.apply(l2, f)?)?;
        let rhs = action.apply(&l1.add(l2), f)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The extension class `λ ↦ (f ↦ (f·φ_λ) ⋆ (Φ_λ^{-1} − φ_λ^{-1}) / ħ^{t⁰})`
/// with `φ = Φ mod ħ^{t⁰}`. Values are returned at order `N`; internally
/// everything runs at order `N + t⁰`.
#[derive(Clone, Debug)]
pub struct ExtensionClass {
    full: AutomorphyFactor,
    reduced: AutomorphyFactor,
    t0: usize,
    order: usize,
}

impl ExtensionClass {
    pub fn new(data: &QuantumAHData, t0: Option<usize>, order: usize) -> Result<Self> {
        let t0 = t0.ok_or(Error::InfiniteT0)?;
        let full = AutomorphyFactor::new(data, order + t0)?;
        let reduced = full.reduced(t0);
        Ok(ExtensionClass { full, reduced, t0, order })
    }

    pub fn t0(&self) -> usize {
        self.t0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Working order `N + t⁰` expected of arguments.
    pub fn lifted_order(&self) -> usize {
        self.order + self.t0
    }

    pub fn full(&self) -> &AutomorphyFactor {
        &self.full
    }

    pub fn reduced(&self) -> &AutomorphyFactor {
        &self.reduced
    }

    /// `(Φ_λ^{-1} − φ_λ^{-1})`, undivided, at order `N + t⁰`.
    fn difference(&self, lambda: &LatticePoint) -> ExpAffine {
        self.full.phi_inv(lambda).sub(&self.reduced.phi_inv(lambda))
    }

    /// `(a_λ)(f)` for `f` given at order at least `N + t⁰`.
    pub fn apply(&self, lambda: &LatticePoint, f: &ExpAffine) -> Result<ExpAffine> {
        let n = self.lifted_order();
        if f.order() < n {
            return Err(Error::TruncationMismatch { needed: n, got: f.order() });
        }
        let left = f.mul(&self.reduced.phi(lambda));
        left.star(&self.difference(lambda), self.full.poisson(), n)?.divide_hbar(self.t0)
    }

    /// The degree-one cochain `λ ↦ a_λ(f)`.
    pub fn cochain(&self, f: ExpAffine) -> LatticeCochain {
        let me = self.clone();
        LatticeCochain::new(1, "α(f)", move |pts| me.apply(&pts[0], &f))
    }

    /// `(α ∪ ξ)_{λ₀…λ_j} = a_{λ₀}(φ_{λ₀}^{-1} · (ξ_{λ₁…λ_j} ∘ T_{λ₀}))`; `ξ` takes values
    /// at order `N + t⁰`.
    pub fn cup(&self, xi: &LatticeCochain) -> LatticeCochain {
        let me = self.clone();
        let xi = xi.clone();
        let tag = format!("α ∪ {}", xi.tag());
        LatticeCochain::new(xi.degree() + 1, tag, move |pts| {
            let lambda = &pts[0];
            let moved = xi.eval(&pts[1..])?.translate(&me.full.lattice().vector(lambda));
            me.apply(lambda, &me.reduced.phi_inv(lambda).mul(&moved))
        })
    }

    /// `(ξ_{λ₁…λ_j} ∘ T_{λ₀}) ⋆ (Φ_{λ₀}^{-1} − φ_{λ₀}^{-1}) / ħ^{t⁰}`, the simplified cup.
    pub fn cup_simplified(&self, xi: &LatticeCochain) -> LatticeCochain {
        let me = self.clone();
        let xi = xi.clone();
        LatticeCochain::new(xi.degree() + 1, "α ∪ ξ (simplified)", move |pts| {
            let lambda = &pts[0];
            let moved = xi.eval(&pts[1..])?.translate(&me.full.lattice().vector(lambda));
            moved.star(&me.difference(lambda), me.full.poisson(), me.lifted_order())?.divide_hbar(me.t0)
        })
    }
}

/// One representative from the explicit cocycle family.
#[derive(Clone, Debug)]
pub struct BasisCocycle {
    /// Power `c` of the `ħ^c` prefactor, `0 ≤ c < t⁰`.
    pub hbar_power: usize,
    /// Indices into the complement basis `a¹, …, a^{g₀−1}` (1-based).
    pub indices: Vec<usize>,
    /// Index `r` of the classical representative `b^r` (1-based).
    pub b_index: usize,
    pub expression: String,
    /// Evaluable cochain; absent in emit-only mode.
    pub cochain: Option<LatticeCochain>,
}

/// Output of [`build_basis_cocycles`].
#[derive(Clone, Debug)]
pub struct CocycleListing {
    pub degree: usize,
    /// `true` when the cochains are fully evaluable (the `H = 0` scope).
    pub verified_scope: bool,
    pub complement: Vec<Vec<GaussRat>>,
    pub cocycles: Vec<BasisCocycle>,
}

/// Subsets of `{1..n}` of size `k` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(1, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Standard basis covectors other than the pivot (first nonzero) slot of `l`;
/// together with `l` they form a basis.
pub fn complement_to_line(l: &[GaussRat]) -> Result<Vec<Vec<GaussRat>>> {
    let pivot = l.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroCovector)?;
    Ok((0..l.len())
        .filter(|&i| i != pivot)
        .map(|i| {
            let mut e = vec![GaussRat::zero(); l.len()];
            e[i] = GaussRat::from_ints(1, 0);
            e
        })
        .collect())
}

fn covector_string(a: &[GaussRat]) -> String {
    let parts: Vec<String> = a.iter().map(|c| c.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Explicit representatives of a basis of `H^j`. In the `H = 0`, `χ = 1`
/// scope they are evaluable cochains at order `N`; otherwise the listing is
/// emit-only and refers to opaque classical representatives `b^r`.
///
/// `t0`, `g0`, `k`, `hbar_bar` and the restricted leading covector come from
/// the theorem layer; `restricted_leading` is `l⁰_{t⁰}` in `V̄₀^∨`.
pub fn build_basis_cocycles(
    data: &QuantumAHData,
    j: usize,
    t0: usize,
    shape: (usize, usize, usize),
    restricted_leading: &[GaussRat],
    order: usize,
) -> Result<CocycleListing> {
    let (g0, k, hbar_bar) = shape;
    let complement = complement_to_line(restricted_leading)?;
    let verified = data.ah.h.is_zero() && data.ah.chi.is_trivial();
    let mut out = CocycleListing { degree: j, verified_scope: verified, complement: complement.clone(), cocycles: Vec::new() };
    if j < k + 1 || j > k + g0 {
        return Ok(out);
    }
    let index_sets = subsets(g0.saturating_sub(1), j - k - 1);
    let tail = format!("φ_λ0^-1 · (exp(-Σ_{{m≥{t0}}} ħ^m π⟨l_m, λ0⟩) - 1) / ħ^{t0}");

    if !verified {
        for r in 1..=hbar_bar {
            for c in 0..t0 {
                for idx in &index_sets {
                    let b = match k {
                        0 => "1".to_string(),
                        1 => format!("(b^{r}_{{ρ(λ1)}} ∘ ρ ∘ T_λ0)"),
                        _ => format!("(b^{r}_{{ρ(λ1..λ{k})}} ∘ ρ ∘ T_λ0)"),
                    };
                    let a: Vec<String> = idx
                        .iter()
                        .enumerate()
                        .map(|(pos, i)| format!("⟨s^∨a^{i}, λ{}⟩", k + 1 + pos))
                        .collect();
                    let a = if a.is_empty() { "1".to_string() } else { a.join(" · ") };
                    out.cocycles.push(BasisCocycle {
                        hbar_power: c,
                        indices: idx.clone(),
                        b_index: r,
                        expression: format!("ħ^{c} · {b} · {a} · {tail}"),
                        cochain: None,
                    });
                }
            }
        }
        return Ok(out);
    }

    let phi = AutomorphyFactor::new(data, order + t0)?;
    let reduced = phi.reduced(t0);
    let lattice = data.lattice.clone();
    for c in 0..t0 {
        for idx in &index_sets {
            let covectors: Vec<Vec<GaussRat>> = idx.iter().map(|&i| complement[i - 1].clone()).collect();
            let a: Vec<String> = idx
                .iter()
                .zip(&covectors)
                .enumerate()
                .map(|(pos, (i, cv))| format!("⟨a^{i} = {}, λ{}⟩", covector_string(cv), pos + 1))
                .collect();
            let a = if a.is_empty() { "1".to_string() } else { a.join(" · ") };
            let (phi, reduced, lattice) = (phi.clone(), reduced.clone(), lattice.clone());
            let n = order + t0;
            let rule = move |pts: &[LatticePoint]| -> Result<ExpAffine> {
                let mut value = GaussRat::from_ints(1, 0);
                for (cv, p) in covectors.iter().zip(&pts[1..]) {
                    value = &value * &pairing(cv, &lattice.vector(p));
                }
                // Φ^{-1} − φ^{-1} = φ^{-1}·(exp(−Σ_{m≥t⁰} ħ^m π⟨l_m, λ₀⟩) − 1) for H = 0.
                let diff = phi.phi_inv(&pts[0]).sub(&reduced.phi_inv(&pts[0]));
                let scalar = HbarSeries::monomial(PiScalar::constant(value), c, n);
                diff.scale(&scalar).divide_hbar(t0)
            };
            out.cocycles.push(BasisCocycle {
                hbar_power: c,
                indices: idx.clone(),
                b_index: 1,
                expression: format!("ħ^{c} · {a} · {tail}"),
                cochain: Some(LatticeCochain::new(j, "explicit-basis-cocycle", rule)),
            });
        }
    }
    Ok(out)
}

/// `true` iff `δ^Φ ξ` vanishes at order `N` on all samples.
pub fn residual_vanishes(xi: &LatticeCochain, action: &ModuleAction, samples: &[Vec<LatticePoint>], order: usize) -> Result<bool> {
    let d = delta(xi, action);
    for s in samples {
        if !d.eval(s)?.truncate(order).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `δ^Φ`-residual check of every evaluable cocycle in a listing at order `N`
/// over `count` sampled tuples; `None` for emit-only entries.
pub fn verify_listing(data: &QuantumAHData, listing: &CocycleListing, order: usize, count: usize, seed: u64) -> Result<Vec<Option<bool>>> {
    let action = ModuleAction::Twisted(AutomorphyFactor::new(data, order)?);
    let samples = sample_tuples(data.lattice.rank(), listing.degree + 1, count, seed);
    listing
        .cocycles
        .iter()
        .map(|c| {
            c.cochain
                .as_ref()
                .map(|xi| {
                    let xi = xi.clone();
                    let truncated = LatticeCochain::new(xi.degree(), xi.tag().to_string(), move |p| Ok(xi.eval(p)?.truncate(order)));
                    residual_vanishes(&truncated, &action, &samples, order)
                })
                .transpose()
        })
        .collect()
}

/// Deterministic sample of `count` tuples of `size` lattice points with
/// coordinates in `[−3, 3]`.
pub fn sample_tuples(rank: usize, size: usize, count: usize, seed: u64) -> Vec<Vec<LatticePoint>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..size).map(|_| LatticePoint((0..rank).map(|_| rng.gen_range(-3..=3)).collect())).collect())
        .collect()
}
