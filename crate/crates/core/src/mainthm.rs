//! Cohomology of deformed line bundles: the invariants `t` and `t⁰`, the
//! three-way case analysis, and cross-checks against the Smith and spectral
//! computations on the model Koszul complex.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactalg::{binom, complex_cohomology_over_pid, CohomologyModule, GaussRat, HbarPolyMatrix};
use crate::exterior::{wedge_matrix, KoszulHbarComplex};
use crate::spectral::{e_infinity, reconstruct_modules, tor_graded_dims, FilteredComplex};
use crate::torus::{classical_summary_with, degeneracy_subtorus_with, restrict_covector, ClassicalSummary, DegeneracyData};

pub use crate::moyal::QuantumAHData;

/// A natural number or `∞`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Valuation {
    Finite(usize),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(n) => Some(n),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == Valuation::Infinite
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(n) => write!(f, "{n}"),
            Valuation::Infinite => f.write_str("∞"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(n) => s.serialize_u64(*n as u64),
            Valuation::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Valuation::Finite(n as usize)),
            Raw::S(s) if s == "infinity" => Ok(Valuation::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("expected a natural number or \"infinity\", got {s:?}"))),
        }
    }
}

fn first_nonzero<'a>(series: impl Iterator<Item = (&'a usize, &'a Vec<GaussRat>)>) -> Valuation {
    series.filter(|(_, l)| l.iter().any(|c| !c.is_zero())).map(|(&m, _)| Valuation::Finite(m)).min().unwrap_or(Valuation::Infinite)
}

/// `t = min {m : l_m ≠ 0}`.
pub fn compute_t(data: &QuantumAHData) -> Valuation {
    first_nonzero(data.l_series.iter())
}

/// `t⁰ = min {m : l⁰_m ≠ 0}`.
pub fn compute_t0(data: &QuantumAHData) -> Result<Valuation> {
    Ok(Analysis::new(data)?.t0)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "vanishing (χ|Λ₀ ≠ 1)")]
    Vanishing,
    #[serde(rename = "free (l(ħ)⁰ = 0)")]
    Free,
    #[serde(rename = "constant deformation")]
    ConstantDeformation,
    #[serde(rename = "torsion")]
    Torsion,
}

impl CaseTag {
    pub fn label(self) -> &'static str {
        match self {
            CaseTag::Vanishing => "vanishing (χ|Λ₀ ≠ 1)",
            CaseTag::Free => "free (l(ħ)⁰ = 0)",
            CaseTag::ConstantDeformation => "constant deformation",
            CaseTag::Torsion => "torsion",
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Invariants {
    pub t: Valuation,
    pub t0: Valuation,
    pub g0: usize,
    pub k: usize,
    pub hbar_bar: usize,
}

/// Everything the formulas need, derived once from validated data.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub degeneracy: DegeneracyData,
    pub summary: ClassicalSummary,
    pub t: Valuation,
    pub t0: Valuation,
    /// `m ↦ l⁰_m`, nonzero entries only.
    pub restricted: BTreeMap<usize, Vec<GaussRat>>,
}

impl Analysis {
    pub fn new(data: &QuantumAHData) -> Result<Self> {
        Analysis::with_complement(data, None)
    }

    /// Uses the given complement to `V_{H,0}` instead of the echelon default.
    pub fn with_complement(data: &QuantumAHData, complement: Option<Vec<Vec<GaussRat>>>) -> Result<Self> {
        data.check()?;
        let degeneracy = degeneracy_subtorus_with(&data.ah.h, &data.lattice, complement)?;
        let summary = classical_summary_with(&data.ah, &data.lattice, &degeneracy)?;
        let restricted: BTreeMap<usize, Vec<GaussRat>> = data
            .l_series
            .iter()
            .map(|(&m, l)| (m, restrict_covector(l, &degeneracy)))
            .filter(|(_, l)| l.iter().any(|c| !c.is_zero()))
            .collect();
        let t0 = first_nonzero(restricted.iter());
        Ok(Analysis { degeneracy, summary, t: compute_t(data), t0, restricted })
    }

    pub fn case(&self) -> CaseTag {
        if !self.summary.chi_trivial_on_lambda0 {
            CaseTag::Vanishing
        } else if self.t.is_infinite() {
            CaseTag::ConstantDeformation
        } else if self.t0.is_infinite() {
            CaseTag::Free
        } else {
            CaseTag::Torsion
        }
    }

    pub fn invariants(&self) -> Invariants {
        Invariants { t: self.t, t0: self.t0, g0: self.summary.g0, k: self.summary.k, hbar_bar: self.summary.hbar_bar }
    }

    /// `l⁰_{t⁰}`.
    pub fn leading(&self) -> Option<&Vec<GaussRat>> {
        self.t0.finite().and_then(|t0| self.restricted.get(&t0))
    }

    /// `H^j` from the closed-form description.
    pub fn formula(&self, j: usize) -> Result<CohomologyModule> {
        let s = &self.summary;
        Ok(match self.case() {
            CaseTag::Vanishing => CohomologyModule::zero(),
            CaseTag::Free | CaseTag::ConstantDeformation => CohomologyModule::free(s.dims().get(j).copied().unwrap_or(0)),
            CaseTag::Torsion => {
                let t0 = self.t0.finite().expect("torsion case") as u32;
                let e = j as i64 - s.k as i64 - 1;
                if e < 0 || e as usize >= s.g0 {
                    return Ok(CohomologyModule::zero());
                }
                let lead = self.leading().expect("torsion case");
                let rank = wedge_matrix(lead, e as usize).rank();
                let closed = binom(s.g0 as i64 - 1, e);
                if rank != closed {
                    return Err(Error::Invalid(format!("rank of l⁰ ∧ on degree {e} is {rank}, expected {closed}")));
                }
                CohomologyModule::new(0, [(t0, rank * s.hbar_bar)])
            }
        })
    }

    /// Number of copies of the Koszul model (zero when `χ` is nontrivial on `Λ₀`).
    pub fn model_multiplicity(&self) -> usize {
        if self.summary.chi_trivial_on_lambda0 {
            self.summary.hbar_bar
        } else {
            0
        }
    }

    /// Koszul complex on `V̄₀^∨` with differential `l(ħ)⁰ ∧`, in degrees `k..=k + g₀`.
    pub fn model(&self) -> Result<ModelComplex> {
        Ok(ModelComplex {
            koszul: KoszulHbarComplex::new(self.summary.g0, self.restricted.clone())?,
            multiplicity: self.model_multiplicity(),
            shift: self.summary.k,
        })
    }
}

/// `h̄` copies of the Koszul complex of `l(ħ)⁰`, shifted up by `k`.
#[derive(Clone, Debug)]
pub struct ModelComplex {
    pub koszul: KoszulHbarComplex,
    pub multiplicity: usize,
    pub shift: usize,
}

impl ModelComplex {
    fn block(&self, d: &HbarPolyMatrix) -> HbarPolyMatrix {
        if self.multiplicity == 0 {
            return HbarPolyMatrix::zeros(0, 0);
        }
        (1..self.multiplicity).fold(d.clone(), |acc, _| acc.direct_sum(d))
    }

    /// Rank in absolute degree `j`.
    pub fn rank(&self, j: i64) -> usize {
        self.koszul.rank(j - self.shift as i64) * self.multiplicity
    }

    /// Differential from absolute degree `j`.
    pub fn differential(&self, j: i64) -> HbarPolyMatrix {
        let d = self.koszul.differential(j - self.shift as i64);
        let out = self.block(&d);
        if out.rows() == self.rank(j + 1) && out.cols() == self.rank(j) {
            out
        } else {
            HbarPolyMatrix::zeros(self.rank(j + 1), self.rank(j))
        }
    }

    /// `H^j` by Smith normal form.
    pub fn smith(&self, j: i64) -> Result<CohomologyModule> {
        complex_cohomology_over_pid(&self.differential(j - 1), &self.differential(j))
    }

    /// The `ħ`-adic filtration of the model reduced mod `ħ^n`.
    pub fn filtered(&self, n: usize) -> Result<FilteredComplex> {
        let lo = self.shift as i64;
        let hi = lo + self.koszul.dim() as i64;
        let ranks: Vec<usize> = (lo..=hi).map(|j| self.rank(j)).collect();
        let ds: Vec<HbarPolyMatrix> = (lo..hi).map(|j| self.differential(j)).collect();
        FilteredComplex::from_hbar_complex(lo, &ranks, &ds, n)
    }
}

/// `H^j(X, 𝓛)` for `j` in `0..=g`.
pub fn cohomology(data: &QuantumAHData, j: usize) -> Result<CohomologyModule> {
    Analysis::new(data)?.formula(j)
}

/// `H^j(X, 𝓛/ħ^s)`, a free `ℂ[ħ]/ħ^s`-module of rank `h^j(X, L)`, encoded as
/// `(ℂ[ħ]/ħ^s)^{h^j}`. `s` defaults to `t⁰`.
pub fn truncated_cohomology(data: &QuantumAHData, j: usize, s: Option<usize>) -> Result<CohomologyModule> {
    let a = Analysis::new(data)?;
    let t0 = a.t0.finite().ok_or(Error::InfiniteT0)?;
    let s = s.unwrap_or(t0);
    if s > t0 {
        return Err(Error::Scope(format!("truncation {s} exceeds t0 = {t0}")));
    }
    let h = a.summary.dims().get(j).copied().unwrap_or(0);
    Ok(CohomologyModule::new(0, [(s as u32, h)]))
}

/// Default truncation order: `t⁰ + 3`, or `3` when `t⁰ = ∞`.
pub fn default_order(t0: Valuation) -> usize {
    t0.finite().map_or(3, |t| t + 3)
}

/// Refuses orders that cannot separate torsion from truncation effects.
pub fn check_order(t0: Valuation, n: usize) -> Result<()> {
    match t0.finite() {
        Some(t) if n < t + 2 => Err(Error::TruncationTooSmall { order: n, minimum: t + 2 }),
        _ => Ok(()),
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DegreeComparison {
    pub degree: usize,
    pub formula: CohomologyModule,
    pub smith: CohomologyModule,
    pub spectral: CohomologyModule,
    /// `Σ_p dim E_∞^{p, j−p}` of the truncated model.
    pub e_infinity_total: usize,
    pub agree: bool,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub case: CaseTag,
    pub invariants: Invariants,
    pub hbar_order: usize,
    pub degeneration_page: usize,
    pub degrees: Vec<DegreeComparison>,
    pub agreement: bool,
    pub discrepancies: Vec<String>,
}

impl CohomologyReport {
    pub fn modules(&self) -> Vec<CohomologyModule> {
        self.degrees.iter().map(|d| d.formula.clone()).collect()
    }
}

#[derive(Clone, Debug, Default)]
pub struct CrossCheckOptions {
    pub order: Option<usize>,
    pub complement: Option<Vec<Vec<GaussRat>>>,
    /// Test hook: perturbs the closed-form answer in degree 0.
    pub corrupt_formula: bool,
}

/// Formula, Smith and spectral answers side by side at truncation order `N`.
pub fn cross_check(data: &QuantumAHData, order: Option<usize>) -> Result<CohomologyReport> {
    cross_check_with(data, &CrossCheckOptions { order, ..Default::default() })
}

pub fn cross_check_with(data: &QuantumAHData, opts: &CrossCheckOptions) -> Result<CohomologyReport> {
    let a = Analysis::with_complement(data, opts.complement.clone())?;
    let n = opts.order.unwrap_or_else(|| default_order(a.t0));
    check_order(a.t0, n)?;
    let model = a.model()?;
    let conv = e_infinity(&model.filtered(n)?)?;
    let spectral = reconstruct_modules(&conv.graded, n)?;
    let g = data.g();
    let mut degrees = Vec::with_capacity(g + 1);
    let mut discrepancies = Vec::new();
    for j in 0..=g {
        let mut formula = a.formula(j)?;
        if opts.corrupt_formula && j == 0 {
            formula = formula.direct_sum(&CohomologyModule::free(1));
        }
        let smith = model.smith(j as i64)?;
        let spec = spectral.get(&(j as i64)).cloned().unwrap_or_default();
        let e_infinity_total: usize = conv.graded.get(&(j as i64)).map_or(0, |v| v.iter().sum());
        let agree = formula == smith && smith == spec;
        if !agree {
            discrepancies.push(format!("H^{j}: formula {formula}, Smith {smith}, spectral {spec}"));
        }
        // Universal coefficients for the truncated complex.
        let next = model.smith(j as i64 + 1)?;
        let expected = smith.dim_truncated(n) + tor_graded_dims(&next, n).iter().sum::<usize>();
        if expected != e_infinity_total {
            discrepancies.push(format!("H^{j}: Σ E_∞ = {e_infinity_total}, truncated Smith predicts {expected}"));
        }
        if a.case() == CaseTag::Torsion {
            let (lo, hi) = (a.summary.k + 1, a.summary.k + a.summary.g0);
            if !formula.is_zero() && !(lo..=hi).contains(&j) {
                discrepancies.push(format!("H^{j} nonzero outside {lo}..={hi}"));
            }
        }
        degrees.push(DegreeComparison { degree: j, formula, smith, spectral: spec, e_infinity_total, agree });
    }
    Ok(CohomologyReport {
        case: a.case(),
        invariants: a.invariants(),
        hbar_order: n,
        degeneration_page: conv.degeneration_page,
        agreement: discrepancies.is_empty(),
        degrees,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::{rat, Matrix};
    use crate::moyal::PoissonBivector;
    use crate::torus::{ClassicalAHData, HermitianNS, PeriodLattice, Semicharacter};

    fn gi(re: i64, im: i64) -> GaussRat {
        GaussRat::from_ints(re, im)
    }

    fn v(xs: &[i64]) -> Vec<GaussRat> {
        xs.iter().map(|&x| GaussRat::int(x)).collect()
    }

    fn trivial(g: usize, series: Vec<(usize, Vec<GaussRat>)>) -> QuantumAHData {
        QuantumAHData {
            lattice: PeriodLattice::standard(g),
            ah: ClassicalAHData { h: HermitianNS::zero(g), chi: Semicharacter::trivial(2 * g) },
            l_series: series.into_iter().collect(),
            poisson: PoissonBivector::zero(g),
        }
    }

    fn diag10(series: Vec<(usize, Vec<GaussRat>)>, chi: Semicharacter) -> QuantumAHData {
        let mut m = Matrix::zeros(2, 2);
        m[(0, 0)] = gi(1, 0);
        QuantumAHData {
            lattice: PeriodLattice::standard(2),
            ah: ClassicalAHData { h: HermitianNS::new(m), chi },
            l_series: series.into_iter().collect(),
            poisson: PoissonBivector::zero(2),
        }
    }

    #[test]
    fn t_and_t0() {
        let empty = trivial(2, vec![]);
        assert_eq!(compute_t(&empty), Valuation::Infinite);
        assert_eq!(compute_t0(&empty).unwrap(), Valuation::Infinite);
        let d = trivial(2, vec![(2, v(&[1, 0]))]);
        assert_eq!((compute_t(&d), compute_t0(&d).unwrap()), (Valuation::Finite(2), Valuation::Finite(2)));
        let mixed = diag10(vec![(1, v(&[1, 0])), (2, v(&[0, 1]))], Semicharacter::trivial(4));
        assert_eq!((compute_t(&mixed), compute_t0(&mixed).unwrap()), (Valuation::Finite(1), Valuation::Finite(2)));
    }

    #[test]
    fn trivial_bundle_examples() {
        let d = trivial(2, vec![(1, v(&[1, 2]))]);
        let hs: Vec<_> = (0..=2).map(|j| cohomology(&d, j).unwrap()).collect();
        assert_eq!(hs, vec![CohomologyModule::zero(), CohomologyModule::new(0, [(1, 1)]), CohomologyModule::new(0, [(1, 1)])]);
        let d = trivial(3, vec![(3, v(&[0, 1, 1]))]);
        let dims: Vec<_> = (0..=3).map(|j| cohomology(&d, j).unwrap().dim_c().unwrap()).collect();
        assert_eq!(dims, vec![0, 3, 6, 3]);
        assert!((0..=3).all(|j| cohomology(&d, j).unwrap().torsion().all(|(a, _)| a == 3)));
    }

    #[test]
    fn degenerate_form_examples() {
        let d = diag10(vec![(1, v(&[1, 0])), (2, v(&[0, 1]))], Semicharacter::trivial(4));
        let a = Analysis::new(&d).unwrap();
        assert_eq!((a.summary.g0, a.summary.k, a.summary.hbar_bar), (1, 0, 1));
        assert_eq!(a.formula(0).unwrap(), CohomologyModule::zero());
        assert_eq!(a.formula(1).unwrap(), CohomologyModule::new(0, [(2, 1)]));
        assert_eq!(a.formula(2).unwrap(), CohomologyModule::zero());
        let free = diag10(vec![(1, v(&[1, 0]))], Semicharacter::trivial(4));
        let a = Analysis::new(&free).unwrap();
        assert_eq!(a.case(), CaseTag::Free);
        let ranks: Vec<_> = (0..=2).map(|j| a.formula(j).unwrap().free_rank()).collect();
        assert_eq!(ranks, vec![1, 1, 0]);
    }

    #[test]
    fn vanishing_case() {
        // Λ₀ is spanned by e₂ and i·e₂ (generators 1 and 3).
        let chi = Semicharacter::new(vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)]);
        let d = diag10(vec![(1, v(&[0, 1]))], chi);
        let r = cross_check(&d, None).unwrap();
        assert_eq!(r.case, CaseTag::Vanishing);
        assert!(r.agreement, "{:?}", r.discrepancies);
        assert!(r.degrees.iter().all(|x| x.formula.is_zero()));
    }

    #[test]
    fn cross_checks_agree() {
        let cases = vec![
            trivial(2, vec![(1, v(&[1, 2]))]),
            trivial(3, vec![(3, v(&[0, 1, 1]))]),
            trivial(2, vec![]),
            diag10(vec![(1, v(&[1, 0])), (2, v(&[0, 1]))], Semicharacter::trivial(4)),
            diag10(vec![(1, v(&[1, 0]))], Semicharacter::trivial(4)),
        ];
        for d in cases {
            let r = cross_check(&d, None).unwrap();
            assert!(r.agreement, "{:?}", r.discrepancies);
            if let Some(t0) = r.invariants.t0.finite() {
                assert_eq!(r.degeneration_page, t0 + 1);
            } else {
                assert_eq!(r.degeneration_page, 1);
            }
        }
    }

    #[test]
    fn guard_and_corruption() {
        let d = trivial(2, vec![(2, v(&[1, 0]))]);
        assert_eq!(cross_check(&d, Some(3)).unwrap_err(), Error::TruncationTooSmall { order: 3, minimum: 4 });
        let r = cross_check_with(&d, &CrossCheckOptions { corrupt_formula: true, ..Default::default() }).unwrap();
        assert!(!r.agreement);
    }

    #[test]
    fn truncated_contrast() {
        let d = trivial(2, vec![(2, v(&[1, 0]))]);
        let tr = truncated_cohomology(&d, 1, None).unwrap();
        assert_eq!(tr, CohomologyModule::new(0, [(2, 2)]));
        assert_eq!(tr.dim_c(), Some(4));
        assert_eq!(cohomology(&d, 1).unwrap().dim_c(), Some(2));
        let t1 = trivial(2, vec![(1, v(&[1, 0]))]);
        assert_eq!(truncated_cohomology(&t1, 1, None).unwrap().dim_c(), Some(2));
        assert_eq!(truncated_cohomology(&trivial(2, vec![]), 1, None).unwrap_err(), Error::InfiniteT0);
    }

    #[test]
    fn valuation_serde() {
        assert_eq!(serde_json::to_string(&Valuation::Infinite).unwrap(), "\"infinity\"");
        assert_eq!(serde_json::from_str::<Valuation>("4").unwrap(), Valuation::Finite(4));
        assert!(serde_json::from_str::<Valuation>("\"inf\"").is_err());
    }
}
