//! Finitely generated modules over `ℂ[[ħ]]` and the cohomology of
//! polynomial cochain complexes, localized at `(ħ)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::hbarpoly::{smith_normal_form, HbarPolyMatrix};
use crate::error::{Error, Result};

/// Isomorphism class of a finitely generated `ℂ[[ħ]]`-module: free rank plus
/// a multiset of torsion exponents stored as `(exponent, multiplicity)`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawModule", into = "RawModule")]
pub struct CohomologyModule {
    free_rank: usize,
    torsion: BTreeMap<u32, usize>,
}

#[derive(Serialize, Deserialize)]
struct RawModule {
    free_rank: usize,
    torsion: Vec<(u32, usize)>,
}

impl TryFrom<RawModule> for CohomologyModule {
    type Error = Error;

    fn try_from(raw: RawModule) -> Result<Self> {
        if raw.torsion.iter().any(|&(a, m)| a == 0 || m == 0) {
            return Err(Error::Invalid("torsion exponents and multiplicities must be positive".into()));
        }
        Ok(CohomologyModule::new(raw.free_rank, raw.torsion))
    }
}

impl From<CohomologyModule> for RawModule {
    fn from(m: CohomologyModule) -> Self {
        RawModule { free_rank: m.free_rank, torsion: m.torsion.into_iter().collect() }
    }
}

impl CohomologyModule {
    /// Pairs with zero exponent or multiplicity are dropped.
    pub fn new(free_rank: usize, torsion: impl IntoIterator<Item = (u32, usize)>) -> Self {
        let mut map = BTreeMap::new();
        for (a, m) in torsion {
            if a > 0 && m > 0 {
                *map.entry(a).or_insert(0) += m;
            }
        }
        CohomologyModule { free_rank, torsion: map }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        CohomologyModule::new(rank, [])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> impl Iterator<Item = (u32, usize)> + '_ {
        self.torsion.iter().map(|(&a, &m)| (a, m))
    }

    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn max_exponent(&self) -> Option<u32> {
        self.torsion.keys().next_back().copied()
    }

    /// `dim_ℂ (M / ħ^N M)`.
    pub fn dim_truncated(&self, n: usize) -> usize {
        self.free_rank * n + self.torsion().map(|(a, m)| (a as usize).min(n) * m).sum::<usize>()
    }

    /// `dim_ℂ M`, or `None` when there is a free part.
    pub fn dim_c(&self) -> Option<usize> {
        (self.free_rank == 0).then(|| self.torsion().map(|(a, m)| a as usize * m).sum())
    }

    /// Direct sum of `m` copies.
    pub fn times(&self, m: usize) -> Self {
        CohomologyModule::new(self.free_rank * m, self.torsion().map(|(a, k)| (a, k * m)))
    }

    pub fn direct_sum(&self, o: &CohomologyModule) -> Self {
        CohomologyModule::new(self.free_rank + o.free_rank, self.torsion().chain(o.torsion()))
    }

    /// `ℂ[[ħ]]^2 ⊕ (ℂ[ħ]/ħ^3)^2` style description; `0` for the zero module.
    pub fn structure(&self) -> String {
        let mut parts = Vec::new();
        if self.free_rank == 1 {
            parts.push("ℂ[[ħ]]".to_string());
        } else if self.free_rank > 1 {
            parts.push(format!("ℂ[[ħ]]^{}", self.free_rank));
        }
        for (a, m) in self.torsion() {
            let base = if a == 1 { "ℂ[ħ]/ħ".to_string() } else { format!("ℂ[ħ]/ħ^{a}") };
            parts.push(if m == 1 { base } else { format!("({base})^{m}") });
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" ⊕ ")
        }
    }
}

impl fmt::Display for CohomologyModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.structure())
    }
}

impl fmt::Debug for CohomologyModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CohomologyModule({})", self.structure())
    }
}

/// `ker(d_next) / im(d_prev)` over `ℚ(i)[ħ]`, keeping only the `ħ`-primary part.
pub fn complex_cohomology_over_pid(d_prev: &HbarPolyMatrix, d_next: &HbarPolyMatrix) -> Result<CohomologyModule> {
    let m = d_prev.rows();
    if d_next.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "d_prev lands in rank {m}, d_next starts from rank {}",
            d_next.cols()
        )));
    }
    if !d_next.mul(d_prev)?.is_zero() {
        return Err(Error::CompositionNonzero("d_next · d_prev".into()));
    }
    let s = smith_normal_form(d_next);
    let r = s.rank();
    // In coordinates y = W·x the kernel is {y : y_0 = … = y_{r−1} = 0}.
    let b = s.w.mul(d_prev)?.rows_from(r);
    let sb = smith_normal_form(&b);
    let factors = sb.invariant_factors();
    let free = (m - r) - factors.len();
    let torsion = factors.iter().filter_map(|f| f.valuation()).filter(|&a| a > 0).map(|a| (a as u32, 1));
    Ok(CohomologyModule::new(free, torsion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::hbarpoly::HbarPoly;
    use crate::exactalg::GaussRat;
    use num_traits::Zero;

    fn hp(coeffs: &[i64]) -> HbarPoly {
        HbarPoly::from_coeffs(coeffs.iter().map(|&c| GaussRat::int(c)).collect())
    }

    #[test]
    fn cokernel_of_hbar() {
        let d_prev = HbarPolyMatrix::from_rows(vec![vec![hp(&[0, 1])]]).unwrap();
        let d_next = HbarPolyMatrix::zeros(0, 1);
        let h = complex_cohomology_over_pid(&d_prev, &d_next).unwrap();
        assert_eq!(h, CohomologyModule::new(0, [(1, 1)]));
    }

    #[test]
    fn zero_differentials() {
        let h = complex_cohomology_over_pid(&HbarPolyMatrix::zeros(3, 0), &HbarPolyMatrix::zeros(0, 3)).unwrap();
        assert_eq!(h, CohomologyModule::free(3));
    }

    #[test]
    fn prime_to_hbar_torsion_is_discarded() {
        let d_prev = HbarPolyMatrix::from_rows(vec![vec![hp(&[0, 1, 1])]]).unwrap();
        let h = complex_cohomology_over_pid(&d_prev, &HbarPolyMatrix::zeros(0, 1)).unwrap();
        assert_eq!(h, CohomologyModule::new(0, [(1, 1)]));
    }

    #[test]
    fn kernel_row_into_rank_two() {
        // C⁰ = 0 → C¹ = R² --[ħ, 0]--> C² = R: H¹ = ker = R (second basis vector).
        let d_next = HbarPolyMatrix::from_rows(vec![vec![hp(&[0, 1]), HbarPoly::zero()]]).unwrap();
        let h1 = complex_cohomology_over_pid(&HbarPolyMatrix::zeros(2, 0), &d_next).unwrap();
        assert_eq!(h1, CohomologyModule::free(1));
        let h2 = complex_cohomology_over_pid(&d_next, &HbarPolyMatrix::zeros(0, 1)).unwrap();
        assert_eq!(h2, CohomologyModule::new(0, [(1, 1)]));
    }

    #[test]
    fn composition_check() {
        let a = HbarPolyMatrix::from_rows(vec![vec![hp(&[1])]]).unwrap();
        assert!(matches!(complex_cohomology_over_pid(&a, &a), Err(Error::CompositionNonzero(_))));
    }

    #[test]
    fn structure_strings() {
        assert_eq!(CohomologyModule::zero().structure(), "0");
        assert_eq!(CohomologyModule::new(0, [(1, 1)]).structure(), "ℂ[ħ]/ħ");
        assert_eq!(CohomologyModule::new(2, [(3, 2)]).structure(), "ℂ[[ħ]]^2 ⊕ (ℂ[ħ]/ħ^3)^2");
        assert_eq!(CohomologyModule::new(0, [(2, 3)]).dim_c(), Some(6));
        assert_eq!(CohomologyModule::free(1).dim_c(), None);
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let m = CohomologyModule::new(1, [(2, 1), (1, 3)]);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"free_rank":1,"torsion":[[1,3],[2,1]]}"#);
        assert_eq!(serde_json::from_str::<CohomologyModule>(&s).unwrap(), m);
        assert!(serde_json::from_str::<CohomologyModule>(r#"{"free_rank":0,"torsion":[[0,1]]}"#).is_err());
    }
}
