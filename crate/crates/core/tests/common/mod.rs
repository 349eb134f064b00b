#![allow(dead_code)]

use std::collections::BTreeMap;

use abelia::exactalg::{GaussRat, HbarSeries, Matrix, PiScalar, Rational};
use abelia::moyal::{ExpAffine, PoissonBivector, QuantumAHData};
use abelia::torus::{ClassicalAHData, HermitianNS, PeriodLattice, Semicharacter};
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn gi(re: i64, im: i64) -> GaussRat {
    GaussRat::from_ints(re, im)
}

pub fn random_gauss(rng: &mut ChaCha8Rng, bound: i64) -> GaussRat {
    gi(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

/// Random covector whose entries at `support` are not all zero.
pub fn random_covector(rng: &mut ChaCha8Rng, g: usize, support: std::ops::Range<usize>) -> Vec<GaussRat> {
    loop {
        let v: Vec<GaussRat> =
            (0..g).map(|i| if support.contains(&i) { random_gauss(rng, 2) } else { GaussRat::int(0) }).collect();
        if v.iter().any(|c| c != &GaussRat::int(0)) {
            return v;
        }
    }
}

/// Standard-lattice data with `H = diag(d₁, …, d_c, 0, …, 0)` and `c = g − g₀`.
/// On the standard lattice `E(e_a, i·e_a) = −d_a`, so `h̄ = Π|d_a|` and `k` is the
/// number of negative `d_a`.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub g: usize,
    pub g0: usize,
    pub k: usize,
    pub hbar_bar: usize,
    pub t0: usize,
    pub data: QuantumAHData,
}

pub fn diagonal(g: usize, g0: usize, k: usize, hbar_bar: usize) -> Option<Vec<i64>> {
    let c = g - g0;
    if c < k || (c == 0 && hbar_bar != 1) {
        return None;
    }
    let mut d = vec![1i64; c];
    if c > 0 {
        d[0] = hbar_bar as i64;
    }
    for x in d.iter_mut().take(k) {
        *x = -*x;
    }
    d.extend(std::iter::repeat(0).take(g0));
    Some(d)
}

pub fn hermitian(diag: &[i64]) -> HermitianNS {
    let g = diag.len();
    let mut m = Matrix::zeros(g, g);
    for (i, &d) in diag.iter().enumerate() {
        m[(i, i)] = GaussRat::int(d);
    }
    HermitianNS::new(m)
}

/// `Π` supported on the kernel directions so that `HᵀΠH = 0`.
pub fn kernel_poisson(g: usize, g0: usize, rng: &mut ChaCha8Rng) -> PoissonBivector {
    let c = g - g0;
    if g0 >= 2 {
        PoissonBivector::elementary(g, c, c + 1, random_gauss(rng, 2))
    } else {
        PoissonBivector::zero(g)
    }
}

/// Adds `l_{t₀}` nonzero on the kernel and, when `t₀ = 2` and there is a
/// complement, an `l₁` invisible to the kernel (so `t < t₀`).
pub fn fixture(g: usize, g0: usize, k: usize, hbar_bar: usize, t0: usize, rng: &mut ChaCha8Rng) -> Option<Fixture> {
    let d = diagonal(g, g0, k, hbar_bar)?;
    let c = g - g0;
    let mut l_series = BTreeMap::new();
    l_series.insert(t0, random_covector(rng, g, c..g));
    if t0 > 1 && c > 0 {
        l_series.insert(1, random_covector(rng, g, 0..c));
    }
    let data = QuantumAHData {
        lattice: PeriodLattice::standard(g),
        ah: ClassicalAHData { h: hermitian(&d), chi: Semicharacter::trivial(2 * g) },
        l_series,
        poisson: kernel_poisson(g, g0, rng),
    };
    Some(Fixture { g, g0, k, hbar_bar, t0, data })
}

/// The full battery `g ≤ 4`, `g₀ ∈ 1..=g`, `k ∈ {0, 1}`, `h̄ ∈ {1, 2, 3}`, `t₀ ∈ {1, 2}`.
pub fn battery(rng: &mut ChaCha8Rng) -> Vec<Fixture> {
    let mut out = Vec::new();
    for g in 1..=4 {
        for g0 in 1..=g {
            for k in 0..=1 {
                for hbar_bar in 1..=3 {
                    for t0 in 1..=2 {
                        if let Some(f) = fixture(g, g0, k, hbar_bar, t0, rng) {
                            out.push(f);
                        }
                    }
                }
            }
        }
    }
    out
}

/// `H = 0`, `χ = 1`, `l(ħ) = ħ^t l_t`.
pub fn trivial_bundle(g: usize, t: usize, rng: &mut ChaCha8Rng) -> QuantumAHData {
    QuantumAHData {
        lattice: PeriodLattice::standard(g),
        ah: ClassicalAHData { h: HermitianNS::zero(g), chi: Semicharacter::trivial(2 * g) },
        l_series: BTreeMap::from([(t, random_covector(rng, g, 0..g))]),
        poisson: kernel_poisson(g, g, rng),
    }
}

/// A sum of one to three terms `c·v^m·exp(π a·v)` with small exact entries.
pub fn random_exp_affine(rng: &mut ChaCha8Rng, g: usize, order: usize) -> ExpAffine {
    let mut f = ExpAffine::zero(g, order);
    for _ in 0..rng.gen_range(1..=3) {
        let mono: Vec<u32> = (0..g).map(|_| rng.gen_range(0..=1)).collect();
        let linear: Vec<GaussRat> =
            (0..g).map(|_| if rng.gen_bool(0.5) { GaussRat::int(0) } else { random_gauss(rng, 1) }).collect();
        let coeff = HbarSeries::from_terms(
            (0..order).map(|k| if k < 2 { PiScalar::constant(random_gauss(rng, 2)) } else { PiScalar::zero() }).collect(),
        );
        let e = ExpAffine::exponential(linear, GaussRat::int(0), coeff);
        f = f.add(&ExpAffine::monomial(g, order, mono, PiScalar::one()).mul(&e));
    }
    f
}

pub fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}
