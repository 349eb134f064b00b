mod common;

use std::collections::BTreeMap;

use abelia::exactalg::{rat, CohomologyModule, GaussRat, HbarPoly, Matrix, Rational};
use abelia::exterior::{wedge, wedge_matrix, KoszulHbarComplex, MultiVector};
use abelia::input::{parse_scalar, scalar_to_json, InputDescription};
use abelia::spectral::{e_infinity, FilteredComplex};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = Rational> {
    (-30i64..30, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn gauss() -> impl Strategy<Value = GaussRat> {
    (rational(), rational()).prop_map(|(re, im)| GaussRat::new(re, im))
}

fn small_gauss() -> impl Strategy<Value = GaussRat> {
    (-3i64..=3, -3i64..=3).prop_map(|(a, b)| GaussRat::from_ints(a, b))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(prop::collection::vec(small_gauss(), cols), rows).prop_map(|r| Matrix::from_rows(r).unwrap())
}

fn covector(g: usize) -> impl Strategy<Value = Vec<GaussRat>> {
    prop::collection::vec(small_gauss(), g)
}

proptest! {
    #[test]
    fn gaussian_field_laws(a in gauss(), b in gauss(), c in gauss()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &a.conj(), GaussRat::real(a.norm_sqr()));
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), GaussRat::one());
        }
    }

    #[test]
    fn rank_nullity(m in (1usize..5, 1usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), m.cols());
        for k in &kernel {
            prop_assert!(m.mul_vec(k).unwrap().iter().all(Zero::is_zero));
        }
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn polynomial_division(a in prop::collection::vec(small_gauss(), 0..6), d in prop::collection::vec(small_gauss(), 1..4)) {
        let (a, d) = (HbarPoly::from_coeffs(a), HbarPoly::from_coeffs(d));
        prop_assume!(!d.is_zero());
        let (q, r) = a.div_rem(&d);
        prop_assert_eq!(q.mul(&d).add(&r), a);
        prop_assert!(r.is_zero() || r.degree() < d.degree());
    }

    #[test]
    fn wedge_is_graded_commutative(x in covector(4), y in covector(4), z in covector(4)) {
        let (x, y, z) = (MultiVector::vector(&x), MultiVector::vector(&y), MultiVector::vector(&z));
        let xy = wedge(&x, &y);
        prop_assert_eq!(xy.add(&wedge(&y, &x)).is_zero(), true);
        prop_assert_eq!(wedge(&xy, &z), wedge(&x, &wedge(&y, &z)));
        prop_assert!(wedge(&x, &x).is_zero());
    }

    #[test]
    fn koszul_squares_to_zero(l in covector(4), j in 0usize..3) {
        let d = wedge_matrix(&l, j + 1).mul(&wedge_matrix(&l, j)).unwrap();
        prop_assert!(d.is_zero());
    }

    /// `Σ_p dim E_∞^{p, n−p}` equals the dimension of the truncated cohomology.
    #[test]
    fn spectral_limit_has_the_right_size(
        l1 in covector(3), l2 in covector(3), n in 2usize..5,
    ) {
        let k = KoszulHbarComplex::new(3, BTreeMap::from([(1, l1), (2, l2)])).unwrap();
        let ranks: Vec<usize> = (0..=3).map(|j| k.rank(j)).collect();
        let ds: Vec<_> = (0..3).map(|j| k.differential(j)).collect();
        let c = FilteredComplex::from_hbar_complex(0, &ranks, &ds, n).unwrap();
        let conv = e_infinity(&c).unwrap();
        for j in 0..=3i64 {
            let total: usize = conv.graded.get(&j).map_or(0, |v| v.iter().sum());
            prop_assert_eq!(total, c.cohomology_dim(j));
        }
    }

    #[test]
    fn module_serde_round_trip(free in 0usize..4, torsion in prop::collection::vec((1u32..6, 1usize..4), 0..4)) {
        let m = CohomologyModule::new(free, torsion);
        let text = serde_json::to_string(&m).unwrap();
        prop_assert_eq!(serde_json::from_str::<CohomologyModule>(&text).unwrap(), m);
    }

    #[test]
    fn scalar_round_trip(z in gauss()) {
        prop_assert_eq!(parse_scalar(&scalar_to_json(&z), "$").unwrap(), z);
    }

    #[test]
    fn input_round_trip(
        g in 1usize..4,
        seed in any::<u64>(),
        order in prop::option::of(1usize..10),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut l_series = BTreeMap::new();
        l_series.insert(1 + (seed % 3) as usize, common::random_covector(&mut rng, g, 0..g));
        let input = InputDescription {
            g,
            lattice: None,
            hermitian: vec![vec![GaussRat::zero(); g]; g],
            chi: (0..2 * g).map(|i| rat(i as i64 % 3, 2)).collect(),
            poisson: None,
            l_series,
            hbar_order: order,
            seed: Some(seed),
        };
        prop_assert_eq!(InputDescription::parse(&input.to_json_string()).unwrap(), input);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn star_is_associative(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pi = abelia::moyal::PoissonBivector::elementary(2, 0, 1, common::random_gauss(&mut rng, 2));
        let f = common::random_exp_affine(&mut rng, 2, n);
        let g = common::random_exp_affine(&mut rng, 2, n);
        let h = common::random_exp_affine(&mut rng, 2, n);
        let left = f.star(&g, &pi, n).unwrap().star(&h, &pi, n).unwrap();
        let right = f.star(&g.star(&h, &pi, n).unwrap(), &pi, n).unwrap();
        prop_assert_eq!(left, right);
    }
}
