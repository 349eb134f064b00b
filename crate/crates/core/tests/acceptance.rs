//! Acceptance criteria, one line of output per criterion.
//!
//! Run with `cargo test -p abelia --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use abelia::exactalg::{binom, GaussRat, HbarSeries, Matrix, PiScalar};
use abelia::exterior::KoszulHbarComplex;
use abelia::groupcoh::{
    build_basis_cocycles, cup, delta, sample_tuples, twisted_action_check, verify_listing, ExtensionClass,
    LatticeCochain, ModuleAction, Pairing,
};
use abelia::mainthm::{cross_check, cross_check_with, truncated_cohomology, Analysis, CaseTag, CrossCheckOptions};
use abelia::moyal::{AutomorphyFactor, ExpAffine, PoissonBivector, QuantumAHData};
use abelia::spectral::{e_infinity, FilteredComplex};
use abelia::torus::{classical_dims, LatticePoint, Semicharacter};
use common::*;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: abelia::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point(rng: &mut ChaCha8Rng, rank: usize) -> LatticePoint {
    LatticePoint((0..rank).map(|_| rng.gen_range(-3..=3)).collect())
}

/// Formula, Smith and spectral modules agree and every degree has `dim_ℂ = expected(j)`.
fn three_way(data: &QuantumAHData, label: &str, expected: impl Fn(usize) -> usize) -> Result<usize, String> {
    let r = lib(cross_check(data, None))?;
    ensure(r.agreement, || format!("{label}: {:?}", r.discrepancies))?;
    for d in &r.degrees {
        let dims = [d.formula.dim_c(), d.smith.dim_c(), d.spectral.dim_c()];
        let want = Some(expected(d.degree));
        ensure(dims.iter().all(|x| *x == want), || format!("{label}: H^{} dims {dims:?}, want {want:?}", d.degree))?;
    }
    Ok(r.degeneration_page)
}

fn criterion_1() -> Check {
    let mut rng = rng(1);
    let mut count = 0;
    for g in 1..=5 {
        for t in 1..=3 {
            let data = trivial_bundle(g, t, &mut rng);
            three_way(&data, &format!("g={g} t={t}"), |j| t * binom(g as i64 - 1, j as i64 - 1))?;
            count += 1;
        }
    }
    Ok(format!("{count} trivial bundles"))
}

fn criterion_2() -> Check {
    let battery = battery(&mut rng(2));
    for f in &battery {
        let label = format!("g={} g0={} k={} h̄={} t0={}", f.g, f.g0, f.k, f.hbar_bar, f.t0);
        let a = lib(Analysis::new(&f.data))?;
        ensure(a.case() == CaseTag::Torsion, || format!("{label}: case {}", a.case()))?;
        let inv = a.invariants();
        ensure((inv.g0, inv.k, inv.hbar_bar) == (f.g0, f.k, f.hbar_bar), || format!("{label}: invariants {inv:?}"))?;
        three_way(&f.data, &label, |j| {
            let e = j as i64 - f.k as i64 - 1;
            let dim = f.t0 * binom(f.g0 as i64 - 1, e) * f.hbar_bar;
            if (f.k + 1..=f.k + f.g0).contains(&j) {
                dim
            } else {
                0
            }
        })?;
    }
    Ok(format!("{} fixtures", battery.len()))
}

fn criterion_3() -> Check {
    let battery = battery(&mut rng(3));
    for f in &battery {
        let dims = lib(classical_dims(&f.data.ah, &f.data.lattice))?;
        let want: Vec<usize> = (0..=f.g as i64).map(|j| f.hbar_bar * binom(f.g0 as i64, j - f.k as i64)).collect();
        ensure(dims == want, || format!("g={} g0={}: {dims:?} vs {want:?}", f.g, f.g0))?;
        let c = f.g - f.g0;
        for generator in [c, f.g + c] {
            let mut phases = vec![Zero::zero(); 2 * f.g];
            phases[generator] = num_rational::BigRational::from_integer(1.into());
            let mut ah = f.data.ah.clone();
            ah.chi = Semicharacter::new(phases);
            let dims = lib(classical_dims(&ah, &f.data.lattice))?;
            ensure(dims.iter().all(|&d| d == 0), || format!("χ = −1 on generator {generator}: {dims:?}"))?;
        }
    }
    Ok(format!("{} fixtures, two sign twists each", battery.len()))
}

fn criterion_4() -> Check {
    let mut rng = rng(4);
    let mut fixtures: Vec<(QuantumAHData, usize)> = battery(&mut rng).into_iter().map(|f| (f.data, f.t0)).collect();
    for g in 1..=3 {
        for t in 1..=3 {
            fixtures.push((trivial_bundle(g, t, &mut rng), t));
        }
    }
    for (data, t0) in &fixtures {
        let r = lib(cross_check(data, None))?;
        ensure(r.degeneration_page == t0 + 1, || format!("t0={t0}: degenerates at E_{}", r.degeneration_page))?;
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn random_poisson(rng: &mut ChaCha8Rng, g: usize) -> PoissonBivector {
    let mut m = Matrix::zeros(g, g);
    for a in 0..g {
        for b in a + 1..g {
            let c = random_gauss(rng, 2);
            m[(a, b)] = c.clone();
            m[(b, a)] = -c;
        }
    }
    PoissonBivector::new(m).expect("alternating")
}

fn criterion_5() -> Check {
    let mut rng = rng(5);
    for i in 0..200 {
        let g = 2 + i % 2;
        let n = rng.gen_range(1..=5);
        let pi = random_poisson(&mut rng, g);
        let [f, h, k] = [0; 3].map(|_| random_exp_affine(&mut rng, g, n));
        let left = lib(lib(f.star(&h, &pi, n))?.star(&k, &pi, n))?;
        let right = lib(f.star(&lib(h.star(&k, &pi, n))?, &pi, n))?;
        ensure(left == right, || format!("associativity fails on triple {i} (g={g}, N={n})"))?;
        let one = ExpAffine::one(g, n);
        ensure(lib(f.star(&one, &pi, n))? == f && lib(one.star(&f, &pi, n))? == f, || format!("unit fails on {i}"))?;
        if n >= 2 {
            let comm = lib(f.star(&h, &pi, n))?.sub(&lib(h.star(&f, &pi, n))?);
            let two = HbarSeries::constant(PiScalar::constant(GaussRat::int(2)), n);
            let expected = f.bracket(&h, &pi).scale(&two).shift_up(1);
            ensure(comm.eq_at(&expected, 2), || format!("commutator fails on {i}"))?;
        }
    }
    let mut fixtures: Vec<QuantumAHData> = battery(&mut rng).into_iter().filter(|f| f.g <= 3).map(|f| f.data).collect();
    fixtures.push(trivial_bundle(2, 1, &mut rng));
    for data in &fixtures {
        let phi = lib(AutomorphyFactor::new(data, 3))?;
        let rank = 2 * data.g();
        for _ in 0..50 {
            let (a, b) = (random_point(&mut rng, rank), random_point(&mut rng, rank));
            ensure(lib(phi.check_cocycle(&a, &b))?, || format!("Φ cocycle identity fails at {a:?}, {b:?}"))?;
        }
    }
    Ok(format!("200 triples, {} automorphy factors × 50 pairs", fixtures.len()))
}

/// `λ₁…λ_p ↦ Σ_r ⟨a_r, λ_r⟩·F_r + ⟨a_0, λ_1⟩²·F_0 + G`, a nonlinear test cochain.
fn random_cochain(rng: &mut ChaCha8Rng, data: &QuantumAHData, p: usize, order: usize) -> LatticeCochain {
    let g = data.g();
    let lattice = data.lattice.clone();
    let covectors: Vec<Vec<GaussRat>> = (0..=p).map(|_| random_covector(rng, g, 0..g)).collect();
    let values: Vec<ExpAffine> = (0..=p + 1).map(|_| random_exp_affine(rng, g, order)).collect();
    LatticeCochain::new(p, "random", move |pts| {
        let scalar = |c: GaussRat| HbarSeries::constant(PiScalar::constant(c), order);
        let mut out = values[p + 1].clone();
        for (r, pt) in pts.iter().enumerate() {
            let x = abelia::torus::pairing(&covectors[r], &lattice.vector(pt));
            out = out.add(&values[r].scale(&scalar(x)));
        }
        if let Some(first) = pts.first() {
            let x = abelia::torus::pairing(&covectors[p], &lattice.vector(first));
            out = out.add(&values[p].scale(&scalar(&x * &x)));
        }
        Ok(out)
    })
}

fn criterion_6() -> Check {
    let mut rng = rng(6);
    let order = 3;
    let mut fixtures = vec![trivial_bundle(2, 1, &mut rng)];
    for (g, g0, k, hb, t0) in [(2, 1, 0, 2, 2), (3, 2, 1, 2, 1), (2, 1, 1, 1, 1)] {
        fixtures.push(fixture(g, g0, k, hb, t0, &mut rng).expect("fixture").data);
    }
    let mut checked = 0;
    for data in &fixtures {
        let phi = lib(AutomorphyFactor::new(data, order))?;
        let twisted = ModuleAction::Twisted(phi.clone());
        let translation = ModuleAction::Translation(data.lattice.clone());
        let rank = 2 * data.g();
        let samples: Vec<_> = (0..30)
            .map(|_| (random_point(&mut rng, rank), random_point(&mut rng, rank), random_exp_affine(&mut rng, data.g(), order)))
            .collect();
        ensure(lib(twisted_action_check(&twisted, &samples))?, || "twisted action is not an action".into())?;
        for p in 0..=1 {
            let f = random_cochain(&mut rng, data, p, order);
            let dd = delta(&delta(&f, &twisted), &twisted);
            for pts in sample_tuples(rank, p + 2, 30, rng.gen()) {
                ensure(lib(dd.eval(&pts))?.is_zero(), || format!("δδ ≠ 0 in degree {p}"))?;
            }
            let g = random_cochain(&mut rng, data, 1, order);
            let pairing = Pairing::Star(data.poisson.clone());
            let lhs = delta(&cup(&f, &g, &twisted, &pairing), &twisted);
            let a = cup(&delta(&f, &translation), &g, &twisted, &pairing);
            let b = cup(&f, &delta(&g, &twisted), &twisted, &pairing);
            for pts in sample_tuples(rank, p + 2, 30, rng.gen()) {
                let (x, y) = (lib(a.eval(&pts))?, lib(b.eval(&pts))?);
                let rhs = if p % 2 == 0 { x.add(&y) } else { x.sub(&y) };
                ensure(lib(lhs.eval(&pts))? == rhs, || format!("Leibniz fails for p={p}"))?;
            }
            checked += 1;
        }
    }
    Ok(format!("{} fixtures, {checked} cochain pairs, 30 tuples each", fixtures.len()))
}

fn criterion_7() -> Check {
    let mut rng = rng(7);
    let mut total = 0;
    for g in 1..=3 {
        for t in 1..=2 {
            let data = trivial_bundle(g, t, &mut rng);
            let a = lib(Analysis::new(&data))?;
            let lead = a.leading().expect("finite t0").clone();
            let order = t + 2;
            for j in 0..=g {
                let listing = lib(build_basis_cocycles(&data, j, t, (g, 0, 1), &lead, order))?;
                let want = t * binom(g as i64 - 1, j as i64 - 1);
                ensure(listing.verified_scope, || "H = 0 listing not verified".into())?;
                ensure(listing.cocycles.len() == want, || format!("g={g} t={t} j={j}: {} cocycles", listing.cocycles.len()))?;
                let residuals = lib(verify_listing(&data, &listing, order, 30, rng.gen()))?;
                ensure(residuals.iter().all(|r| *r == Some(true)), || format!("g={g} t={t} j={j}: {residuals:?}"))?;
                total += want;
            }
        }
    }
    Ok(format!("{total} cocycles, residual 0 on 30 tuples each"))
}

fn criterion_8() -> Check {
    let mut rng = rng(8);
    let order = 2;
    let mut cases = 0;
    for (g, t) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
        let mut data = trivial_bundle(g, t, &mut rng);
        data.l_series.insert(t + 1, random_covector(&mut rng, g, 0..g));
        let lead = data.l_series[&t].clone();
        let alpha = lib(ExtensionClass::new(&data, Some(t), order))?;
        let n = alpha.lifted_order();
        let one = ExpAffine::one(g, n);
        for _ in 0..30 {
            let lambda = random_point(&mut rng, 2 * g);
            // On the standard lattice λ = n + i·m, and ⟨l, v⟩ = Σ lₐ v̄ₐ.
            let mut acc = GaussRat::int(0);
            for a in 0..g {
                let v = gi(lambda.0[a], lambda.0[g + a]);
                acc = &acc + &(&lead[a] * &v.conj());
            }
            let expected = ExpAffine::constant(g, HbarSeries::constant(PiScalar::monomial(-acc, 1), order));
            let got = lib(alpha.apply(&lambda, &one))?;
            ensure(got.eq_at(&expected, 1), || format!("reduction of a_λ(1) wrong at {lambda:?}"))?;
        }
        for p in 0..=1 {
            let xi = random_cochain(&mut rng, &data, p, n);
            let (full, simple) = (alpha.cup(&xi), alpha.cup_simplified(&xi));
            for pts in sample_tuples(2 * g, p + 1, 30, rng.gen()) {
                ensure(lib(full.eval(&pts))? == lib(simple.eval(&pts))?, || format!("cup forms differ (g={g}, t={t})"))?;
            }
        }
        cases += 1;
    }
    Ok(format!("{cases} bundles, 30 lattice points and 60 cup samples each"))
}

fn criterion_9() -> Check {
    let mut rng = rng(9);
    let (g, t0) = (2, 2);
    let data = trivial_bundle(g, t0, &mut rng);
    let h: Vec<usize> = (0..=g).map(|j| binom(g as i64, j as i64)).collect();
    let koszul = lib(KoszulHbarComplex::new(g, data.l_series.clone()))?;
    let ranks: Vec<usize> = (0..=g as i64).map(|j| koszul.rank(j)).collect();
    let ds: Vec<_> = (0..g as i64).map(|j| koszul.differential(j)).collect();
    for s in 1..=t0 {
        let c: FilteredComplex = lib(FilteredComplex::from_hbar_complex(0, &ranks, &ds, s))?;
        let conv = lib(e_infinity(&c))?;
        for j in 0..=g {
            let m = lib(truncated_cohomology(&data, j, Some(s)))?;
            let direct = c.cohomology_dim(j as i64);
            ensure(m.dim_c() == Some(s * h[j]) && direct == s * h[j], || format!("s={s} j={j}: {m}, direct {direct}"))?;
            let graded = conv.graded.get(&(j as i64)).cloned().unwrap_or_default();
            ensure(graded.iter().all(|&d| d == h[j]), || format!("s={s} j={j}: graded {graded:?}"))?;
        }
    }
    let full = lib(cross_check(&data, None))?;
    let (h1_full, h1_trunc) = (full.degrees[1].formula.dim_c(), lib(truncated_cohomology(&data, 1, None))?.dim_c());
    ensure(h1_full == Some(t0) && h1_trunc == Some(t0 * h[1]), || format!("contrast {h1_full:?} vs {h1_trunc:?}"))?;
    ensure(truncated_cohomology(&data, 1, Some(t0 + 1)).is_err(), || "s > t0 accepted".into())?;
    Ok(format!("h¹ = {}, H¹ = {} vs truncated {}", h[1], t0, t0 * h[1]))
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for _ in 0..2 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            let c = rng.gen_range(-1..=1);
            for row in u.iter_mut() {
                row[a] += c * row[b];
            }
        }
    }
    u
}

fn criterion_10() -> Check {
    let mut rng = rng(10);
    let battery = battery(&mut rng);
    let pick = |rng: &mut ChaCha8Rng| battery[rng.gen_range(0..battery.len())].clone();
    let baseline = |data: &QuantumAHData, n: Option<usize>| -> Result<_, String> {
        let r = lib(cross_check(data, n))?;
        ensure(r.agreement, || format!("{:?}", r.discrepancies))?;
        Ok(r.modules())
    };
    for _ in 0..20 {
        let f = pick(&mut rng);
        let c = f.g - f.g0;
        let base = baseline(&f.data, None)?;
        // Splitting: e_a plus a random kernel vector for each complement direction.
        let complement: Vec<Vec<GaussRat>> = (0..c)
            .map(|a| {
                let mut v = random_covector(&mut rng, f.g, c..f.g);
                v[a] = GaussRat::int(1);
                v
            })
            .collect();
        let opts = CrossCheckOptions { complement: Some(complement), ..Default::default() };
        let r = lib(cross_check_with(&f.data, &opts))?;
        ensure(r.agreement && r.modules() == base, || "complement changes the answer".into())?;
        // Lattice basis.
        let u = random_unimodular(&mut rng, 2 * f.g);
        let e = f.data.ah.h.integral_form(&f.data.lattice).expect("integral");
        let mut moved = f.data.clone();
        moved.lattice = lib(f.data.lattice.change_basis(&u))?;
        moved.ah.chi = f.data.ah.chi.change_basis(&e, &u);
        ensure(baseline(&moved, None)? == base, || "lattice basis changes the answer".into())?;
        // Higher terms.
        let mut higher = f.data.clone();
        for m in f.t0 + 1..=f.t0 + 2 {
            higher.l_series.insert(m, random_covector(&mut rng, f.g, 0..f.g));
        }
        ensure(baseline(&higher, None)? == base, || "higher terms change the answer".into())?;
        // Truncation order.
        for n in f.t0 + 2..=f.t0 + 5 {
            ensure(baseline(&f.data, Some(n))? == base, || format!("N = {n} changes the answer"))?;
        }
    }
    Ok("20 perturbations of each kind".into())
}

struct Criterion {
    description: &'static str,
    budget: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { description: "trivial bundles: three-way agreement", budget: Some(Duration::from_secs(5)), run: criterion_1 },
        Criterion { description: "degenerate battery: three-way agreement", budget: Some(Duration::from_secs(10)), run: criterion_2 },
        Criterion { description: "classical dimensions and sign twists", budget: None, run: criterion_3 },
        Criterion { description: "degeneration page t0 + 1", budget: None, run: criterion_4 },
        Criterion { description: "star product and automorphy factor", budget: Some(Duration::from_secs(30)), run: criterion_5 },
        Criterion { description: "twisted action, δδ = 0, Leibniz", budget: None, run: criterion_6 },
        Criterion { description: "explicit cocycles", budget: None, run: criterion_7 },
        Criterion { description: "extension class reduction and cup", budget: None, run: criterion_8 },
        Criterion { description: "truncated cohomology contrast", budget: None, run: criterion_9 },
        Criterion { description: "robustness under perturbation", budget: None, run: criterion_10 },
    ];
    let filter: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let n = i + 1;
        if filter.is_some_and(|f| f != n) {
            continue;
        }
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let over = c.budget.filter(|b| elapsed > *b);
        let (status, detail) = match (&result, over) {
            (Ok(d), None) => ("PASS", d.clone()),
            (Ok(d), Some(b)) => ("FAIL", format!("{d}; over the {:.0}s budget", b.as_secs_f64())),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {n:>2}: {status} ({:.2}s) {} [{detail}]", elapsed.as_secs_f64(), c.description);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
