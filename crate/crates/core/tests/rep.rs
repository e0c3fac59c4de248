use std::f64::consts::{FRAC_1_SQRT_2, PI};

use grouprg::group::{catalog_group, is_dedekind_structural};
use grouprg::rep::{
    self, closeness_bound, eigenphases, fourier_coefficient, half_sum_norm_check, irrep_catalog, is_mixing,
    is_mixing_element_level, ker_subrep_check, op_norm, parseval_residual, validate_irrep_set, CMatrix,
    GDistribution, Irrep, RepError,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

const CATALOG: &[&str] = &[
    "Z1", "Z2", "Z3", "Z4", "Z5", "Z8", "Q8", "D(3)", "D(4)", "D(5)", "D(6)", "S3", "Z2wrZ2", "UT3(3)", "Z2xZ3",
    "Q8xZ2", "Q8xZ3", "Z2^3", "Q8xZ2^2",
];

#[test]
fn catalog_sets_validate() {
    for name in CATALOG {
        let g = catalog_group(name).unwrap();
        let set = irrep_catalog(&g).unwrap();
        let r = validate_irrep_set(&g, &set);
        assert!(r.pass, "{name}: {r:?}");
        assert!(r.homomorphism < 1e-9 && r.unitarity < 1e-9, "{name}");
        assert_eq!(r.sum_dim_sq, g.order());
    }
}

#[test]
fn catalog_dimensions() {
    let dims = |n: &str| irrep_catalog(&catalog_group(n).unwrap()).unwrap().dims();
    assert_eq!(dims("Z2"), vec![1, 1]);
    assert_eq!(dims("Q8"), vec![1, 1, 1, 1, 2]);
    assert_eq!(dims("Z2xZ3"), vec![1; 6]);
    assert_eq!(dims("UT3(3)"), vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 3, 3]);
    assert!(matches!(irrep_catalog(&catalog_group("Q8").unwrap().with_name("mystery")), Err(RepError::NoCatalogEntry(_))));
}

#[test]
fn validator_detects_defects() {
    let g = catalog_group("Q8").unwrap();
    let mut set = irrep_catalog(&g).unwrap();
    let missing = set.irreps.pop().unwrap();
    let r = validate_irrep_set(&g, &set);
    assert!(!r.pass);
    assert_eq!(g.order() - r.sum_dim_sq, missing.dim * missing.dim);

    let mut set = irrep_catalog(&g).unwrap();
    let two = set.irreps.last_mut().unwrap();
    let j = g.find("j").unwrap();
    two.images[j] = two.images[j].transpose();
    let r = validate_irrep_set(&g, &set);
    assert!(r.homomorphism > 0.1);
    assert!(!r.pass);
}

#[test]
fn fourier_examples() {
    let g = catalog_group("Q8").unwrap();
    let set = irrep_catalog(&g).unwrap();
    let two = &set.irreps[4];
    let u = GDistribution::uniform(8);
    for rho in &set.irreps[1..] {
        assert!(fourier_coefficient(&u, rho).max_abs() < 1e-12);
    }
    let delta = GDistribution::point_mass(8, g.identity());
    assert!(fourier_coefficient(&delta, two).is_identity(1e-15));
    let pm = GDistribution::new((0..8).map(|x| if x < 2 { 0.5 } else { 0.0 }).collect()).unwrap();
    assert!(fourier_coefficient(&pm, two).max_abs() < 1e-15);
    assert!(GDistribution::new(vec![0.5, 0.6]).is_err());
}

#[test]
fn parseval_examples() {
    let z3 = catalog_group("Z3").unwrap();
    let s = irrep_catalog(&z3).unwrap();
    assert!(parseval_residual(&GDistribution::uniform(3), &s) < 1e-12);
    assert!(parseval_residual(&GDistribution::point_mass(3, 1), &s) < 1e-12);
    let q = irrep_catalog(&catalog_group("Q8").unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        assert!(parseval_residual(&GDistribution::random(8, &mut rng), &q) < 1e-9);
    }
}

#[test]
fn closeness_examples() {
    let z2 = irrep_catalog(&catalog_group("Z2").unwrap()).unwrap();
    let u = GDistribution::uniform(2);
    let same = closeness_bound(&u, &u, &z2).unwrap();
    assert_eq!((same.tv, same.bound), (0.0, 0.0));
    let r = closeness_bound(&GDistribution::point_mass(2, 0), &u, &z2).unwrap();
    assert!((r.tv - 0.5).abs() < 1e-15);
    assert!((r.max_gap - 1.0).abs() < 1e-12);
    assert!((r.bound - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn op_norm_examples() {
    for d in 1..=8 {
        assert!((op_norm(&CMatrix::identity(d)).unwrap() - 1.0).abs() < 1e-12);
    }
    let m = CMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)]);
    assert!((op_norm(&m).unwrap() - 1.0).abs() < 1e-12);
    let half = CMatrix::identity(2).add(&m).scale_re(0.5);
    assert!((op_norm(&half).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    assert_eq!(op_norm(&CMatrix::zeros(3)).unwrap(), 0.0);
    // a nilpotent Jordan block has norm 1 though every eigenvalue is 0
    let j = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]);
    assert!((op_norm(&j).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn eigenphase_examples() {
    assert_eq!(eigenphases(&CMatrix::identity(3)).unwrap(), vec![0.0; 3]);
    let phases = eigenphases(&CMatrix::identity(2).scale_re(-1.0)).unwrap();
    assert!(phases.iter().all(|t| (t - 0.5).abs() < 1e-12), "{phases:?}");
    let q = catalog_group("Q8").unwrap();
    let set = irrep_catalog(&q).unwrap();
    let phases = eigenphases(set.irreps[4].image(q.find("i").unwrap())).unwrap();
    assert!((phases[0] + 0.25).abs() < 1e-12 && (phases[1] - 0.25).abs() < 1e-12);
    let bad = CMatrix::identity(2).scale_re(2.0);
    assert!(matches!(eigenphases(&bad), Err(RepError::NotUnitary { .. })));
    // repeated eigenvalues in dimension 4
    let phases = eigenphases(&CMatrix::identity(4).scale(c(0.0, 1.0))).unwrap();
    assert!(phases.iter().all(|t| (t - 0.25).abs() < 1e-12), "{phases:?}");
}

#[test]
fn mixing_examples() {
    let verdict = |n: &str| is_mixing(&irrep_catalog(&catalog_group(n).unwrap()).unwrap()).unwrap();
    let q = verdict("Q8");
    assert!(q.mixing && (q.theta - 0.25).abs() < 1e-12);
    let s = verdict("S3");
    assert!(!s.mixing && s.theta == 0.0);
    for m in 2..=9 {
        let v = verdict(&format!("Z{m}"));
        assert!(v.mixing && (v.theta - 1.0 / m as f64).abs() < 1e-9, "Z{m}");
    }
    // the element-level reading rejects even Q8 and Z4
    for n in ["Q8", "Z4"] {
        let g = catalog_group(n).unwrap();
        assert!(!is_mixing_element_level(&irrep_catalog(&g).unwrap(), g.identity()).unwrap());
    }
}

#[test]
fn half_sum_examples() {
    let r = half_sum_norm_check(&CMatrix::scalar(c(-1.0, 0.0)), 0.5).unwrap();
    assert!(r.norm.abs() < 1e-12 && r.bound.abs() < 1e-12);
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let r = half_sum_norm_check(&CMatrix::diag(&[w, w.conj()]), 1.0 / 3.0).unwrap();
    assert!((r.norm - 0.5).abs() < 1e-12 && (r.bound - 0.5).abs() < 1e-12);
    let r = half_sum_norm_check(&CMatrix::diag(&[c(0.0, 1.0), c(0.0, -1.0)]), 0.25).unwrap();
    assert!((r.norm - FRAC_1_SQRT_2).abs() < 1e-12 && (r.bound - FRAC_1_SQRT_2).abs() < 1e-12 && r.pass);
    assert!(matches!(
        half_sum_norm_check(&CMatrix::diag(&[c(0.0, 1.0), c(1.0, 0.0)]), 0.25),
        Err(RepError::PhaseTooSmall { .. })
    ));
}

#[test]
fn ker_examples() {
    let check = |n: &str| ker_subrep_check(&irrep_catalog(&catalog_group(n).unwrap()).unwrap());
    assert!(check("Q8"));
    assert!(!check("S3"));
    assert!(check("Z6"));
    assert!(check("Z2^3"));
}

#[test]
fn mixing_ker_and_dedekind_agree() {
    for name in CATALOG {
        let g = catalog_group(name).unwrap();
        if g.order() > 32 {
            continue;
        }
        let set = irrep_catalog(&g).unwrap();
        let ded = is_dedekind_structural(&g).unwrap();
        assert_eq!(ker_subrep_check(&set), ded, "{name}");
        assert_eq!(is_mixing(&set).unwrap().mixing, ded, "{name}");
    }
}

#[test]
fn closeness_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in ["Q8", "S3", "Z5", "D(4)"] {
        let g = catalog_group(name).unwrap();
        let set = irrep_catalog(&g).unwrap();
        for _ in 0..200 {
            let x = GDistribution::random(g.order(), &mut rng);
            let y = GDistribution::random(g.order(), &mut rng);
            let r = closeness_bound(&x, &y, &set).unwrap();
            assert!(r.tv <= r.bound + 1e-9);
        }
    }
}

#[test]
fn irrep_json_round_trip() {
    let set = irrep_catalog(&catalog_group("Q8").unwrap()).unwrap();
    let back = rep::io::from_json(&rep::io::to_json(&set)).unwrap();
    assert_eq!(back, set);
}

/// Random unitary `U diag(e^{2 pi i t_j}) U*` with `|t_j| >= theta`.
fn clamped_unitary(rng: &mut ChaCha8Rng, d: usize, theta: f64) -> CMatrix {
    let phases: Vec<Complex64> = (0..d)
        .map(|_| {
            let mag = rng.gen_range(theta..=0.5);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            Complex64::from_polar(1.0, 2.0 * PI * sign * mag)
        })
        .collect();
    let u = random_unitary(rng, d);
    u.mul(&CMatrix::diag(&phases)).mul(&u.adjoint())
}

/// Gram–Schmidt on a random complex matrix.
fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for u in &cols {
            let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= ip * y);
        }
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    CMatrix::from_fn(d, |r, col| cols[col][r])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn half_sum_within_cosine(seed in any::<u64>(), d in 1usize..=4, theta in 0.01f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = clamped_unitary(&mut rng, d, theta);
        let r = half_sum_norm_check(&m, theta).unwrap();
        prop_assert!(r.pass, "{:?}", r);
    }

    #[test]
    fn op_norm_submultiplicative(seed in any::<u64>(), d in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rand_m = || CMatrix::from_fn(d, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let (a, b) = (rand_m(), rand_m());
        let (na, nb, nab) = (op_norm(&a).unwrap(), op_norm(&b).unwrap(), op_norm(&a.mul(&b)).unwrap());
        prop_assert!(nab <= na * nb + 1e-9);
        prop_assert!(a.frobenius_sq() <= d as f64 * na * na + 1e-9);
        prop_assert!(na * na <= a.frobenius_sq() + 1e-9);
    }

    #[test]
    fn eigenphases_of_diagonal_unitaries(ts in proptest::collection::vec(-0.4999f64..0.5, 1..=4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = ts.len();
        let u = random_unitary(&mut rng, d);
        let diag: Vec<Complex64> = ts.iter().map(|t| Complex64::from_polar(1.0, 2.0 * PI * t)).collect();
        let m = u.mul(&CMatrix::diag(&diag)).mul(&u.adjoint());
        let mut want = ts.clone();
        want.sort_by(f64::total_cmp);
        let got = eigenphases(&m).unwrap();
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-6, "{:?} vs {:?}", got, want);
        }
    }
}

#[test]
fn tensor_irreps_are_kronecker() {
    let z2 = irrep_catalog(&catalog_group("Z2").unwrap()).unwrap();
    let z3 = irrep_catalog(&catalog_group("Z3").unwrap()).unwrap();
    let prod = irrep_catalog(&catalog_group("Z2xZ3").unwrap()).unwrap();
    let k: Irrep = z2.irreps[1].kron(&z3.irreps[2]);
    assert_eq!(prod.irreps[5], k);
}
