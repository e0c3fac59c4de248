use grouprg::group::catalog_group;
use grouprg::models::*;
use grouprg::randomness::{small_bias_f2, uniform};
use grouprg::rep::{fourier_coefficient, irrep_catalog, is_mixing, op_norm, CMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q8() -> grouprg::FiniteGroup {
    catalog_group("Q8").unwrap()
}

fn bits(idx: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| (idx >> i & 1) as u8).collect()
}

fn block_instance(group: &str, n: usize, l: usize, w: usize, q: usize, seed: u64) -> BlockProduct {
    random_instance(InstanceKind::Block, &catalog_group(group).unwrap(), n, l, w, q, seed, InstanceOptions::default()).unwrap()
}

#[test]
fn eval_examples() {
    let g = q8();
    let e = g.identity();
    let f = BlockProduct::program(g.clone(), &[e, e, e]).unwrap();
    for x in 0..8 {
        assert_eq!(f.eval(&bits(x, 3)).unwrap(), e);
    }
    let z2 = catalog_group("Z2").unwrap();
    let parity = BlockProduct::program(z2, &[1; 5]).unwrap();
    for x in 0..32u64 {
        assert_eq!(parity.eval(&bits(x, 5)).unwrap(), (x.count_ones() % 2) as usize);
    }
    let (i, j, k) = (g.find("i").unwrap(), g.find("j").unwrap(), g.find("k").unwrap());
    let f = BlockProduct::program(g, &[i, j]).unwrap();
    assert_eq!(f.eval(&[1, 1]).unwrap(), k);
    assert_eq!(f.eval(&[1]).unwrap_err(), ModelError::LengthMismatch { expected: 2, got: 1 });
}

#[test]
fn spill_is_multiplied_at_its_position() {
    let g = q8();
    let (i, j) = (g.find("i").unwrap(), g.find("j").unwrap());
    let blocks = vec![Block { indices: vec![0], truth_table: vec![0, 1], base: i }];
    // spill reads x1 and yields j when it is 1
    let spill = |position| vec![SpillPart { position, indices: vec![1], values: vec![g.identity(), j] }];
    let front = BlockProduct::new(g.clone(), 2, blocks.clone(), spill(0)).unwrap();
    let back = BlockProduct::new(g.clone(), 2, blocks, spill(1)).unwrap();
    assert_eq!(front.eval(&[1, 1]).unwrap(), g.mul(j, i));
    assert_eq!(back.eval(&[1, 1]).unwrap(), g.mul(i, j));
}

#[test]
fn invalid_products_are_rejected() {
    let g = q8();
    let b = |indices: Vec<usize>| Block { truth_table: vec![0; 1 << indices.len()], indices, base: 1 };
    assert!(BlockProduct::new(g.clone(), 3, vec![b(vec![0, 1]), b(vec![1])], vec![]).is_err());
    assert!(BlockProduct::new(g.clone(), 3, vec![b(vec![3])], vec![]).is_err());
    let bad = Block { indices: vec![0], truth_table: vec![0, 1, 1], base: 1 };
    assert!(BlockProduct::new(g, 3, vec![bad], vec![]).is_err());
}

#[test]
fn exact_distribution_examples() {
    let z2 = catalog_group("Z2").unwrap();
    for n in 1..6 {
        let f = BlockProduct::program(z2.clone(), &vec![1; n]).unwrap();
        let d = exact_output_distribution(&f, InputDist::Uniform).unwrap();
        assert!((d.probs()[0] - 0.5).abs() < 1e-15);
    }
    let g = q8();
    let i = g.find("i").unwrap();
    let f = BlockProduct::program(g.clone(), &[i, i]).unwrap();
    let d = exact_output_distribution(&f, InputDist::Uniform).unwrap();
    assert!((d.probs()[g.find("1").unwrap()] - 0.25).abs() < 1e-15);
    assert!((d.probs()[i] - 0.5).abs() < 1e-15);
    assert!((d.probs()[g.find("-1").unwrap()] - 0.25).abs() < 1e-15);

    let f = block_instance("Q8", 10, 3, 2, 3, 7);
    let a = exact_output_distribution(&f, InputDist::Uniform).unwrap();
    let b = exact_output_distribution(&f, InputDist::Sampler(&uniform(10))).unwrap();
    assert!(a.tv(&b) < 1e-12);
    // brute force over all inputs
    let mut c = vec![0.0; 8];
    for x in 0..1024 {
        c[f.eval_index(x)] += 1.0 / 1024.0;
    }
    assert!(a.probs().iter().zip(&c).all(|(p, q)| (p - q).abs() < 1e-12));
}

#[test]
fn sampler_distribution_matches_seed_enumeration() {
    let f = block_instance("D(4)", 12, 4, 2, 2, 3);
    let s = small_bias_f2(12, 0.05).unwrap();
    let fast = exact_output_distribution(&f, InputDist::Sampler(&s)).unwrap();
    let mut counts = vec![0.0; 8];
    let total = s.seed_space();
    for a in 0..s.shape()[0] {
        for b in 0..s.shape()[1] {
            counts[f.eval(&s.sample(&[a, b])).unwrap()] += 1.0 / total;
        }
    }
    assert!(fast.probs().iter().zip(&counts).all(|(p, q)| (p - q).abs() < 1e-12));
}

#[test]
fn exact_bias_examples() {
    let g = q8();
    let set = irrep_catalog(&g).unwrap();
    let rho = set.irreps.iter().find(|r| r.dim == 2).unwrap();
    let minus = g.find("-1").unwrap();
    let i = g.find("i").unwrap();
    let f = BlockProduct::program(g.clone(), &[minus]).unwrap();
    assert!(op_norm(&exact_bias(&f, rho)).unwrap() < 1e-12);
    let f = BlockProduct::program(g.clone(), &[i]).unwrap();
    assert!((op_norm(&exact_bias(&f, rho)).unwrap() - 0.5f64.sqrt()).abs() < 1e-9);
    for t in 1..8 {
        let f = BlockProduct::program(g.clone(), &vec![i; t]).unwrap();
        assert!(op_norm(&exact_bias(&f, rho)).unwrap() <= 0.5f64.sqrt().powi(t as i32) + 1e-12);
    }
}

#[test]
fn exact_bias_matches_fourier_coefficient() {
    for (name, seed) in [("Q8", 1), ("D(4)", 2), ("Z2wrZ2", 3), ("S3", 4), ("UT3(3)", 5), ("Z9", 6)] {
        let g = catalog_group(name).unwrap();
        let set = irrep_catalog(&g).unwrap();
        for s in 0..5 {
            let f = block_instance(name, 14, 4, 2, 3, seed * 100 + s);
            let d = exact_output_distribution(&f, InputDist::Uniform).unwrap();
            for rho in &set.irreps {
                let a = exact_bias(&f, rho);
                let b = fourier_coefficient(&d, rho).conj();
                assert!(a.max_abs_diff(&b) < 1e-9, "{name}");
            }
        }
    }
}

#[test]
fn restrict_examples() {
    let f = block_instance("Q8", 9, 3, 2, 2, 11);
    let ones = Restriction::new(vec![0; 9], vec![1; 9]).unwrap();
    let (g, stats) = restrict(&f, &ones, true).unwrap();
    for x in 0..512 {
        assert_eq!(g.eval_index(x), f.eval_index(x));
    }
    assert_eq!(stats.j_multi, 3);

    let d: Vec<u8> = vec![1, 0, 1, 1, 0, 0, 1, 0, 1];
    let zeros = Restriction::new(d.clone(), vec![0; 9]).unwrap();
    let (g, stats) = restrict(&f, &zeros, false).unwrap();
    assert_eq!(stats.constant + stats.dead, 3);
    let target = f.eval(&d).unwrap();
    for x in 0..512 {
        assert_eq!(g.eval_index(x), target);
    }

    // AND(x0, x1) with x1 fixed to 1 and x0 free
    let q = q8();
    let and = Block { indices: vec![0, 1], truth_table: vec![0, 0, 0, 1], base: q.find("i").unwrap() };
    let f = BlockProduct::new(q, 2, vec![and], vec![]).unwrap();
    let r = Restriction::new(vec![0, 1], vec![1, 0]).unwrap();
    let (g, stats) = restrict(&f, &r, false).unwrap();
    assert_eq!(g.blocks()[0].indices, vec![0]);
    assert_eq!(g.blocks()[0].truth_table, vec![0, 1]);
    assert_eq!(stats.j1, 1);
}

#[test]
fn restriction_commutes_with_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, n, l, w, q) in [("Q8", 14, 4, 3, 2), ("S3", 12, 5, 2, 1), ("D(4)", 14, 6, 2, 2), ("Z2wrZ2", 10, 2, 3, 3)] {
        for s in 0..4 {
            let f = block_instance(name, n, l, w, q, s);
            for _ in 0..3 {
                let d: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
                let t: Vec<u8> = (0..n).map(|_| rng.gen_bool(0.4) as u8).collect();
                let r = Restriction::new(d, t).unwrap();
                for keep in [false, true] {
                    let (g, st) = restrict(&f, &r, keep).unwrap();
                    assert_eq!(st.j1 + st.j_multi + st.constant + st.dead, f.len());
                    for x in 0..1u64 << n {
                        let xb = bits(x, n);
                        assert_eq!(g.eval(&xb).unwrap(), f.eval(&r.apply(&xb)).unwrap());
                    }
                    if !keep {
                        assert!(g.width() <= 1);
                        assert_eq!(g.spill_size(), st.q.len() + st.spill_free);
                    }
                }
            }
        }
    }
}

#[test]
fn read_once_translation() {
    let monos = vec![Monomial { coeff: 1, vars: vec![0] }, Monomial { coeff: 2, vars: vec![1, 2] }];
    let t = from_read_once_polynomial(3, &monos, 3, 2).unwrap();
    let widths: Vec<usize> = t.product.blocks().iter().map(|b| b.width()).collect();
    assert_eq!(widths, vec![1, 2]);
    assert!(t.dropped.is_empty());
    for x in 0..8u64 {
        let xb = bits(x, 3);
        assert_eq!(t.product.eval(&xb).unwrap(), (xb[0] as usize + 2 * (xb[1] * xb[2]) as usize) % 3);
    }

    let zero = from_read_once_polynomial(4, &[], 5, 2).unwrap();
    assert!((0..16).all(|x| zero.product.eval_index(x) == 0));

    let bad = vec![Monomial { coeff: 1, vars: vec![0, 1] }, Monomial { coeff: 1, vars: vec![1] }];
    assert_eq!(from_read_once_polynomial(3, &bad, 3, 2).unwrap_err(), ModelError::NotReadOnce { var: 1 });
}

#[test]
fn dropped_monomials_cost_little() {
    for n in [4, 8, 12] {
        for tau in 1..n {
            let mono = Monomial { coeff: 1, vars: (0..=tau).collect() };
            let t = from_read_once_polynomial(n, &[mono], 2, tau).unwrap();
            assert_eq!(t.product.len(), 0);
            assert_eq!(t.dropped.len(), 1);
            // exhaustive distance between the original and the translation
            let differ = (0..1u64 << n).filter(|&x| (x & ((1 << (tau + 1)) - 1)) == (1 << (tau + 1)) - 1).count();
            let delta = differ as f64 / (1u64 << n) as f64;
            assert!(delta <= (0.5f64).powi(tau as i32 + 1) + 1e-15);
        }
    }
}

#[test]
fn random_instances() {
    let g = q8();
    let opts = InstanceOptions::default();
    let a = random_instance(InstanceKind::Block, &g, 12, 3, 3, 2, 5, opts).unwrap();
    let b = random_instance(InstanceKind::Block, &g, 12, 3, 3, 2, 5, opts).unwrap();
    assert_eq!(a, b);
    assert!(a.blocks().iter().all(|b| b.base != g.identity() && !b.is_constant()));
    assert_eq!(a.spill_size(), 2);
    let err = random_instance(InstanceKind::Block, &g, 10, 3, 3, 2, 5, opts).unwrap_err();
    assert!(matches!(err, ModelError::InfeasiblePartition { .. }));
    let p = random_instance(InstanceKind::Program, &g, 6, 6, 1, 0, 1, opts).unwrap();
    assert!(p.is_program());
    let same = random_instance(InstanceKind::Block, &g, 6, 6, 1, 0, 1, InstanceOptions { include_constant: false, include_identity: false }).unwrap();
    assert_eq!(same.width(), 1);
}

#[test]
fn json_round_trip() {
    for name in ["Q8", "Z2wrZ2", "Z4xZ2"] {
        let f = block_instance(name, 10, 2, 3, 2, 1);
        let text = io::to_json(&f);
        assert!(text.contains("truth_table"));
        let back = io::from_json(&text).unwrap();
        assert_eq!(back, f);
    }
}

/// op-norm of `(1 - beta) I + beta M`.
fn block_norm(m: &CMatrix, beta: f64) -> f64 {
    op_norm(&CMatrix::identity(m.dim()).scale_re(1.0 - beta).add(&m.scale_re(beta))).unwrap()
}

#[test]
fn bounded_bias_for_small_widths() {
    for name in ["Q8", "Z4", "Z3", "Q8xZ3"] {
        let g = catalog_group(name).unwrap();
        let set = irrep_catalog(&g).unwrap();
        let theta = is_mixing(&set).unwrap().theta;
        for w in 1..=2u32 {
            let bound = 1.0 - (2.0f64).powi(-(2 * w as i32 + 2)) * theta * theta;
            for table in 1..(1u32 << (1 << w)) - 1 {
                let beta = table.count_ones() as f64 / (1 << w) as f64;
                for rho in set.irreps.iter().filter(|r| !r.is_trivial(1e-9)) {
                    for gg in g.elements() {
                        if rho.image(gg).is_identity(1e-9) {
                            continue;
                        }
                        assert!(block_norm(rho.image(gg), beta) <= bound + 1e-12, "{name} w={w}");
                    }
                }
            }
        }
    }
}

#[test]
fn restricted_block_is_one_bit_often_enough() {
    // exact probability over iid (D, T) that the restriction of f is a
    // non-constant function of exactly one free bit
    for w in 1..=3usize {
        for &p in &[0.05f64, 0.1, 0.25, 0.5] {
            let bound = p * ((1.0 - p) / 2.0).powi(w as i32 - 1);
            for table in 1u32..(1u32 << (1 << w)) - 1 {
                let tt: Vec<u8> = (0..1 << w).map(|v| (table >> v & 1) as u8).collect();
                let mut prob = 0.0;
                for t in 0..1usize << w {
                    if t.count_ones() != 1 {
                        continue;
                    }
                    let pt = p * (1.0 - p).powi(w as i32 - 1);
                    for d in 0..1usize << w {
                        if tt[d] != tt[d ^ t] {
                            prob += pt / (1 << w) as f64;
                        }
                    }
                }
                assert!(prob >= bound - 1e-15, "w={w} p={p} table={table:b}: {prob} < {bound}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn permuting_inputs_relabels(seed in any::<u64>(), x in any::<u64>()) {
        let f = block_instance("Q8", 10, 3, 2, 2, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..10).collect();
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
        let g = f.permute_inputs(&perm).unwrap();
        let y = bits(x, 10);
        let z: Vec<u8> = (0..10).map(|i| y[perm[i]]).collect();
        prop_assert_eq!(g.eval(&y).unwrap(), f.eval(&z).unwrap());
    }
}
