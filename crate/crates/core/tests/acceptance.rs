//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Tolerances are fixed below.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use grouprg::group::{catalog_group, is_dedekind_structural, FiniteGroup};
use grouprg::harness::{
    build_corpus, evaluate, exact_distance_law, exact_law, restriction_experiment, CorpusSpec, ExperimentConfig, Mode,
    RestrictionConfig, RestrictionFrozen, RestrictionMode, RestrictionReport,
};
use grouprg::models::{exact_bias, random_instance, BlockProduct, InstanceKind, InstanceOptions};
use grouprg::poly::Compiler;
use grouprg::prg::{
    calibrated_entry, character_exponents, fool_commutative_spill, linear_form_reduction, long_product_noise, prg_p_group,
    prg_spill_pgroup, CalibratedEntry, KWiseBackend, LongProductParams, PGroupParams, Provenance,
};
use grouprg::randomness::{audit, conditioned_bias_of, kwise_hash, parse_sampler, small_bias_f2, subsets};
use grouprg::rep::{
    closeness_bound, half_sum_norm_check, irrep_catalog, is_mixing, ker_subrep_check, op_norm, parseval_residual,
    validate_irrep_set, CMatrix, GDistribution, IrrepSet,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RESIDUAL_TOL: f64 = 1e-9;
const HALF_SUM_SLACK: f64 = 1e-9;
const NORM_SLACK: f64 = 1e-12;
const EXACT_SLACK: f64 = 1e-12;
const SEED_RATIO_SPREAD: f64 = 0.2;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn entry(construction: &str, group: &str) -> Result<&'static CalibratedEntry, String> {
    calibrated_entry(construction, group).ok_or_else(|| format!("no shipped calibration for {construction} over {group}"))
}

fn frozen_config(e: &CalibratedEntry) -> Result<ExperimentConfig, String> {
    serde_json::from_str(&e.corpus).map_err(|err| err.to_string())
}

/// Every catalog group of order at most 32 built from the named families.
fn catalog_up_to_32() -> Vec<String> {
    let mut names: Vec<String> = (1..=32).map(|m| format!("Z{m}")).collect();
    names.extend((3..=16).map(|n| format!("D({n})")));
    names.extend(["S3", "Q8", "Z2wrZ2", "UT3(2)", "UT3(3)"].map(String::from));
    names.extend((2..=5).map(|t| format!("Z2^{t}")));
    names.extend(["Q8xZ2^2", "Z2^2xZ3", "Z2^2xZ4", "Z2^2xS3", "Z2^2xZ5"].map(String::from));
    let bases = ["Z2", "Z3", "Z4", "Z5", "Z8", "Z9", "S3", "Q8", "D(4)", "D(5)", "Z2wrZ2"];
    for (i, a) in bases.iter().enumerate() {
        for b in &bases[i..] {
            let name = format!("{a}x{b}");
            if catalog_group(&name).map(|g| g.order() <= 32).unwrap_or(false) {
                names.push(name);
            }
        }
    }
    names
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut checked = 0u64;
    let mut degrees = Vec::new();
    for name in ["Z4", "Z8", "Z9", "Q8", "D(4)", "Z2wrZ2"] {
        let g = catalog_group(name).map_err(|e| e.to_string())?;
        let c = Compiler::new(&g).map_err(|e| e.to_string())?;
        for trial in 0..50 {
            let n = if trial < 5 { 14 } else { 1 + trial % 13 };
            let elems: Vec<usize> = (0..n).map(|_| rng.gen_range(0..g.order())).collect();
            let f = BlockProduct::program(g.clone(), &elems).map_err(|e| e.to_string())?;
            let table = c.compile(&f).and_then(|p| p.eval_all()).map_err(|e| e.to_string())?;
            if let Some(x) = (0..1u64 << n).find(|&x| table[x as usize] != f.eval_index(x)) {
                return Err(format!("{name}: polynomial map differs from the program at input {x:b}"));
            }
            checked += 1 << n;
        }
        // a word on fewer than d letters cannot reach degree d, so constancy is checked from n = d on
        let per_n: Vec<usize> = (0..=14).map(|n| c.word_degree(n)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        let d = per_n[14];
        if per_n[d..].iter().any(|&x| x != d) || per_n.iter().any(|&x| x > d) {
            return Err(format!("{name}: degree varies with n: {per_n:?}"));
        }
        degrees.push(format!("{name}={d}"));
    }
    let wreath = Compiler::new(&catalog_group("Z2wrZ2").unwrap()).unwrap();
    let twisted: Vec<usize> = (2..=14).flat_map(|n| wreath.word_map(n).unwrap()[1..].iter().map(|f| f.degree()).collect::<Vec<_>>()).collect();
    let secs = start.elapsed().as_secs_f64();
    check(
        twisted.iter().all(|&d| d == 2) && secs < 300.0,
        format!("{checked} inputs agree; degrees {}; Z2wrZ2 twisted degree 2; {secs:.1}s", degrees.join(" ")),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let e = entry("pgroup", "Q8")?;
    let g = catalog_group("Q8").unwrap();
    let params = PGroupParams::calibrated(&g).map_err(|e| e.to_string())?;
    let cfg = frozen_config(e)?;
    if cfg.mode != Mode::Exact || cfg.corpus.count != 50 || cfg.permutations != 20 {
        return Err(format!("frozen configuration differs from 50 programs x 20 permutations: {}", e.corpus));
    }
    let spec = prg_p_group(&g, 12, 0.1, &params).map_err(|e| e.to_string())?;
    let report = evaluate(&spec, &cfg).map_err(|e| e.to_string())?;
    let ratios: Vec<f64> = [8usize, 12, 16]
        .iter()
        .map(|&n| prg_p_group(&g, n, 0.1, &params).map(|s| s.seed_len() as f64 / (n as f64 / 0.1).log2()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mean = ratios.iter().sum::<f64>() / 3.0;
    let spread = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    check(
        report.pass && report.worst_delta <= 0.1 && spread <= SEED_RATIO_SPREAD && secs < 600.0,
        format!(
            "c = {}, worst delta {:.4} over 50 programs x 21 orders; seed/log2(n/eps) {:.3?}, spread {:.1}%; {secs:.1}s",
            params.c_bias,
            report.worst_delta,
            ratios,
            100.0 * spread
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let (mut worst_residual, mut worst_parseval, mut pairs) = (0.0f64, 0.0f64, 0u64);
    let names = catalog_up_to_32();
    for name in &names {
        let g = catalog_group(name).map_err(|e| e.to_string())?;
        let set = irrep_catalog(&g).map_err(|e| format!("{name}: {e}"))?;
        let r = validate_irrep_set(&g, &set);
        let residual = r.homomorphism.max(r.unitarity).max(r.orthogonality).max(r.irreducibility);
        if !r.pass || residual >= RESIDUAL_TOL || r.sum_dim_sq != g.order() {
            return Err(format!("{name}: validation {r:?}"));
        }
        worst_residual = worst_residual.max(residual);
        for _ in 0..100 {
            let res = parseval_residual(&GDistribution::random(g.order(), &mut rng), &set);
            if res >= RESIDUAL_TOL {
                return Err(format!("{name}: Parseval residual {res}"));
            }
            worst_parseval = worst_parseval.max(res);
        }
        for _ in 0..1000 {
            let x = GDistribution::random(g.order(), &mut rng);
            let y = GDistribution::random(g.order(), &mut rng);
            let c = closeness_bound(&x, &y, &set).map_err(|e| e.to_string())?;
            if c.tv > c.bound + NORM_SLACK {
                return Err(format!("{name}: tv {} exceeds bound {}", c.tv, c.bound));
            }
            pairs += 1;
        }
    }
    Ok(format!(
        "{} groups; max irrep residual {worst_residual:.1e}, max Parseval residual {worst_parseval:.1e}; {pairs} closeness pairs, 0 violations",
        names.len()
    ))
}

/// `U diag(e^{2 pi i t_j}) U*` with `|t_j| >= theta` turns and `U` random unitary.
fn clamped_unitary(rng: &mut ChaCha8Rng, d: usize, theta: f64) -> CMatrix {
    let phases: Vec<Complex64> = (0..d)
        .map(|_| {
            let t = rng.gen_range(theta..=0.5) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            Complex64::from_polar(1.0, 2.0 * PI * t)
        })
        .collect();
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    while cols.len() < d {
        let mut v: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for u in &cols {
            let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= ip * y);
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let u = CMatrix::from_fn(d, |r, c| cols[c][r]);
    u.mul(&CMatrix::diag(&phases)).mul(&u.adjoint())
}

/// op-norm of `(1 - beta) I + beta M`, the bias of one block with `Pr[f = 1] = beta`.
fn block_norm(m: &CMatrix, beta: f64) -> f64 {
    op_norm(&CMatrix::identity(m.dim()).scale_re(1.0 - beta).add(&m.scale_re(beta))).unwrap()
}

fn non_identity_images(g: &FiniteGroup, set: &IrrepSet) -> Vec<CMatrix> {
    set.irreps
        .iter()
        .flat_map(|rho| g.elements().map(move |x| rho.image(x).clone()))
        .filter(|m| !m.is_identity(1e-9))
        .collect()
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let mut worst_half = f64::NEG_INFINITY;
    for i in 0..10_000 {
        let d = 1 + i % 4;
        let theta = rng.gen_range(0.001..=0.5);
        let r = half_sum_norm_check(&clamped_unitary(&mut rng, d, theta), theta).map_err(|e| e.to_string())?;
        if !r.pass || r.norm > r.bound + HALF_SUM_SLACK {
            return Err(format!("half sum: norm {} > cos(pi theta) {} at d={d}", r.norm, r.bound));
        }
        worst_half = worst_half.max(r.norm - r.bound);
    }

    let q8 = catalog_group("Q8").unwrap();
    let set = irrep_catalog(&q8).unwrap();
    let theta = is_mixing(&set).unwrap().theta;
    let images = non_identity_images(&q8, &set);
    let bound = |w: i32| 1.0 - 2f64.powi(-(2 * w + 2)) * theta * theta;
    let mut exhaustive = 0u64;
    for w in 1..=2i32 {
        for table in 1u32..(1 << (1 << w)) - 1 {
            let beta = table.count_ones() as f64 / (1 << w) as f64;
            for m in &images {
                if block_norm(m, beta) > bound(w) + NORM_SLACK {
                    return Err(format!("bounded bias fails at w={w}, table {table:b}"));
                }
                exhaustive += 1;
            }
        }
    }
    for _ in 0..10_000 {
        let table = rng.gen_range(1u32..255);
        let m = &images[rng.gen_range(0..images.len())];
        if block_norm(m, table.count_ones() as f64 / 8.0) > bound(3) + NORM_SLACK {
            return Err(format!("bounded bias fails at w=3, table {table:b}"));
        }
    }

    // the two-dimensional irrep is faithful, so every non-identity base has a non-identity image
    let rho = set.irreps.iter().find(|r| r.dim == 2).unwrap();
    let eps: f64 = 0.1;
    let mut worst_long: f64 = 0.0;
    let mut lengths = Vec::new();
    for w in 1..=2usize {
        let ell = (2f64.powi(2 * w as i32 + 2) * (1.0 / eps).ln() / (theta * theta)).ceil() as usize;
        lengths.push(ell);
        for s in 0..500u64 {
            let f = random_instance(InstanceKind::Block, &q8, ell * w, ell, w, 0, s, InstanceOptions::default()).unwrap();
            let norm = op_norm(&exact_bias(&f, rho)).unwrap();
            if norm > eps {
                return Err(format!("long product of {ell} width-{w} blocks has bias {norm} > {eps}"));
            }
            worst_long = worst_long.max(norm);
        }
    }
    Ok(format!(
        "10^4 unitaries, max norm - cos(pi theta) = {worst_half:.2e}; bounded bias on {exhaustive} (table, image) pairs at w<=2 and 10^4 at w=3; \
         10^3 long products (ell = {lengths:?}), max op-norm {worst_long:.2e} <= {eps}"
    ))
}

fn criterion_5() -> Outcome {
    let mut mixing = Vec::new();
    let names = catalog_up_to_32();
    for name in &names {
        let g = catalog_group(name).map_err(|e| e.to_string())?;
        let set = irrep_catalog(&g).map_err(|e| e.to_string())?;
        let m = is_mixing(&set).map_err(|e| e.to_string())?.mixing;
        let k = ker_subrep_check(&set);
        let d = is_dedekind_structural(&g).map_err(|e| e.to_string())?;
        if m != k || k != d {
            return Err(format!("{name}: mixing {m}, kernel check {k}, Dedekind {d}"));
        }
        if m {
            mixing.push(name.as_str());
        }
    }
    let expect_true = ["Q8", "Z6", "Z32", "Z2^5", "Q8xZ2", "Q8xZ2^2", "Q8xZ3"];
    let expect_false = ["S3", "D(4)", "Z2wrZ2", "Q8xZ4"];
    for (names, want) in [(&expect_true[..], true), (&expect_false[..], false)] {
        for name in names {
            let set = irrep_catalog(&catalog_group(name).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            if is_mixing(&set).map_err(|e| e.to_string())?.mixing != want {
                return Err(format!("{name}: expected mixing = {want}"));
            }
        }
    }
    Ok(format!("{} groups agree on all three predicates; {} are mixing", names.len(), mixing.len()))
}

fn restriction_run(corpus: &[BlockProduct], d: &grouprg::Sampler, t: &grouprg::Sampler, cfg: RestrictionConfig) -> Result<RestrictionReport, String> {
    restriction_experiment(corpus, d, t, &cfg).map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let q8 = catalog_group("Q8").unwrap();
    let e = entry("long-products", "Q8")?;
    let frozen: RestrictionFrozen = serde_json::from_str(&e.corpus).map_err(|e| e.to_string())?;
    let shape = &frozen.shape;
    let params = LongProductParams::calibrated(&q8).map_err(|e| e.to_string())?;
    let p = 0.5f64.powi(params.b(shape.theta, shape.w) as i32);
    let corpus = build_corpus(&frozen.corpus).map_err(|e| e.to_string())?;
    let (d, t) = long_product_noise(frozen.corpus.n, shape.theta, shape.w, shape.eps, &params).map_err(|e| e.to_string())?;
    // a fresh stream, not the one the calibration searched with
    let mc = RestrictionMode::MonteCarlo { trials: 10_000, rng_seed: shape.rng_seed + 1 };
    let cfg = RestrictionConfig { j1_fraction: shape.j1_fraction, iid_p: p, spill_budget: shape.spill_budget, mode: mc, alpha: 0.05 };
    let r = restriction_run(&corpus, &d, &t, cfg)?;
    let target = 1.0 - shape.eps;
    let main_ok = r.min_lemma >= target && r.min_collapse >= target && r.min_q_ok >= target;

    // exhaustive cross-check at n = 8: the calibrated shape, and the same shape with Pr[T_i = 1] = 1/2
    let small = build_corpus(&CorpusSpec::blocks("Q8", 8, 2, 3, 2, 4, 0xC6)).map_err(|e| e.to_string())?;
    let mut worst_gap = 0.0f64;
    let mut radius = 0.0;
    for variant in [params.clone(), LongProductParams { b: Some(1), ..params.clone() }] {
        let (d, t) = long_product_noise(8, shape.theta, shape.w, shape.eps, &variant).map_err(|e| e.to_string())?;
        let iid_p = 0.5f64.powi(variant.b(shape.theta, shape.w) as i32);
        let base = RestrictionConfig { j1_fraction: shape.j1_fraction, iid_p, spill_budget: 2, mode: RestrictionMode::Exhaustive, alpha: 0.05 };
        let ex = restriction_run(&small, &d, &t, base)?;
        let mc = restriction_run(&small, &d, &t, RestrictionConfig { mode: RestrictionMode::MonteCarlo { trials: 10_000, rng_seed: 0xC6 }, ..base })?;
        radius = mc.radius.unwrap();
        for (a, b) in ex.instances.iter().zip(&mc.instances) {
            for (x, y) in [(a.lemma, b.lemma), (a.collapse, b.collapse), (a.q_ok, b.q_ok), (a.j1_ok, b.j1_ok)] {
                worst_gap = worst_gap.max((x - y).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        main_ok && worst_gap <= radius,
        format!(
            "C = {}, n = {}: one-bit collapse frequency {:.4}, |Q| <= {} frequency {:.4} (target {target}, radius {:.4}); \
             exhaustive vs Monte-Carlo at n = 8 differ by {worst_gap:.4} <= {radius:.4}; {secs:.1}s",
            params.c,
            frozen.corpus.n,
            r.min_lemma,
            shape.spill_budget,
            r.min_q_ok,
            r.radius.unwrap()
        ),
    )
}

fn criterion_7() -> Outcome {
    let mut audited = 0u64;
    let mut worst_ratio = 0.0f64;
    for n in [6usize, 9, 12] {
        for eps in [1.0 / 32.0, 1.0 / 64.0] {
            let dist = small_bias_f2(n, eps).unwrap().exact_dist().unwrap();
            for size in 0..=4usize {
                for fixed in subsets(n, size) {
                    for y in 0..1u32 << size {
                        let vals: Vec<u8> = (0..size).map(|i| (y >> i & 1) as u8).collect();
                        let b = conditioned_bias_of(&dist, &fixed, &vals).map_err(|e| e.to_string())?;
                        let bound = 2f64.powi(size as i32 + 1) * eps;
                        if b > bound + EXACT_SLACK {
                            return Err(format!("n={n} eps={eps} S0={fixed:?}: conditioned bias {b} > {bound}"));
                        }
                        worst_ratio = worst_ratio.max(b / bound);
                        audited += 1;
                    }
                }
            }
        }
    }
    let e = entry("pgroup-spill", "Q8")?;
    let q8 = catalog_group("Q8").unwrap();
    let corpus = frozen_config(e)?.corpus;
    let c = e.value("c_bias").map_err(|e| e.to_string())?;
    let spec = prg_spill_pgroup(&q8, corpus.n, e.eps, corpus.q, &PGroupParams::with_exponents(c, c, Provenance::Calibrated))
        .map_err(|e| e.to_string())?;
    let law = exact_law(spec.sampler()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for f in build_corpus(&corpus).map_err(|e| e.to_string())? {
        worst = worst.max(exact_distance_law(&f, &law).map_err(|e| e.to_string())?);
    }
    check(
        worst <= e.eps,
        format!(
            "{audited} conditionings, max bias / 2^(|S0|+1) eps = {worst_ratio:.3}; spill generator (q = {}, n = {}) worst delta {worst:.2e} <= {}",
            corpus.q, corpus.n, e.eps
        ),
    )
}

fn criterion_8() -> Outcome {
    let mut inputs = 0u64;
    let opts = InstanceOptions { include_identity: true, include_constant: true };
    for name in ["Z3", "Z6"] {
        let g = catalog_group(name).unwrap();
        let set = irrep_catalog(&g).unwrap();
        let chars: Vec<Vec<usize>> = set.irreps.iter().map(|chi| character_exponents(&g, chi)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        for (i, n) in [6usize, 10, 14].into_iter().enumerate() {
            for s in 0..4u64 {
                let q = 1 + (s as usize % 3);
                let f = random_instance(InstanceKind::Block, &g, n, n - q, 1, q, 100 * i as u64 + s, opts).map_err(|e| e.to_string())?;
                for exps in &chars {
                    let form = linear_form_reduction(&f, exps).map_err(|e| e.to_string())?;
                    if form.weight_sum() > form.weight_bound {
                        return Err(format!("{name}: weight sum {} exceeds {}", form.weight_sum(), form.weight_bound));
                    }
                    for x in 0..1u64 << n {
                        if form.decode(form.eval_index(x)) != exps[f.eval_index(x)] {
                            return Err(format!("{name}: decoder mismatch at input {x:b}"));
                        }
                    }
                    inputs += 1 << n;
                }
            }
        }
    }
    let e = entry("commutative", "Z6")?;
    let k = e.value("k").map_err(|e| e.to_string())? as usize;
    let corpus = frozen_config(e)?.corpus;
    let backend = audit(&kwise_hash(corpus.n, 1, k).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for f in build_corpus(&corpus).map_err(|e| e.to_string())? {
        let r = fool_commutative_spill(&f, &KWiseBackend(k), e.eps).map_err(|e| e.to_string())?;
        worst = worst.max(r.delta);
    }
    check(
        backend.pass && worst <= e.eps,
        format!("{inputs} decoded (input, character) pairs; {k}-wise backend audited exactly, worst delta {worst:.2e} <= {} on Z6", e.eps),
    )
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let grid: Vec<&str> = include_str!("../data/audit_grid.txt").lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    for spec in &grid {
        let s = parse_sampler(spec).map_err(|e| format!("{spec}: {e}"))?;
        let r = audit(&s).map_err(|e| format!("{spec}: {e}"))?;
        if !r.pass || r.measured.is_empty() {
            return Err(format!("{spec}: {}", serde_json::to_string(&r).unwrap()));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 900.0, format!("{} samplers pass their exact guarantee; {secs:.1}s", grid.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("compiler", criterion_1),
        ("p-group generator", criterion_2),
        ("representations", criterion_3),
        ("eigenvalue claims", criterion_4),
        ("mixing and Dedekind", criterion_5),
        ("restrictions", criterion_6),
        ("conditioning and spill", criterion_7),
        ("linear forms", criterion_8),
        ("sampler audit", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (verdict, detail) = match run() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} ({name}): {verdict}: {detail}", i + 1);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
