use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use grouprg::group::{self, catalog_group, classify_p_group, is_dedekind_structural, FiniteGroup};
use grouprg::harness::{
    self, build_corpus, calibrate, calibrate_restriction, evaluate, restriction_experiment, CorpusSpec, ExperimentConfig, Mode,
    RestrictionCalibration, RestrictionConfig, RestrictionMode, REPORT_SCHEMA,
};
use grouprg::models::{self, exact_output_distribution, restrict, BlockProduct, InputDist, InstanceKind, Restriction};
use grouprg::poly;
use grouprg::prg::{
    fool_commutative_spill, iterate_reduction, long_product_noise, one_iteration, prg_long_products, prg_mixing, prg_p_group,
    prg_spill_pgroup, spill_budget, CalibratedTable, KWiseBackend, LongProductParams, MixingParams, OneIterConfig, PGroupParams,
    PrgSpec, PrgSpecFile, Provenance, ReductionParams, Target, CALIBRATION_SCHEMA,
};
use grouprg::randomness::{self, audit, parse_sampler, Sampler};
use grouprg::rep::{irrep_catalog, is_mixing, validate_irrep_set};

type Res<T> = Result<T, Box<dyn Error + Send + Sync>>;

#[derive(Parser)]
#[command(name = "grouprg", version, about = "Pseudorandom generators for group products")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    rng_seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    #[command(subcommand)]
    Group(GroupCmd),
    #[command(subcommand)]
    Rep(RepCmd),
    #[command(subcommand)]
    Rand(RandCmd),
    #[command(subcommand)]
    Model(ModelCmd),
    /// Compile a group program into polynomials over F_p.
    Compile {
        #[arg(long)]
        group: Option<String>,
        /// Model file of a program.
        #[arg(long)]
        program: PathBuf,
    },
    #[command(subcommand)]
    Prg(PrgCmd),
    /// Exact or Monte-Carlo distance of a generator on a random corpus.
    Eval(EvalArgs),
    #[command(subcommand)]
    Experiment(ExperimentCmd),
    /// Search the smallest constant meeting eps on a frozen corpus.
    Calibrate(CalibrateArgs),
}

#[derive(Subcommand)]
enum GroupCmd {
    /// Order, p-group classification and Dedekind status.
    Info { name: String },
    /// Full multiplication table as JSON.
    Dump { name: String },
}

#[derive(Subcommand)]
enum RepCmd {
    /// Validate the irreducible representations of a group.
    Check { group: String },
    /// Mixing status and the smallest eigenphase.
    Mixing { group: String },
    /// The irreducible representations as JSON.
    Dump { group: String },
}

#[derive(Subcommand)]
enum RandCmd {
    Sample {
        #[arg(long)]
        sampler: String,
        /// Seed bits as hex, least significant bit first from the right.
        #[arg(long)]
        seed: Option<String>,
        /// Expected output length.
        #[arg(long)]
        n: Option<usize>,
    },
    Audit {
        #[arg(long)]
        sampler: String,
        #[arg(long, default_value = "exact")]
        mode: String,
    },
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Evaluate on one input, or give the exact output law under uniform input.
    Eval {
        #[arg(long)]
        model: PathBuf,
        /// Input bits as hex.
        #[arg(long)]
        x: Option<String>,
    },
    Restrict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "D")]
        d: String,
        #[arg(long = "T")]
        t: String,
    },
    Stats {
        #[arg(long)]
        model: PathBuf,
    },
    /// Draw a random instance.
    Random {
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Kind::Program)]
        kind: Kind,
        #[arg(long, default_value_t = 0)]
        blocks: usize,
        #[arg(long, default_value_t = 1)]
        w: usize,
        #[arg(long, default_value_t = 0)]
        q: usize,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Program,
    Block,
}

impl From<Kind> for InstanceKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Program => InstanceKind::Program,
            Kind::Block => InstanceKind::Block,
        }
    }
}

#[derive(Subcommand)]
enum PrgCmd {
    Build(BuildArgs),
    /// Sample a generator from a spec file.
    Sample {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        seed: Option<String>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    Pgroup,
    PgroupSpill,
    Mixing,
    LongProducts,
    OneIter,
    Reduction,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    construction: Construction,
    #[arg(long)]
    group: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps: f64,
    /// Shipped calibrated constants (the default).
    #[arg(long, conflicts_with = "paper_asymptotic")]
    calibrated: bool,
    /// The constants of the asymptotic analysis.
    #[arg(long)]
    paper_asymptotic: bool,
    /// Explicit exponent (p-group) or subset-size factor (mixing) or C (long products).
    #[arg(long)]
    knob: Option<f64>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long, default_value_t = 1)]
    w: usize,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
}

#[derive(Args)]
struct CorpusArgs {
    #[arg(long)]
    group: String,
    #[arg(long)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Kind::Program)]
    kind: Kind,
    #[arg(long, default_value_t = 0)]
    blocks: usize,
    #[arg(long, default_value_t = 1)]
    w: usize,
    #[arg(long, default_value_t = 0)]
    q: usize,
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    corpus_seed: u64,
}

impl CorpusArgs {
    fn spec(&self) -> CorpusSpec {
        let mut c = CorpusSpec::blocks(&self.group, self.n, self.blocks, self.w, self.q, self.count, self.corpus_seed);
        c.kind = self.kind.into();
        c
    }
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    spec: PathBuf,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Monte-Carlo trials; exact evaluation when absent.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    permutations: usize,
}

#[derive(Subcommand)]
enum ExperimentCmd {
    /// Restriction statistics under the long-product noise.
    Restriction(RestrictionArgs),
    /// The linear-form reduction with the k-wise backend on a commutative corpus.
    Commutative {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct RestrictionArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    #[arg(long = "lemma-w", default_value_t = 2)]
    lemma_w: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 0.5)]
    j1_fraction: f64,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct CalibrateArgs {
    /// pgroup, pgroup-spill, mixing, commutative or long-products.
    #[arg(long)]
    construction: String,
    #[arg(long)]
    eps: f64,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, default_value_t = 0.25)]
    theta: f64,
    #[arg(long = "lemma-w", default_value_t = 2)]
    lemma_w: usize,
    #[arg(long, default_value_t = 0.5)]
    a: f64,
    #[arg(long, default_value_t = 0.05)]
    c_lo: f64,
    #[arg(long, default_value_t = 2.5)]
    c_hi: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Random coordinate orders scored per instance besides the identity.
    #[arg(long, default_value_t = 0)]
    permutations: usize,
    /// Merge the result into this calibration table.
    #[arg(long)]
    write: Option<PathBuf>,
}

/// What a command produced: the JSON report, an optional CSV form and
/// whether every bound it checks held.
struct Report {
    json: serde_json::Value,
    csv: Option<String>,
    pass: bool,
}

impl Report {
    fn new(v: impl Serialize, pass: bool) -> Res<Self> {
        Ok(Report { json: serde_json::to_value(v)?, csv: None, pass })
    }

    fn info(v: impl Serialize) -> Res<Self> {
        Self::new(v, true)
    }
}

/// Bits from hex, least significant first, padded with zeros to `len`.
fn hex_bits(s: &str, len: usize) -> Res<Vec<u8>> {
    let s = s.trim_start_matches("0x");
    let mut bits = Vec::with_capacity(4 * s.len());
    for c in s.chars().rev() {
        let v = c.to_digit(16).ok_or_else(|| format!("not a hex digit: {c:?}"))?;
        bits.extend((0..4).map(|i| (v >> i & 1) as u8));
    }
    if bits[len.min(bits.len())..].iter().any(|&b| b == 1) {
        return Err(format!("{s} has more than {len} bits").into());
    }
    bits.resize(len, 0);
    Ok(bits)
}

fn bit_string(x: &[u8]) -> String {
    x.iter().map(|b| b.to_string()).collect()
}

fn read(path: &PathBuf) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// A catalog name, or a path to a group file.
fn load_group(name: &str) -> Res<FiniteGroup> {
    if std::path::Path::new(name).is_file() {
        return group::io::from_json(&read(&PathBuf::from(name))?);
    }
    Ok(catalog_group(name)?)
}

fn load_model(path: &PathBuf) -> Res<BlockProduct> {
    models::io::from_json(&read(path)?)
}

fn group_info(name: &str) -> Res<Report> {
    let g = load_group(name)?;
    let p_group = classify_p_group(&g).map(|(p, k)| json!({"p": p, "k": k}));
    Report::info(json!({
        "name": g.name(),
        "order": g.order(),
        "commutative": g.is_commutative(),
        "p_group": p_group,
        "dedekind": is_dedekind_structural(&g)?,
    }))
}

fn rep_cmd(cmd: RepCmd) -> Res<Report> {
    match cmd {
        RepCmd::Check { group } => {
            let g = load_group(&group)?;
            let r = validate_irrep_set(&g, &irrep_catalog(&g)?);
            let pass = r.pass;
            Report::new(r, pass)
        }
        RepCmd::Mixing { group } => {
            let g = load_group(&group)?;
            Report::info(is_mixing(&irrep_catalog(&g)?)?)
        }
        RepCmd::Dump { group } => {
            let g = load_group(&group)?;
            Report::info(serde_json::from_str::<serde_json::Value>(&grouprg::rep::io::to_json(&irrep_catalog(&g)?))?)
        }
    }
}

fn sample_report(s: &Sampler, seed: Option<String>, rng_seed: u64) -> Res<Report> {
    let seed = match seed {
        Some(hex) => {
            let bits: Vec<bool> = hex_bits(&hex, s.seed_len() as usize)?.iter().map(|&b| b == 1).collect();
            s.seed_from_bits(&bits)?
        }
        None => s.random_seed(&mut ChaCha8Rng::seed_from_u64(rng_seed)),
    };
    let x = s.sample(&seed);
    let mut r = Report::info(json!({"sampler": s.to_string(), "seed": seed, "output": bit_string(&x)}))?;
    r.csv = Some(format!("output\n{}\n", bit_string(&x)));
    Ok(r)
}

fn rand_cmd(cmd: RandCmd, rng_seed: u64) -> Res<Report> {
    match cmd {
        RandCmd::Sample { sampler, seed, n } => {
            let s = parse_sampler(&sampler)?;
            if let Some(n) = n.filter(|&n| n != s.n()) {
                return Err(format!("sampler has n = {}, expected {n}", s.n()).into());
            }
            sample_report(&s, seed, rng_seed)
        }
        RandCmd::Audit { sampler, mode } => {
            if mode != "exact" {
                return Err(format!("unsupported audit mode {mode:?}").into());
            }
            let a = audit(&parse_sampler(&sampler)?)?;
            let pass = a.pass;
            Report::new(a, pass)
        }
    }
}

fn model_cmd(cmd: ModelCmd, rng_seed: u64) -> Res<Report> {
    match cmd {
        ModelCmd::Eval { model, x } => {
            let f = load_model(&model)?;
            match x {
                Some(hex) => {
                    let g = f.eval(&hex_bits(&hex, f.n())?)?;
                    Report::info(json!({"value": f.group().element_name(g), "index": g}))
                }
                None => {
                    let d = exact_output_distribution(&f, InputDist::Uniform)?;
                    let law: serde_json::Map<_, _> =
                        f.group().elements().map(|e| (f.group().element_name(e).to_string(), json!(d.probs()[e]))).collect();
                    Report::info(json!({"uniform_law": law}))
                }
            }
        }
        ModelCmd::Restrict { model, d, t } => {
            let f = load_model(&model)?;
            let r = Restriction::new(hex_bits(&d, f.n())?, hex_bits(&t, f.n())?)?;
            let (g, stats) = restrict(&f, &r, false)?;
            let restricted: serde_json::Value = serde_json::from_str(&models::io::to_json(&g))?;
            Report::info(json!({"stats": stats, "restricted": restricted}))
        }
        ModelCmd::Stats { model } => {
            let f = load_model(&model)?;
            Report::info(json!({
                "group": f.group().name(),
                "n": f.n(),
                "blocks": f.len(),
                "width": f.width(),
                "spill": f.spill_size(),
                "program": f.is_program(),
            }))
        }
        ModelCmd::Random { group, n, kind, blocks, w, q } => {
            let mut spec = CorpusSpec::blocks(&group, n, blocks, w, q, 1, rng_seed);
            spec.kind = kind.into();
            let f = build_corpus(&spec)?.remove(0);
            Report::info(serde_json::from_str::<serde_json::Value>(&models::io::to_json(&f))?)
        }
    }
}

fn compile_cmd(group: Option<String>, program: PathBuf) -> Res<Report> {
    let f = load_model(&program)?;
    if let Some(name) = group.filter(|name| name != f.group().name()) {
        return Err(format!("program is over {}, not {name}", f.group().name()).into());
    }
    let map = poly::compile(&f)?;
    Report::info(serde_json::from_str::<serde_json::Value>(&map.to_json())?)
}

fn pgroup_params(g: &FiniteGroup, a: &BuildArgs) -> Res<PGroupParams> {
    Ok(match a.knob {
        Some(c) => PGroupParams::with_exponents(c, c, Provenance::Override),
        None if a.paper_asymptotic => PGroupParams::paper(g, a.eps)?,
        None => PGroupParams::calibrated(g)?,
    })
}

fn mixing_params(g: &FiniteGroup, a: &BuildArgs) -> Res<MixingParams> {
    Ok(match a.knob {
        Some(k) => MixingParams::with_kappa(k, Provenance::Override),
        None if a.paper_asymptotic => MixingParams::paper(g)?,
        None => MixingParams::calibrated(g)?,
    })
}

fn long_params(g: &FiniteGroup, a: &BuildArgs) -> Res<LongProductParams> {
    Ok(match a.knob {
        Some(c) => LongProductParams::scaled(c, 0.5, Provenance::Override),
        None if a.paper_asymptotic => LongProductParams::paper(),
        None => LongProductParams::calibrated(g)?,
    })
}

/// Bounded-independence spill generator, the `P1` of the one-iteration step.
fn kwise_spec(g: &FiniteGroup, n: usize, eps: f64, k: usize) -> Res<PrgSpec> {
    let target = Target { group: g.name().to_string(), n, ell: n, w: 1, q: 0, any_order: true };
    Ok(PrgSpec::from_sampler("kwise", target, eps, randomness::kwise_hash(n, 1, k)?))
}

fn build(a: &BuildArgs) -> Res<PrgSpec> {
    let g = catalog_group(&a.group)?;
    Ok(match a.construction {
        Construction::Pgroup => prg_p_group(&g, a.n, a.eps, &pgroup_params(&g, a)?)?,
        Construction::PgroupSpill => {
            prg_spill_pgroup(&g, a.n, a.eps, a.q.unwrap_or_else(|| spill_budget(a.eps)), &pgroup_params(&g, a)?)?
        }
        Construction::Mixing => prg_mixing(&g, a.n, a.eps, &mixing_params(&g, a)?)?,
        Construction::LongProducts => {
            let p1 = kwise_spec(&g, a.n, a.eps, ReductionParams::desk().backend_k)?;
            prg_long_products(&p1, a.theta, a.w, a.eps, &long_params(&g, a)?)?
        }
        Construction::OneIter => {
            let r = if a.paper_asymptotic { ReductionParams::paper() } else { ReductionParams::desk() };
            let inner = if classify_p_group(&g).is_some() {
                prg_p_group(&g, a.n, a.eps, &PGroupParams::with_exponents(r.pgroup_c_bias, r.pgroup_c_noise, Provenance::Override))?
            } else {
                prg_mixing(&g, a.n, a.eps, &mixing_params(&g, a)?)?
            };
            let p1 = kwise_spec(&g, a.n, a.eps, r.backend_k)?;
            let cfg = OneIterConfig { ell: a.ell, w: a.w, eps: a.eps, theta: a.theta, short: r.short, long: r.long };
            one_iteration(&inner, &p1, &g, &cfg)?
        }
        Construction::Reduction => {
            let r = if a.paper_asymptotic { ReductionParams::paper() } else { ReductionParams::desk() };
            iterate_reduction(&g, a.n, a.ell, a.w, a.eps, &r)?
        }
    })
}

fn prg_cmd(cmd: PrgCmd, rng_seed: u64) -> Res<Report> {
    match cmd {
        PrgCmd::Build(a) => {
            let spec = build(&a)?;
            Report::info(serde_json::from_str::<serde_json::Value>(&spec.to_json())?)
        }
        PrgCmd::Sample { spec, seed } => {
            let s = PrgSpecFile::from_json(&read(&spec)?)?.rebuild()?;
            sample_report(s.sampler(), seed, rng_seed)
        }
    }
}

fn eval_cmd(a: EvalArgs, rng_seed: u64) -> Res<Report> {
    let spec = PrgSpecFile::from_json(&read(&a.spec)?)?.rebuild()?;
    let mode = match a.trials {
        Some(trials) => Mode::MonteCarlo { trials, alpha: a.alpha },
        None => Mode::Exact,
    };
    let cfg = ExperimentConfig { corpus: a.corpus.spec(), mode, permutations: a.permutations, rng_seed };
    let r = evaluate(&spec, &cfg)?;
    let csv = r.to_csv();
    let mut out = Report::new(&r, r.pass)?;
    out.csv = Some(csv);
    Ok(out)
}

fn restriction_cmd(a: RestrictionArgs, rng_seed: u64) -> Res<Report> {
    let corpus = build_corpus(&a.corpus.spec())?;
    let params = LongProductParams::scaled(a.c, a.a, Provenance::Override);
    let (d, t) = long_product_noise(a.corpus.n, a.theta, a.lemma_w, a.eps, &params)?;
    let budget = a.budget.unwrap_or_else(|| spill_budget(a.eps));
    let mode = if a.exhaustive { RestrictionMode::Exhaustive } else { RestrictionMode::MonteCarlo { trials: a.trials, rng_seed } };
    let cfg = RestrictionConfig {
        j1_fraction: a.j1_fraction,
        iid_p: 0.5f64.powi(params.b(a.theta, a.lemma_w) as i32),
        spill_budget: budget,
        mode,
        alpha: 0.05,
    };
    let r = restriction_experiment(&corpus, &d, &t, &cfg)?;
    let slack = r.radius.unwrap_or(0.0);
    let pass = r.min_lemma + slack >= 1.0 - a.eps && r.min_q_ok + slack >= 1.0 - a.eps;
    let mut csv = String::from("index,mean_j1,j1_ok,collapse,lemma,q_ok\n");
    for i in &r.instances {
        csv.push_str(&format!("{},{},{},{},{},{}\n", i.index, i.mean_j1, i.j1_ok, i.collapse, i.lemma, i.q_ok));
    }
    let mut out = Report::new(json!({"schema": REPORT_SCHEMA, "d": d.to_string(), "t": t.to_string(), "report": r, "pass": pass}), pass)?;
    out.csv = Some(csv);
    Ok(out)
}

fn commutative_cmd(corpus: CorpusArgs, eps: f64, k: usize) -> Res<Report> {
    let corpus = build_corpus(&corpus.spec())?;
    let reports = corpus.iter().map(|f| fool_commutative_spill(f, &KWiseBackend(k), eps)).collect::<Result<Vec<_>, _>>()?;
    let worst = reports.iter().map(|r| r.delta).fold(0.0, f64::max);
    let pass = reports.iter().all(|r| r.pass);
    Report::new(json!({"schema": REPORT_SCHEMA, "eps": eps, "k": k, "worst_delta": worst, "instances": reports, "pass": pass}), pass)
}

fn calibrate_cmd(a: CalibrateArgs, rng_seed: u64) -> Res<Report> {
    let c = if a.construction == "long-products" {
        let shape = RestrictionCalibration {
            theta: a.theta,
            w: a.lemma_w,
            eps: a.eps,
            a: a.a,
            c_lo: a.c_lo,
            c_hi: a.c_hi,
            j1_fraction: 0.5,
            spill_budget: spill_budget(a.eps),
            trials: a.trials,
            rng_seed,
        };
        calibrate_restriction(&a.corpus.spec(), &shape)?
    } else {
        calibrate(&harness::CalibrationTarget {
            construction: a.construction.clone(),
            eps: a.eps,
            corpus: a.corpus.spec(),
            permutations: a.permutations,
            rng_seed,
        })?
    };
    if let Some(path) = &a.write {
        let mut table = match std::fs::read_to_string(path) {
            Ok(s) => serde_json::from_str::<CalibratedTable>(&s)?,
            Err(_) => CalibratedTable { schema: CALIBRATION_SCHEMA.into(), entries: vec![] },
        };
        table.entries.retain(|e| !(e.construction == c.entry.construction && e.group == c.entry.group));
        table.entries.push(c.entry.clone());
        std::fs::write(path, serde_json::to_string_pretty(&table)? + "\n")?;
    }
    let mut out = Report::info(&c)?;
    out.csv = Some(std::iter::once("value,score".to_string()).chain(c.probes.iter().map(|(x, s)| format!("{x},{s}"))).collect::<Vec<_>>().join("\n") + "\n");
    Ok(out)
}

fn run(cli: Cli) -> Res<Report> {
    let seed = cli.global.rng_seed;
    match cli.cmd {
        Cmd::Group(GroupCmd::Info { name }) => group_info(&name),
        Cmd::Group(GroupCmd::Dump { name }) => Report::info(serde_json::from_str::<serde_json::Value>(&group::io::to_json(&load_group(&name)?))?),
        Cmd::Rep(c) => rep_cmd(c),
        Cmd::Rand(c) => rand_cmd(c, seed),
        Cmd::Model(c) => model_cmd(c, seed),
        Cmd::Compile { group, program } => compile_cmd(group, program),
        Cmd::Prg(c) => prg_cmd(c, seed),
        Cmd::Eval(a) => eval_cmd(a, seed),
        Cmd::Experiment(ExperimentCmd::Restriction(a)) => restriction_cmd(a, seed),
        Cmd::Experiment(ExperimentCmd::Commutative { corpus, eps, k }) => commutative_cmd(corpus, eps, k),
        Cmd::Calibrate(a) => calibrate_cmd(a, seed),
    }
}

fn emit(g: &Global, r: &Report) -> Res<()> {
    let text = match (g.format, &r.csv) {
        (Format::Csv, Some(csv)) => csv.clone(),
        (Format::Csv, None) => return Err("this command has no CSV form".into()),
        (Format::Json, _) => serde_json::to_string_pretty(&r.json)? + "\n",
    };
    match &g.out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let out = Global { out: cli.global.out.clone(), format: cli.global.format, rng_seed: cli.global.rng_seed, threads: None };
    match run(cli).and_then(|r| emit(&out, &r).map(|_| r.pass)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
