use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{exact_law, fourier_gap_report_law, mc_distance, HarnessError, MAX_EXACT_N};
use crate::group::catalog_group;
use crate::models::{random_instance, BlockProduct, InstanceKind, InstanceOptions};
use crate::prg::{PrgSpec, PrgSpecFile};
use crate::rep::irrep_catalog;

pub const REPORT_SCHEMA: &str = "grouprg-report/1";

/// A frozen random corpus: instance `i` is drawn with seed `seed + i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub group: String,
    pub kind: InstanceKind,
    pub n: usize,
    /// Blocks per instance; ignored for programs, which use all `n` inputs.
    #[serde(default)]
    pub blocks: usize,
    #[serde(default = "one")]
    pub w: usize,
    #[serde(default)]
    pub q: usize,
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub include_identity: bool,
    #[serde(default)]
    pub include_constant: bool,
}

fn one() -> usize {
    1
}

impl CorpusSpec {
    pub fn programs(group: &str, n: usize, count: usize, seed: u64) -> Self {
        CorpusSpec {
            group: group.to_string(),
            kind: InstanceKind::Program,
            n,
            blocks: n,
            w: 1,
            q: 0,
            count,
            seed,
            include_identity: false,
            include_constant: false,
        }
    }

    pub fn blocks(group: &str, n: usize, blocks: usize, w: usize, q: usize, count: usize, seed: u64) -> Self {
        CorpusSpec { kind: InstanceKind::Block, blocks, w, q, ..Self::programs(group, n, count, seed) }
    }
}

pub fn build_corpus(spec: &CorpusSpec) -> Result<Vec<BlockProduct>, HarnessError> {
    let g = catalog_group(&spec.group).map_err(|e| HarnessError::Precondition(e.to_string()))?;
    let opts = InstanceOptions { include_identity: spec.include_identity, include_constant: spec.include_constant };
    (0..spec.count as u64)
        .map(|i| {
            let blocks = if spec.kind == InstanceKind::Program { spec.n } else { spec.blocks };
            Ok(random_instance(spec.kind, &g, spec.n, blocks, spec.w, spec.q, spec.seed.wrapping_add(i), opts)?)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode {
    Exact,
    MonteCarlo { trials: u64, alpha: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub corpus: CorpusSpec,
    pub mode: Mode,
    /// Random coordinate permutations evaluated per instance, besides the identity.
    #[serde(default)]
    pub permutations: usize,
    #[serde(default)]
    pub rng_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceResult {
    pub index: usize,
    pub delta: f64,
    /// Monte-Carlo radius; absent in exact mode.
    pub radius: Option<f64>,
    /// Per-irrep operator-norm gaps (exact mode).
    pub gaps: Vec<f64>,
    /// `sqrt(|G|)` times the largest gap (exact mode).
    pub bound: Option<f64>,
    /// Distances of the permuted instances.
    pub permuted: Vec<f64>,
    /// Largest of `delta` and `permuted`.
    pub worst: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub schema: String,
    pub generator: PrgSpecFile,
    pub corpus: CorpusSpec,
    pub mode: Mode,
    pub permutations: usize,
    pub eps: f64,
    pub instances: Vec<InstanceResult>,
    pub worst_delta: f64,
    pub mean_delta: f64,
    /// Instances whose Fourier bound falls below the exact distance; always zero unless something is broken.
    pub bound_violations: usize,
    /// Every instance (and permutation) meets `eps`; in Monte-Carlo mode the upper confidence limit must.
    pub pass: bool,
    pub runtime_s: f64,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,delta,radius,bound,worst\n");
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.instances {
            out.push_str(&format!("{},{},{},{},{}\n", r.index, r.delta, opt(r.radius), opt(r.bound), r.worst));
        }
        out
    }
}

/// Evaluates `spec` on the configured corpus. Instances run in parallel
/// and are collected in order, so reports only differ in `runtime_s`.
pub fn evaluate(spec: &PrgSpec, cfg: &ExperimentConfig) -> Result<EvalReport, HarnessError> {
    let start = Instant::now();
    if cfg.corpus.count == 0 {
        return Err(HarnessError::EmptyCorpus);
    }
    if spec.n() != cfg.corpus.n {
        return Err(HarnessError::Precondition(format!("generator has n = {}, corpus n = {}", spec.n(), cfg.corpus.n)));
    }
    let corpus = build_corpus(&cfg.corpus)?;
    let g = corpus[0].group().clone();
    let law = match cfg.mode {
        Mode::Exact => {
            if spec.n() > MAX_EXACT_N {
                return Err(HarnessError::TooLarge(format!("n = {} exceeds {MAX_EXACT_N}", spec.n())));
            }
            Some(exact_law(spec.sampler())?)
        }
        Mode::MonteCarlo { .. } => None,
    };
    let irreps = irrep_catalog(&g)?;
    let instances = corpus
        .par_iter()
        .enumerate()
        .map(|(index, f)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
            rng.set_stream(index as u64);
            let perms: Vec<Vec<usize>> = (0..cfg.permutations)
                .map(|_| {
                    let mut p: Vec<usize> = (0..f.n()).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .collect();
            let mut r = match (&law, cfg.mode) {
                (Some(law), _) => {
                    let rep = fourier_gap_report_law(f, law, &irreps)?;
                    let permuted = perms
                        .iter()
                        .map(|p| super::exact_distance_law(&f.permute_inputs(p)?, law))
                        .collect::<Result<Vec<_>, HarnessError>>()?;
                    InstanceResult { index, delta: rep.delta, radius: None, gaps: rep.gaps, bound: Some(rep.bound), permuted, worst: 0.0 }
                }
                (None, Mode::MonteCarlo { trials, alpha }) => {
                    let seed = cfg.rng_seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
                    let est = mc_distance(f, spec.sampler(), trials, alpha, seed)?;
                    let permuted = perms
                        .iter()
                        .map(|p| Ok(mc_distance(&f.permute_inputs(p)?, spec.sampler(), trials, alpha, seed)?.estimate))
                        .collect::<Result<Vec<_>, HarnessError>>()?;
                    InstanceResult { index, delta: est.estimate, radius: Some(est.radius), gaps: vec![], bound: None, permuted, worst: 0.0 }
                }
                (None, Mode::Exact) => unreachable!("exact mode always has a law"),
            };
            r.worst = r.permuted.iter().copied().fold(r.delta, f64::max);
            Ok(r)
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    let worst_delta = instances.iter().map(|r| r.worst).fold(0.0, f64::max);
    let mean_delta = instances.iter().map(|r| r.delta).sum::<f64>() / instances.len() as f64;
    let bound_violations = instances.iter().filter(|r| r.bound.is_some_and(|b| b + 1e-12 < r.delta)).count();
    let pass = instances.iter().all(|r| r.worst + r.radius.unwrap_or(0.0) <= spec.eps) && bound_violations == 0;
    Ok(EvalReport {
        schema: REPORT_SCHEMA.to_string(),
        generator: spec.to_file(),
        corpus: cfg.corpus.clone(),
        mode: cfg.mode,
        permutations: cfg.permutations,
        eps: spec.eps,
        instances,
        worst_delta,
        mean_delta,
        bound_violations,
        pass,
        runtime_s: start.elapsed().as_secs_f64(),
    })
}
