//! Random restrictions `x -> f(D xor (T and x))` and how often they turn a
//! block product into a long one-bit product plus a small junta.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{exact_law, HarnessError};
use crate::models::{restrict, BlockProduct, Restriction};
use crate::randomness::Sampler;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum RestrictionMode {
    MonteCarlo { trials: u64, rng_seed: u64 },
    /// Every pair in the support of `D` times the support of `T`, weighted.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RestrictionConfig {
    /// The one-bit count must reach this fraction of its mean under i.i.d. `D`, `T`.
    pub j1_fraction: f64,
    /// `Pr[T_i = 1]` of the i.i.d. baseline.
    pub iid_p: f64,
    /// Bound on the junta size `|I0'|` and on `|Q|`.
    pub spill_budget: usize,
    pub mode: RestrictionMode,
    /// Confidence parameter of the Monte-Carlo radius.
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceRestriction {
    pub index: usize,
    pub iid_j1_mean: f64,
    pub j1_threshold: f64,
    pub mean_j1: f64,
    /// `Pr[J1 >= threshold]`.
    pub j1_ok: f64,
    /// `Pr[|I0'| <= budget]`: with multi-free blocks merged into the spill, the
    /// restricted product has width at most one and a spill within budget.
    pub collapse: f64,
    /// Both of the above: the one-bit product event.
    pub lemma: f64,
    /// `Pr[|Q| <= budget]`, `Q` the free coordinates of multi-free blocks.
    pub q_ok: f64,
    /// `Pr[|Q| = v]` for `v = 0, 1, ...`.
    pub q_hist: Vec<f64>,
    /// `Pr[|T and I0| = v]`.
    pub spill_free_hist: Vec<f64>,
    /// `Pr[|I0'| = v]`.
    pub junta_hist: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictionReport {
    pub config: RestrictionConfig,
    pub instances: Vec<InstanceRestriction>,
    pub min_lemma: f64,
    pub min_collapse: f64,
    pub min_q_ok: f64,
    /// Hoeffding radius of every frequency (Monte-Carlo mode).
    pub radius: Option<f64>,
    /// Number of `(D, T)` pairs drawn or enumerated.
    pub pairs: u64,
}

/// Expected number of non-constant one-free-coordinate blocks when `D` is
/// uniform and `T` has independent `Pr[T_i = 1] = p`.
pub fn iid_j1_mean(f: &BlockProduct, p: f64) -> f64 {
    let e = f.group().identity();
    f.blocks()
        .iter()
        .filter(|b| b.base != e && b.width() > 0)
        .map(|b| {
            let w = b.width();
            let only = p * (1.0 - p).powi(w as i32 - 1);
            (0..w)
                .map(|j| {
                    let sensitive = (0..1usize << w).filter(|&x| b.truth_table[x] != b.truth_table[x ^ (1 << j)]).count();
                    only * sensitive as f64 / (1usize << w) as f64
                })
                .sum::<f64>()
        })
        .sum()
}

#[derive(Clone, Debug, Default)]
struct Acc {
    j1_sum: f64,
    j1_ok: f64,
    collapse: f64,
    lemma: f64,
    q_ok: f64,
    q_hist: Vec<f64>,
    spill_free_hist: Vec<f64>,
    junta_hist: Vec<f64>,
}

fn bump(h: &mut Vec<f64>, v: usize, w: f64) {
    if h.len() <= v {
        h.resize(v + 1, 0.0);
    }
    h[v] += w;
}

fn add_hist(a: &mut Vec<f64>, b: &[f64]) {
    for (v, &x) in b.iter().enumerate() {
        bump(a, v, x);
    }
}

impl Acc {
    fn record(&mut self, f: &BlockProduct, r: &Restriction, threshold: f64, budget: usize, weight: f64) -> Result<(), HarnessError> {
        let (_, s) = restrict(f, r, false)?;
        let j1_ok = s.j1 as f64 >= threshold;
        let collapse = s.new_spill <= budget;
        self.j1_sum += weight * s.j1 as f64;
        self.j1_ok += weight * j1_ok as u8 as f64;
        self.collapse += weight * collapse as u8 as f64;
        self.lemma += weight * (j1_ok && collapse) as u8 as f64;
        self.q_ok += weight * (s.q.len() <= budget) as u8 as f64;
        bump(&mut self.q_hist, s.q.len(), weight);
        bump(&mut self.spill_free_hist, s.spill_free, weight);
        bump(&mut self.junta_hist, s.new_spill, weight);
        Ok(())
    }

    /// Counts are kept as integers until the end so frequencies come out exact.
    fn divide(mut self, s: f64) -> Acc {
        for x in [&mut self.j1_sum, &mut self.j1_ok, &mut self.collapse, &mut self.lemma, &mut self.q_ok] {
            *x /= s;
        }
        for h in [&mut self.q_hist, &mut self.spill_free_hist, &mut self.junta_hist] {
            h.iter_mut().for_each(|x| *x /= s);
        }
        self
    }

    fn merge(mut self, o: &Acc) -> Acc {
        self.j1_sum += o.j1_sum;
        self.j1_ok += o.j1_ok;
        self.collapse += o.collapse;
        self.lemma += o.lemma;
        self.q_ok += o.q_ok;
        add_hist(&mut self.q_hist, &o.q_hist);
        add_hist(&mut self.spill_free_hist, &o.spill_free_hist);
        add_hist(&mut self.junta_hist, &o.junta_hist);
        self
    }
}

const MC_CHUNK: u64 = 256;
/// Largest number of `(D, T)` pairs enumerated exhaustively.
const MAX_PAIRS: u64 = 1 << 26;

type Accs = Vec<Acc>;

fn merge_all(parts: Vec<Accs>, len: usize) -> Accs {
    parts.iter().fold(vec![Acc::default(); len], |acc, p| acc.into_iter().zip(p).map(|(a, b)| a.merge(b)).collect())
}

/// Runs the restriction statistics over a corpus. Per-chunk results are
/// merged in chunk order, so the report does not depend on the thread count.
pub fn restriction_experiment(
    corpus: &[BlockProduct],
    d: &Sampler,
    t: &Sampler,
    cfg: &RestrictionConfig,
) -> Result<RestrictionReport, HarnessError> {
    if corpus.is_empty() {
        return Err(HarnessError::EmptyCorpus);
    }
    let n = corpus[0].n();
    if corpus.iter().any(|f| f.n() != n) || d.n() != n || t.n() != n {
        return Err(HarnessError::Precondition("corpus and samplers must share the input length".into()));
    }
    let means: Vec<f64> = corpus.iter().map(|f| iid_j1_mean(f, cfg.iid_p)).collect();
    let thresholds: Vec<f64> = means.iter().map(|m| cfg.j1_fraction * m).collect();
    let record_all = |accs: &mut Accs, r: &Restriction, w: f64| -> Result<(), HarnessError> {
        for (i, f) in corpus.iter().enumerate() {
            accs[i].record(f, r, thresholds[i], cfg.spill_budget, w)?;
        }
        Ok(())
    };
    let (accs, pairs, radius) = match cfg.mode {
        RestrictionMode::MonteCarlo { trials, rng_seed } => {
            if trials == 0 {
                return Err(HarnessError::Precondition("no trials".into()));
            }
            let parts = (0..trials.div_ceil(MC_CHUNK))
                .into_par_iter()
                .map(|c| {
                    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
                    rng.set_stream(c);
                    let mut accs = vec![Acc::default(); corpus.len()];
                    for _ in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(trials) {
                        let r = Restriction::new(d.sample_random(&mut rng), t.sample_random(&mut rng))?;
                        record_all(&mut accs, &r, 1.0)?;
                    }
                    Ok(accs)
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            let radius = ((2.0 / cfg.alpha).ln() / (2.0 * trials as f64)).sqrt();
            (merge_all(parts, corpus.len()).into_iter().map(|a| a.divide(trials as f64)).collect(), trials, Some(radius))
        }
        RestrictionMode::Exhaustive => {
            let support = |s: &Sampler| -> Result<Vec<(Vec<u8>, f64)>, HarnessError> {
                let law = exact_law(s)?;
                Ok(law.probs().iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(i, &p)| (law.values(i), p)).collect())
            };
            let (ds, ts) = (support(d)?, support(t)?);
            let pairs = ds.len() as u64 * ts.len() as u64;
            if pairs > MAX_PAIRS {
                return Err(HarnessError::TooLarge(format!("{pairs} restriction pairs")));
            }
            let parts = ts
                .par_iter()
                .map(|(tv, tp)| {
                    let mut accs = vec![Acc::default(); corpus.len()];
                    for (dv, dp) in &ds {
                        record_all(&mut accs, &Restriction::new(dv.clone(), tv.clone())?, dp * tp)?;
                    }
                    Ok(accs)
                })
                .collect::<Result<Vec<_>, HarnessError>>()?;
            (merge_all(parts, corpus.len()), pairs, None)
        }
    };
    let instances: Vec<InstanceRestriction> = accs
        .into_iter()
        .enumerate()
        .map(|(index, a)| InstanceRestriction {
            index,
            iid_j1_mean: means[index],
            j1_threshold: thresholds[index],
            mean_j1: a.j1_sum,
            j1_ok: a.j1_ok,
            collapse: a.collapse,
            lemma: a.lemma,
            q_ok: a.q_ok,
            q_hist: a.q_hist,
            spill_free_hist: a.spill_free_hist,
            junta_hist: a.junta_hist,
        })
        .collect();
    let min = |g: fn(&InstanceRestriction) -> f64| instances.iter().map(g).fold(1.0, f64::min);
    Ok(RestrictionReport {
        config: *cfg,
        min_lemma: min(|r| r.lemma),
        min_collapse: min(|r| r.collapse),
        min_q_ok: min(|r| r.q_ok),
        instances,
        radius,
        pairs,
    })
}
