//! Binary search for the smallest constant that meets a target on a frozen corpus.

use serde::{Deserialize, Serialize};

use super::{
    build_corpus, evaluate, restriction_experiment, CorpusSpec, ExperimentConfig, HarnessError, Mode, RestrictionConfig, RestrictionMode,
};
use crate::group::catalog_group;
use crate::prg::{
    fool_commutative_spill, long_product_noise, prg_mixing, prg_p_group, prg_spill_pgroup, CalibratedEntry, KWiseBackend,
    LongProductParams, MixingParams, PGroupParams, Param, PrgSpec, Provenance,
};

/// The constant being searched, with its range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Knob {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
    /// Search stops once the bracket is this narrow.
    pub resolution: f64,
    pub integer: bool,
}

/// Smallest knob value in `[lo, hi]` whose score is at most `target`,
/// assuming the score does not increase with the knob. Returns the value
/// and every `(value, score)` probed, in order.
pub fn search_knob(
    knob: &Knob,
    target: f64,
    mut score: impl FnMut(f64) -> Result<f64, HarnessError>,
) -> Result<(f64, f64, Vec<(f64, f64)>), HarnessError> {
    let mut probes = Vec::new();
    let mut probe = |x: f64, probes: &mut Vec<(f64, f64)>| -> Result<f64, HarnessError> {
        let s = score(x)?;
        probes.push((x, s));
        Ok(s)
    };
    let top = probe(knob.hi, &mut probes)?;
    if top > target {
        return Err(HarnessError::Unsatisfiable(format!("{} = {} scores {top} > {target}", knob.name, knob.hi)));
    }
    let bottom = probe(knob.lo, &mut probes)?;
    if bottom <= target {
        return Ok((knob.lo, bottom, probes));
    }
    let (mut lo, mut hi, mut best) = (knob.lo, knob.hi, top);
    while hi - lo > knob.resolution.max(if knob.integer { 1.0 } else { 0.0 }) {
        let mid = if knob.integer { ((lo + hi) / 2.0).floor() } else { (lo + hi) / 2.0 };
        let s = probe(mid, &mut probes)?;
        if s <= target {
            hi = mid;
            best = s;
        } else {
            lo = mid;
        }
    }
    Ok((hi, best, probes))
}

/// What to calibrate: a construction over a group, the target and the frozen corpus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationTarget {
    /// "pgroup", "pgroup-spill", "mixing" or "commutative".
    pub construction: String,
    pub eps: f64,
    pub corpus: CorpusSpec,
    /// Random coordinate orders scored per instance besides the identity.
    pub permutations: usize,
    pub rng_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    pub entry: CalibratedEntry,
    /// Seed length of the generator at the calibrated value.
    pub seed_len: u32,
    pub probes: Vec<(f64, f64)>,
}


/// Searches the construction's knob against the worst exact distance over
/// the corpus and its permuted copies. The p-group generators search one
/// exponent used for both parts, the mixing generator `kappa`, and the
/// commutative backend its independence `k`.
pub fn calibrate(target: &CalibrationTarget) -> Result<Calibration, HarnessError> {
    if target.corpus.count == 0 {
        return Err(HarnessError::EmptyCorpus);
    }
    let corpus = build_corpus(&target.corpus)?;
    let cfg = ExperimentConfig { corpus: target.corpus.clone(), mode: Mode::Exact, permutations: target.permutations, rng_seed: target.rng_seed };
    let g = catalog_group(&target.corpus.group).map_err(|e| HarnessError::Precondition(e.to_string()))?;
    let (n, eps, q) = (target.corpus.n, target.eps, target.corpus.q);
    let build = |x: f64| -> Result<PrgSpec, HarnessError> {
        Ok(match target.construction.as_str() {
            "pgroup" => prg_p_group(&g, n, eps, &PGroupParams::with_exponents(x, x, Provenance::Calibrated))?,
            "pgroup-spill" => prg_spill_pgroup(&g, n, eps, q, &PGroupParams::with_exponents(x, x, Provenance::Calibrated))?,
            "mixing" => prg_mixing(&g, n, eps, &MixingParams::with_kappa(x, Provenance::Calibrated))?,
            other => return Err(HarnessError::Precondition(format!("no knob for construction {other:?}"))),
        })
    };
    let (knob, value, worst, probes, seed_len) = if target.construction == "commutative" {
        let knob = Knob { name: "k", lo: 1.0, hi: n as f64, resolution: 1.0, integer: true };
        let (k, worst, probes) = search_knob(&knob, eps, |k| {
            let mut worst: f64 = 0.0;
            for f in &corpus {
                worst = worst.max(fool_commutative_spill(f, &KWiseBackend(k as usize), eps)?.delta);
            }
            Ok(worst)
        })?;
        let seed = crate::randomness::kwise_hash(n, 1, k as usize).map_err(crate::prg::PrgError::from)?.seed_len();
        (knob, k, worst, probes, seed)
    } else {
        let knob = match target.construction.as_str() {
            "mixing" => {
                // below this the hashes are not fully independent and the exact law is out of reach
                let lo = (n as f64 / 5.0).ceil() / (1.0 / eps).log2();
                Knob { name: "kappa", lo, hi: lo.max(2.0), resolution: 1.0 / 32.0, integer: false }
            }
            _ => Knob { name: "c", lo: 1.0 / 64.0, hi: 4.0, resolution: 1.0 / 64.0, integer: false },
        };
        let (x, worst, probes) = search_knob(&knob, eps, |x| Ok(evaluate(&build(x)?, &cfg)?.worst_delta))?;
        (knob, x, worst, probes, build(x)?.seed_len())
    };
    let params = match knob.name {
        "c" => vec![Param::new("c_bias", value, Provenance::Calibrated), Param::new("c_noise", value, Provenance::Calibrated)],
        name => vec![Param::new(name, value, Provenance::Calibrated)],
    };
    Ok(Calibration {
        entry: CalibratedEntry {
            construction: target.construction.clone(),
            group: g.name().to_string(),
            n,
            eps,
            params,
            worst_delta: worst,
            corpus: serde_json::to_string(&cfg).expect("corpus serializes"),
        },
        seed_len,
        probes,
    })
}

/// Shape of the restriction calibration: `p = 2^{-a w} theta^3` with the
/// exponent scaled to `a`, `k = C (log(1/eps) + w)`, `delta = theta^k`; the
/// search is over `C`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionCalibration {
    pub theta: f64,
    pub w: usize,
    pub eps: f64,
    pub a: f64,
    pub c_lo: f64,
    pub c_hi: f64,
    pub j1_fraction: f64,
    pub spill_budget: usize,
    pub trials: u64,
    pub rng_seed: u64,
}

/// What a restriction calibration ran on, as recorded in its entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RestrictionFrozen {
    pub corpus: CorpusSpec,
    pub shape: RestrictionCalibration,
}

/// Smallest `C` for which the one-bit-product event and `|Q| <= budget`
/// both fail with frequency at most `eps` on every corpus instance.
pub fn calibrate_restriction(spec: &CorpusSpec, shape: &RestrictionCalibration) -> Result<Calibration, HarnessError> {
    if spec.count == 0 {
        return Err(HarnessError::EmptyCorpus);
    }
    let corpus = build_corpus(spec)?;
    let corpus = &corpus[..];
    let n = spec.n;
    let knob = Knob { name: "C", lo: shape.c_lo, hi: shape.c_hi, resolution: 1.0 / 16.0, integer: false };
    let params = |c: f64| LongProductParams::scaled(c, shape.a, Provenance::Calibrated);
    let p = 0.5f64.powi(params(1.0).b(shape.theta, shape.w) as i32);
    let cfg = RestrictionConfig {
        j1_fraction: shape.j1_fraction,
        iid_p: p,
        spill_budget: shape.spill_budget,
        mode: RestrictionMode::MonteCarlo { trials: shape.trials, rng_seed: shape.rng_seed },
        alpha: 0.05,
    };
    let (c, worst, probes) = search_knob(&knob, shape.eps, |c| {
        let (d, t) = long_product_noise(n, shape.theta, shape.w, shape.eps, &params(c))?;
        let r = restriction_experiment(corpus, &d, &t, &cfg)?;
        Ok((1.0 - r.min_lemma).max(1.0 - r.min_q_ok))
    })?;
    let (d, t) = long_product_noise(n, shape.theta, shape.w, shape.eps, &params(c))?;
    Ok(Calibration {
        entry: CalibratedEntry {
            construction: "long-products".into(),
            group: spec.group.clone(),
            n,
            eps: shape.eps,
            params: vec![
                Param::new("c", c, Provenance::Calibrated),
                Param::new("a", shape.a, Provenance::Override),
                Param::new("w", shape.w as f64, Provenance::Override),
                Param::new("theta", shape.theta, Provenance::Derived),
            ],
            worst_delta: worst,
            corpus: serde_json::to_string(&RestrictionFrozen { corpus: spec.clone(), shape: shape.clone() }).expect("shape serializes"),
        },
        seed_len: d.seed_len() + t.seed_len(),
        probes,
    })
}
