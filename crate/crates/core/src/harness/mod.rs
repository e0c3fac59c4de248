//! Ground truth for the generators: exact and Monte-Carlo distances,
//! per-irrep Fourier gaps, restriction experiments, calibration and reports.

mod calibrate;
mod experiment;
mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::models::{exact_output_distribution, BlockProduct, InputDist, ModelError};
use crate::prg::PrgError;
use crate::randomness::{OutputDist, RandError, Sampler};
use crate::rep::{closeness_bound, fourier_coefficient, op_norm, GDistribution, IrrepSet, RepError};

pub use calibrate::{
    calibrate, calibrate_restriction, search_knob, Calibration, CalibrationTarget, Knob, RestrictionCalibration,
    RestrictionFrozen,
};
pub use experiment::{
    iid_j1_mean, restriction_experiment, InstanceRestriction, RestrictionConfig, RestrictionMode, RestrictionReport,
};
pub use report::{build_corpus, evaluate, CorpusSpec, EvalReport, ExperimentConfig, InstanceResult, Mode, REPORT_SCHEMA};

/// Exact evaluation enumerates at most this many seed bits when no
/// structural law is available.
pub const MAX_EXACT_SEED_BITS: u32 = 26;
/// Exact evaluation handles at most this many input bits.
pub const MAX_EXACT_N: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("too large for exact evaluation: {0}")]
    TooLarge(String),
    #[error("no parameter in range meets the target: {0}")]
    Unsatisfiable(String),
    #[error("the corpus is empty")]
    EmptyCorpus,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Prg(#[from] PrgError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Rand(#[from] RandError),
}

/// The exact law of a sampler's output, for reuse across a corpus.
///
/// Structural laws (convolutions of small-bias spans, k-wise products)
/// are used when available, so seeds longer than
/// [`MAX_EXACT_SEED_BITS`] are fine for the constructions in this crate.
pub fn exact_law(p: &Sampler) -> Result<OutputDist, HarnessError> {
    if p.n() > MAX_EXACT_N {
        return Err(HarnessError::TooLarge(format!("n = {} exceeds {MAX_EXACT_N}", p.n())));
    }
    match p.exact_dist() {
        Ok(d) => Ok(d),
        Err(RandError::TooLargeForExact { what }) => Err(HarnessError::TooLarge(what)),
        Err(e) => Err(e.into()),
    }
}

/// `1/2 sum_g |Pr[f(P) = g] - Pr[f(U) = g]|`, exactly.
pub fn exact_distance(f: &BlockProduct, p: &Sampler) -> Result<f64, HarnessError> {
    exact_distance_law(f, &exact_law(p)?)
}

/// [`exact_distance`] against a precomputed law of the generator's output.
pub fn exact_distance_law(f: &BlockProduct, law: &OutputDist) -> Result<f64, HarnessError> {
    let (fp, fu) = laws(f, law)?;
    Ok(fp.tv(&fu))
}

fn laws(f: &BlockProduct, law: &OutputDist) -> Result<(GDistribution, GDistribution), HarnessError> {
    Ok((exact_output_distribution(f, InputDist::Exact(law))?, exact_output_distribution(f, InputDist::Uniform)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// With probability at least `1 - alpha` the true distance is within `estimate +- radius`.
    pub radius: f64,
    pub trials: u64,
    pub alpha: f64,
}

impl McEstimate {
    pub fn contains(&self, x: f64) -> bool {
        (x - self.estimate).abs() <= self.radius
    }
}

/// Radius `sqrt(|G| ln(2/alpha) / (2 trials))` for a plug-in TV estimate over `outcomes` outcomes.
pub fn mc_radius(outcomes: usize, trials: u64, alpha: f64) -> f64 {
    (outcomes as f64 * (2.0 / alpha).ln() / (2.0 * trials as f64)).sqrt()
}

const MC_CHUNK: u64 = 1 << 12;

/// Plug-in estimate of the distance from `trials` samples of `f(P)`
/// against the exact law of `f(U)`. Chunk `c` draws from stream `c` of
/// the seeded generator, so the result does not depend on the thread count.
pub fn mc_distance(f: &BlockProduct, p: &Sampler, trials: u64, alpha: f64, rng_seed: u64) -> Result<McEstimate, HarnessError> {
    if trials < 1000 {
        return Err(HarnessError::Precondition(format!("at least 1000 trials are needed, got {trials}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(HarnessError::Precondition(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    if p.n() != f.n() {
        return Err(PrgError::LengthMismatch { expected: f.n(), got: p.n() }.into());
    }
    let m = f.group().order();
    let counts = (0..trials.div_ceil(MC_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(c);
            let mut counts = vec![0u64; m];
            for _ in c * MC_CHUNK..((c + 1) * MC_CHUNK).min(trials) {
                counts[f.eval_unchecked(&p.sample_random(&mut rng))] += 1;
            }
            counts
        })
        .reduce(|| vec![0u64; m], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let fu = exact_output_distribution(f, InputDist::Uniform)?;
    let estimate = 0.5 * counts.iter().zip(fu.probs()).map(|(&c, &u)| (c as f64 / trials as f64 - u).abs()).sum::<f64>();
    Ok(McEstimate { estimate, radius: mc_radius(m, trials, alpha), trials, alpha })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierGapReport {
    /// `||E rho(f(P)) - E rho(f(U))||_op`, one per irrep of the set.
    pub gaps: Vec<f64>,
    pub max_gap: f64,
    /// `sqrt(|G|) max_gap`, an upper bound on `delta`.
    pub bound: f64,
    pub delta: f64,
}

pub fn fourier_gap_report(f: &BlockProduct, p: &Sampler, set: &IrrepSet) -> Result<FourierGapReport, HarnessError> {
    fourier_gap_report_law(f, &exact_law(p)?, set)
}

pub fn fourier_gap_report_law(f: &BlockProduct, law: &OutputDist, set: &IrrepSet) -> Result<FourierGapReport, HarnessError> {
    let (fp, fu) = laws(f, law)?;
    let gaps = set
        .irreps
        .iter()
        .map(|rho| op_norm(&fourier_coefficient(&fp, rho).sub(&fourier_coefficient(&fu, rho))))
        .collect::<Result<Vec<_>, _>>()?;
    let c = closeness_bound(&fp, &fu, set)?;
    Ok(FourierGapReport { gaps, max_gap: c.max_gap, bound: c.bound, delta: c.tv })
}
