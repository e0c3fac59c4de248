//! Exact output distributions and biases.

use rayon::prelude::*;

use super::{BlockProduct, ModelError, Part};
use crate::randomness::{OutputDist, Sampler};
use crate::rep::{CMatrix, GDistribution, Irrep};

/// Seed spaces up to this size are enumerated when the output space is too large.
pub const MAX_SEED_ENUMERATION: f64 = (1u64 << 26) as f64;

/// What the product is fed.
#[derive(Clone, Copy, Debug)]
pub enum InputDist<'a> {
    Uniform,
    Sampler(&'a Sampler),
    /// A precomputed exact input distribution.
    Exact(&'a OutputDist),
}

/// Per-part distribution over the group under uniform input, as sparse (element, mass) pairs.
fn part_masses(f: &BlockProduct, part: &Part<'_>) -> Vec<(usize, f64)> {
    let e = f.group().identity();
    match part {
        Part::Block(b) => {
            let beta = b.one_prob();
            if b.base == e || beta == 0.0 {
                vec![(e, 1.0)]
            } else if beta == 1.0 {
                vec![(b.base, 1.0)]
            } else {
                vec![(e, 1.0 - beta), (b.base, beta)]
            }
        }
        Part::Spill(s) => {
            let mut m = vec![0.0; f.group().order()];
            let w = 1.0 / s.values.len() as f64;
            s.values.iter().for_each(|&v| m[v] += w);
            m.into_iter().enumerate().filter(|x| x.1 > 0.0).collect()
        }
    }
}

fn uniform_distribution(f: &BlockProduct) -> Vec<f64> {
    let g = f.group();
    let mut acc = vec![0.0; g.order()];
    acc[g.identity()] = 1.0;
    for part in f.parts() {
        let masses = part_masses(f, &part);
        if masses.len() == 1 && masses[0].0 == g.identity() {
            continue;
        }
        let mut next = vec![0.0; g.order()];
        for (a, &pa) in acc.iter().enumerate() {
            if pa == 0.0 {
                continue;
            }
            for &(b, pb) in &masses {
                next[g.mul(a, b)] += pa * pb;
            }
        }
        acc = next;
    }
    acc
}

fn pushforward(f: &BlockProduct, d: &OutputDist) -> Vec<f64> {
    let mut acc = vec![0.0; f.group().order()];
    for (idx, &p) in d.probs().iter().enumerate() {
        if p > 0.0 {
            acc[f.eval_index(idx as u64)] += p;
        }
    }
    acc
}

fn enumerate_seeds(f: &BlockProduct, s: &Sampler) -> Vec<f64> {
    let shape = s.shape().to_vec();
    let total = s.seed_space() as u64;
    let order = f.group().order();
    // fixed chunking keeps the reduction order independent of the thread count
    let chunk = 1u64 << 14;
    let counts = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut counts = vec![0u64; order];
            for k in c * chunk..((c + 1) * chunk).min(total) {
                let mut rest = k;
                let seed: Vec<u64> = shape
                    .iter()
                    .map(|&r| {
                        let v = rest % r;
                        rest /= r;
                        v
                    })
                    .collect();
                counts[f.eval_unchecked(&s.sample(&seed))] += 1;
            }
            counts
        })
        .reduce(|| vec![0u64; order], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    counts.into_iter().map(|c| c as f64 / total as f64).collect()
}

/// Exact distribution of `f(X)`.
///
/// Uniform input convolves one factor at a time. A sampler is pushed
/// forward through its exact output distribution when that fits, else its
/// seeds are enumerated (at most 2^26).
pub fn exact_output_distribution(f: &BlockProduct, input: InputDist<'_>) -> Result<GDistribution, ModelError> {
    let probs = match input {
        InputDist::Uniform => uniform_distribution(f),
        InputDist::Exact(d) => {
            if d.n() != f.n() || d.q() != 2 {
                return Err(ModelError::LengthMismatch { expected: f.n(), got: d.n() });
            }
            pushforward(f, d)
        }
        InputDist::Sampler(s) => {
            if s.n() != f.n() || s.q() != 2 {
                return Err(ModelError::LengthMismatch { expected: f.n(), got: s.n() });
            }
            match s.exact_dist() {
                Ok(d) => pushforward(f, &d),
                Err(_) if s.seed_space() <= MAX_SEED_ENUMERATION => enumerate_seeds(f, s),
                Err(e) => return Err(ModelError::TooLarge(e.to_string())),
            }
        }
    };
    let total: f64 = probs.iter().sum();
    GDistribution::new(probs.into_iter().map(|p| p / total).collect()).map_err(|e| ModelError::Invalid(e.to_string()))
}

/// `E[rho(f(U))]` as the ordered product of per-factor expectations;
/// a block contributes `(1 - beta) I + beta rho(g)`.
pub fn exact_bias(f: &BlockProduct, rho: &Irrep) -> CMatrix {
    let d = rho.dim;
    let mut acc = CMatrix::identity(d);
    for part in f.parts() {
        let m = match part {
            Part::Block(b) => {
                let beta = b.one_prob();
                CMatrix::identity(d).scale_re(1.0 - beta).add(&rho.image(b.base).scale_re(beta))
            }
            Part::Spill(s) => {
                let w = 1.0 / s.values.len() as f64;
                s.values.iter().fold(CMatrix::zeros(d), |m, &v| m.add(&rho.image(v).scale_re(w)))
            }
        };
        acc = acc.mul(&m);
    }
    acc
}
