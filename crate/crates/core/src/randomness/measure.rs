//! Oracles that check a sampler's declared guarantee.

use rand::Rng;
use serde::Serialize;

use super::dist::{outcome_count, subsets, OutputDist};
use super::sampler::{Guarantee, Sampler};
use super::RandError;

/// Slack for floating-point round-off in exact checks.
pub const EXACT_TOL: f64 = 1e-9;
/// Largest number of polynomials the fooling oracle will enumerate.
pub const MAX_POLYNOMIALS: u64 = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo { trials: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct BiasReport {
    pub mode: Mode,
    /// Largest nontrivial character bias (estimate in Monte-Carlo mode).
    pub max_bias: f64,
    /// The maximising character, as coefficients a_i.
    pub character: Vec<u8>,
    /// Three standard deviations in Monte-Carlo mode, 0 when exact.
    pub radius: f64,
}

/// Largest `|E[w^{a.Y}]|` over nonzero `a`.
///
/// Monte-Carlo mode takes an empirical distribution over `trials` seeds;
/// each character estimate has standard deviation at most `1/sqrt(trials)`.
pub fn measured_bias(s: &Sampler, mode: Mode, rng: &mut impl Rng) -> Result<BiasReport, RandError> {
    let (dist, radius) = match mode {
        Mode::Exact => (s.exact_dist()?, 0.0),
        Mode::MonteCarlo { trials } => {
            let size = outcome_count(s.n(), s.q())
                .ok_or_else(|| RandError::TooLargeForExact { what: format!("output space {}^{}", s.q(), s.n()) })?;
            let mut counts = vec![0u64; size];
            let q = s.q() as usize;
            for _ in 0..trials.max(1) {
                let y = s.sample_random(rng);
                counts[y.iter().rev().fold(0, |acc, &v| acc * q + v as usize)] += 1;
            }
            (OutputDist::from_counts(s.n(), s.q(), &counts), 3.0 / (trials.max(1) as f64).sqrt())
        }
    };
    let (max_bias, arg) = dist.max_bias();
    Ok(BiasReport { mode, max_bias, character: dist.values(arg), radius })
}

/// Max parity bias of `Y` restricted to the other coordinates, conditioned on `Y_{fixed} = values`.
pub fn conditioned_bias(s: &Sampler, fixed: &[usize], values: &[u8]) -> Result<f64, RandError> {
    if fixed.len() > 10 {
        return Err(RandError::InvalidParameter("at most 10 fixed coordinates".into()));
    }
    if fixed.len() != values.len() {
        return Err(RandError::LengthMismatch { expected: fixed.len(), got: values.len() });
    }
    if fixed.iter().any(|&i| i >= s.n()) {
        return Err(RandError::InvalidParameter("fixed coordinate out of range".into()));
    }
    conditioned_bias_of(&s.exact_dist()?, fixed, values)
}

pub fn conditioned_bias_of(d: &OutputDist, fixed: &[usize], values: &[u8]) -> Result<f64, RandError> {
    Ok(d.condition(fixed, values)?.max_bias().0)
}

/// `max_f TV(f(Y), f(U))` over every polynomial of degree `<= d` over F_q in
/// `n` variables with individual exponents `< q`. Constant terms and
/// scalar multiples do not change the distance and are skipped.
pub fn poly_fooling_error(dist: &OutputDist, d: usize) -> Result<f64, RandError> {
    let (n, q) = (dist.n(), dist.q() as usize);
    let monomials = monomials(n, q, d);
    let free = monomials.len().saturating_sub(1) as u32;
    let count = (q as u64).checked_pow(free).filter(|&c| c <= MAX_POLYNOMIALS);
    let Some(_) = count else {
        return Err(RandError::TooLargeForExact { what: format!("{} monomials over F_{q}", monomials.len()) });
    };
    if monomials.is_empty() {
        return Ok(0.0);
    }
    let points = dist.probs().len();
    let pts: Vec<Vec<u8>> = (0..points).map(|i| dist.values(i)).collect();
    // value table of every monomial at every point
    let table: Vec<Vec<u8>> = monomials
        .iter()
        .map(|mono| {
            pts.iter()
                .map(|x| mono.iter().zip(x).fold(1usize, |acc, (&e, &v)| acc * (v as usize).pow(e as u32) % q) as u8)
                .collect()
        })
        .collect();
    let probs = dist.probs();
    let uni = 1.0 / points as f64;
    let mut values = table[0].clone(); // leading coefficient fixed to 1
    let mut coeffs = vec![0usize; monomials.len()];
    let mut worst: f64 = 0.0;
    let mut hist_y = vec![0.0; q];
    let mut hist_u = vec![0.0; q];
    // the leading nonzero coefficient is normalised to 1: iterate over which
    // monomial leads, then over all coefficients of the later ones
    for lead in 0..monomials.len() {
        values.copy_from_slice(&table[lead]);
        coeffs.iter_mut().for_each(|c| *c = 0);
        loop {
            hist_y.iter_mut().for_each(|h| *h = 0.0);
            hist_u.iter_mut().for_each(|h| *h = 0.0);
            for (i, &v) in values.iter().enumerate() {
                hist_y[v as usize] += probs[i];
                hist_u[v as usize] += uni;
            }
            let tv = 0.5 * hist_y.iter().zip(&hist_u).map(|(a, b)| (a - b).abs()).sum::<f64>();
            worst = worst.max(tv);
            // odometer over coefficients of monomials after `lead`
            let mut i = lead + 1;
            loop {
                if i == monomials.len() {
                    break;
                }
                coeffs[i] += 1;
                for (v, &t) in values.iter_mut().zip(&table[i]) {
                    *v = ((*v as usize + t as usize) % q) as u8;
                }
                if coeffs[i] < q {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
            if i == monomials.len() {
                break;
            }
        }
    }
    Ok(worst)
}

/// Exponent vectors of the non-constant monomials of degree `<= d`, exponents `< q`.
fn monomials(n: usize, q: usize, d: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = vec![0u8; n];
    fn rec(i: usize, left: usize, q: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == cur.len() {
            if cur.iter().any(|&e| e > 0) {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..q.min(left + 1) {
            cur[i] = e as u8;
            rec(i + 1, left - e, q, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, d, q, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct Measurement {
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

impl Measurement {
    fn at_most(quantity: &str, value: f64, bound: f64) -> Self {
        Measurement { quantity: quantity.into(), value, bound, pass: value <= bound + EXACT_TOL }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub sampler: String,
    pub guarantee: Guarantee,
    pub seed_len: u32,
    pub measured: Vec<Measurement>,
    pub pass: bool,
}

/// Exact check of the sampler's declared guarantee.
pub fn audit(s: &Sampler) -> Result<AuditReport, RandError> {
    let dist = s.exact_dist()?;
    let measured = audit_dist(&dist, s.guarantee())?;
    let pass = measured.iter().all(|m| m.pass);
    Ok(AuditReport { sampler: s.to_string(), guarantee: s.guarantee().clone(), seed_len: s.seed_len(), measured, pass })
}

pub fn audit_dist(dist: &OutputDist, g: &Guarantee) -> Result<Vec<Measurement>, RandError> {
    let n = dist.n();
    let out = match *g {
        Guarantee::Uniform => vec![Measurement::at_most("tv_from_uniform", dist.tv(&OutputDist::uniform(n, dist.q())?), 0.0)],
        Guarantee::Constant => {
            let top = dist.probs().iter().copied().fold(0.0, f64::max);
            vec![Measurement::at_most("mass_off_point", 1.0 - top, 0.0)]
        }
        Guarantee::Biased { eps } => vec![Measurement::at_most("max_bias", dist.max_bias().0, eps)],
        Guarantee::KWise { k, block } => {
            let blocks = n / block.max(1);
            let k = k.min(blocks);
            let mut worst: f64 = 0.0;
            for subset in subsets(blocks, k) {
                let coords: Vec<usize> = subset.iter().flat_map(|&j| j * block..(j + 1) * block).collect();
                let m = dist.marginal(&coords);
                let target = 1.0 / m.probs().len() as f64;
                worst = m.probs().iter().fold(worst, |w, &p| w.max((p - target).abs()));
            }
            vec![Measurement::at_most("kwise_linf", worst, 0.0)]
        }
        Guarantee::KWiseBiased { k, b } => {
            let one = (-(b as f64)).exp2();
            vec![Measurement::at_most("kwise_linf", dist.kwise_linf(k, one), 0.0)]
        }
        Guarantee::AlmostKWise { k, b, delta } => {
            let one = (-(b as f64)).exp2();
            let marg = dist.marginal_ones().iter().map(|m| (m - one).abs()).fold(0.0, f64::max);
            let mut v = vec![
                Measurement::at_most("marginal_error", marg, 0.0),
                Measurement::at_most("kwise_linf", dist.kwise_linf(k, one), delta),
            ];
            // the (delta, k)-biased reading, reported alongside
            v.push(Measurement { quantity: "bias_weight_le_k".into(), value: dist.max_bias_weight(k), bound: f64::NAN, pass: true });
            v
        }
        Guarantee::DegreeFooling { d, eps } => vec![Measurement::at_most("poly_fooling_error", poly_fooling_error(dist, d)?, eps)],
        Guarantee::Marginals { one_prob, tol } => {
            let err = dist.marginal_ones().iter().map(|m| (m - one_prob).abs()).fold(0.0, f64::max);
            vec![Measurement::at_most("marginal_error", err, tol)]
        }
        Guarantee::Unspecified => vec![],
    };
    Ok(out)
}

/// Exact iid Bernoulli(`one_prob`) distribution on n bits.
pub fn bernoulli_product(n: usize, one_prob: f64) -> Result<OutputDist, RandError> {
    let size = outcome_count(n, 2).ok_or_else(|| RandError::TooLargeForExact { what: format!("output space 2^{n}") })?;
    let probs = (0..size)
        .map(|i: usize| {
            let ones = i.count_ones() as i32;
            one_prob.powi(ones) * (1.0 - one_prob).powi(n as i32 - ones)
        })
        .collect();
    Ok(OutputDist::from_probs(n, 2, probs))
}
