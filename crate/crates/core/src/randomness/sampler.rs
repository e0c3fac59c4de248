//! Seeded samplers: deterministic maps from a seed to a vector over F_q.
//!
//! A seed is a list of components, component `i` ranging over `0..shape[i]`.
//! The seed length in bits is `sum ceil(log2 shape[i])`. Composite samplers
//! concatenate their children's seeds in order.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::dist::{outcome_count, OutputDist};
use super::fields::{ceil_log, Gf2m, Gfpm};
use super::measure::bernoulli_product;
use super::span::{fp_add_span, F2SpanMixture};
use super::RandError;

/// Seed spaces up to this size may be enumerated outright.
pub const MAX_ENUMERATION: f64 = (1u64 << 26) as f64;
/// Below this size enumeration is preferred over structural computation.
const CHEAP_ENUMERATION: f64 = (1u64 << 14) as f64;

/// A caller-defined sampler, plugged into the tree as a leaf.
pub trait SampleMap: Send + Sync + fmt::Debug {
    fn n(&self) -> usize;
    fn q(&self) -> u32 {
        2
    }
    fn shape(&self) -> Vec<u64>;
    fn sample(&self, seed: &[u64]) -> Vec<u8>;
    /// An exact distribution computed more cleverly than by enumeration.
    fn exact_dist(&self) -> Option<Result<OutputDist, RandError>> {
        None
    }
    fn describe(&self) -> String;
}

/// What a sampler promises; each is checked by `audit`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Guarantee {
    Uniform,
    Constant,
    /// Every nontrivial parity (q = 2) or character (q = p) has |bias| <= eps.
    Biased { eps: f64 },
    /// Any k blocks of `block` symbols are exactly uniform.
    KWise { k: usize, block: usize },
    /// Any k coordinates are exactly independent with Pr[1] = 2^-b.
    KWiseBiased { k: usize, b: u32 },
    /// Marginals exactly 2^-b; any k coordinates within `delta` (l_inf) of the product.
    AlmostKWise { k: usize, b: u32, delta: f64 },
    /// Every polynomial of degree <= d over F_q has output distance <= eps.
    DegreeFooling { d: usize, eps: f64 },
    /// Each coordinate has Pr[nonzero] within `tol` of `one_prob`.
    Marginals { one_prob: f64, tol: f64 },
    /// No promise of its own; the constructions using it are measured instead.
    Unspecified,
}

#[derive(Clone, Debug)]
pub enum Kind {
    Uniform { n: usize, q: u32 },
    Constant { values: Vec<u8>, q: u32 },
    SmallBiasF2 { n: usize, field: Gf2m },
    SmallBiasFp { n: usize, field: Gfpm },
    /// h(j) = sum_t c_t j^t over F_{2^m}, truncated to r bits; output is h(0..n) concatenated.
    Kwise { n: usize, r: usize, k: usize, field: Gf2m },
    /// T_j = AND of the r = b bits of h(j).
    KwiseBiased { n: usize, b: usize, k: usize, field: Gf2m },
    /// T_i = AND_b(D_i xor U_b), D on n*b bits.
    AlmostKwiseBiased { n: usize, b: usize, d: Box<Sampler> },
    Xor(Vec<Sampler>),
    SumModP(Vec<Sampler>),
    PowerResidue(Box<Sampler>),
    Complement(Box<Sampler>),
    /// D xor (T and base)
    FkLayer { base: Box<Sampler>, d: Box<Sampler>, t: Box<Sampler> },
    /// Output coordinate i is inner coordinate perm[i].
    Permuted { inner: Box<Sampler>, perm: Vec<usize> },
    Custom(Arc<dyn SampleMap>),
}

#[derive(Clone, Debug)]
pub struct Sampler {
    kind: Kind,
    guarantee: Guarantee,
    shape: Vec<u64>,
    n: usize,
    q: u32,
}

fn bits_for(radix: u64) -> u32 {
    if radix <= 1 {
        0
    } else {
        64 - (radix - 1).leading_zeros()
    }
}

impl Sampler {
    fn build(kind: Kind, guarantee: Guarantee) -> Sampler {
        let (n, q, shape) = match &kind {
            Kind::Uniform { n, q } => {
                let shape = if *q == 2 {
                    (0..n.div_ceil(32)).map(|c| 1u64 << (32.min(n - 32 * c))).collect()
                } else {
                    vec![*q as u64; *n]
                };
                (*n, *q, shape)
            }
            Kind::Constant { values, q } => (values.len(), *q, vec![]),
            Kind::SmallBiasF2 { n, field } => (*n, 2, vec![field.size(); 2]),
            Kind::SmallBiasFp { n, field } => (*n, field.p() as u32, vec![field.size(); 2]),
            Kind::Kwise { n, r, k, field } => (n * r, 2, vec![field.size(); *k]),
            Kind::KwiseBiased { n, k, field, .. } => (*n, 2, vec![field.size(); *k]),
            Kind::AlmostKwiseBiased { n, b, d } => {
                let mut s = d.shape.clone();
                s.push(1u64 << b);
                (*n, 2, s)
            }
            Kind::Xor(cs) | Kind::SumModP(cs) => (cs[0].n, cs[0].q, cs.iter().flat_map(|c| c.shape.clone()).collect()),
            Kind::PowerResidue(c) => (c.n, 2, c.shape.clone()),
            Kind::Complement(c) => (c.n, c.q, c.shape.clone()),
            Kind::FkLayer { base, d, t } => {
                (base.n, 2, [&base.shape, &d.shape, &t.shape].into_iter().flatten().copied().collect())
            }
            Kind::Permuted { inner, .. } => (inner.n, inner.q, inner.shape.clone()),
            Kind::Custom(m) => (m.n(), m.q(), m.shape()),
        };
        Sampler { kind, guarantee, shape, n, q }
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn guarantee(&self) -> &Guarantee {
        &self.guarantee
    }

    pub fn with_guarantee(mut self, g: Guarantee) -> Self {
        self.guarantee = g;
        self
    }

    /// Output length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Alphabet size.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn shape(&self) -> &[u64] {
        &self.shape
    }

    /// Seed length in bits.
    pub fn seed_len(&self) -> u32 {
        self.shape.iter().map(|&r| bits_for(r)).sum()
    }

    /// Number of seeds, as a float (it may not fit an integer).
    pub fn seed_space(&self) -> f64 {
        self.shape.iter().map(|&r| r as f64).product()
    }

    pub fn random_seed(&self, rng: &mut impl Rng) -> Vec<u64> {
        self.shape.iter().map(|&r| rng.gen_range(0..r)).collect()
    }

    /// Seed from a bit string: each component takes its `ceil(log2 radix)`
    /// bits (least significant first), reduced modulo the radix.
    pub fn seed_from_bits(&self, bits: &[bool]) -> Result<Vec<u64>, RandError> {
        let need = self.seed_len() as usize;
        if bits.len() < need {
            return Err(RandError::LengthMismatch { expected: need, got: bits.len() });
        }
        let mut pos = 0;
        Ok(self
            .shape
            .iter()
            .map(|&r| {
                let b = bits_for(r) as usize;
                let v = (0..b).fold(0u64, |acc, i| acc | (bits[pos + i] as u64) << i);
                pos += b;
                if r == 0 {
                    0
                } else {
                    v % r
                }
            })
            .collect())
    }

    /// Panics if the seed does not match `shape()`.
    pub fn sample(&self, seed: &[u64]) -> Vec<u8> {
        assert_eq!(seed.len(), self.shape.len(), "seed has the wrong number of components");
        match &self.kind {
            Kind::Uniform { n, q } => {
                if *q == 2 {
                    (0..*n).map(|i| (seed[i / 32] >> (i % 32) & 1) as u8).collect()
                } else {
                    seed.iter().map(|&v| v as u8).collect()
                }
            }
            Kind::Constant { values, .. } => values.clone(),
            Kind::SmallBiasF2 { n, field } => {
                let (x, y) = (seed[0], seed[1]);
                let mut pw = 1u64;
                (0..*n)
                    .map(|_| {
                        let bit = ((pw & y).count_ones() & 1) as u8;
                        pw = field.mul(pw, x);
                        bit
                    })
                    .collect()
            }
            Kind::SmallBiasFp { n, field } => {
                let p = field.p();
                let x = field.unpack(seed[0]);
                let y = field.unpack(seed[1]);
                let mut pw = field.unpack(1);
                (0..*n)
                    .map(|_| {
                        let v = pw.iter().zip(&y).map(|(a, b)| a * b).sum::<u64>() % p;
                        pw = field.mul_vec(&pw, &x);
                        v as u8
                    })
                    .collect()
            }
            Kind::Kwise { n, r, field, .. } => {
                let mut out = Vec::with_capacity(n * r);
                for j in 0..*n {
                    let h = field.eval_poly(seed, j as u64);
                    out.extend((0..*r).map(|u| (h >> u & 1) as u8));
                }
                out
            }
            Kind::KwiseBiased { n, b, field, .. } => {
                let mask = (1u64 << b) - 1;
                (0..*n).map(|j| (field.eval_poly(seed, j as u64) & mask == mask) as u8).collect()
            }
            Kind::AlmostKwiseBiased { n, b, d } => {
                let (ds, u) = seed.split_at(seed.len() - 1);
                let dv = d.sample(ds);
                let mask = (1u64 << b) - 1;
                (0..*n)
                    .map(|i| {
                        let block = (0..*b).fold(0u64, |acc, j| acc | (dv[i * b + j] as u64) << j);
                        ((block ^ u[0]) & mask == mask) as u8
                    })
                    .collect()
            }
            Kind::Xor(cs) => {
                let mut out = vec![0u8; self.n];
                let mut rest = seed;
                for c in cs {
                    let (s, r) = rest.split_at(c.shape.len());
                    rest = r;
                    out.iter_mut().zip(c.sample(s)).for_each(|(a, b)| *a ^= b);
                }
                out
            }
            Kind::SumModP(cs) => {
                let mut out = vec![0u8; self.n];
                let mut rest = seed;
                for c in cs {
                    let (s, r) = rest.split_at(c.shape.len());
                    rest = r;
                    out.iter_mut().zip(c.sample(s)).for_each(|(a, b)| *a = ((*a as u32 + b as u32) % self.q) as u8);
                }
                out
            }
            Kind::PowerResidue(c) => c.sample(seed).into_iter().map(|v| (v != 0) as u8).collect(),
            Kind::Complement(c) => c.sample(seed).into_iter().map(|v| 1 - v.min(1)).collect(),
            Kind::FkLayer { base, d, t } => {
                let (sb, rest) = seed.split_at(base.shape.len());
                let (sd, st) = rest.split_at(d.shape.len());
                let (b, dv, tv) = (base.sample(sb), d.sample(sd), t.sample(st));
                (0..self.n).map(|i| dv[i] ^ (tv[i] & b[i])).collect()
            }
            Kind::Permuted { inner, perm } => {
                let v = inner.sample(seed);
                perm.iter().map(|&j| v[j]).collect()
            }
            Kind::Custom(m) => m.sample(seed),
        }
    }

    pub fn sample_random(&self, rng: &mut impl Rng) -> Vec<u8> {
        self.sample(&self.random_seed(rng))
    }

    /// Exact output distribution.
    ///
    /// Leaves with small seed spaces are enumerated; larger ones and all
    /// composites are computed structurally (spans, convolutions, push-forwards).
    pub fn exact_dist(&self) -> Result<OutputDist, RandError> {
        if outcome_count(self.n, self.q).is_none() {
            return Err(RandError::TooLargeForExact { what: format!("output space {}^{}", self.q, self.n) });
        }
        let space = self.seed_space();
        if space <= CHEAP_ENUMERATION {
            return self.enumerate();
        }
        match self.structural()? {
            Some(d) => Ok(d),
            None if space <= MAX_ENUMERATION => self.enumerate(),
            None => Err(RandError::TooLargeForExact { what: format!("seed space 2^{:.1}", space.log2()) }),
        }
    }

    /// Distribution by running every seed.
    pub fn enumerate(&self) -> Result<OutputDist, RandError> {
        let space = self.seed_space();
        if space > MAX_ENUMERATION {
            return Err(RandError::TooLargeForExact { what: format!("seed space 2^{:.1}", space.log2()) });
        }
        let size = outcome_count(self.n, self.q)
            .ok_or_else(|| RandError::TooLargeForExact { what: format!("output space {}^{}", self.q, self.n) })?;
        let mut counts = vec![0u64; size];
        let mut seed = vec![0u64; self.shape.len()];
        let q = self.q as usize;
        loop {
            let out = self.sample(&seed);
            let idx = out.iter().rev().fold(0usize, |acc, &v| acc * q + v as usize);
            counts[idx] += 1;
            // odometer
            let mut i = 0;
            loop {
                if i == seed.len() {
                    return Ok(OutputDist::from_counts(self.n, self.q, &counts));
                }
                seed[i] += 1;
                if seed[i] < self.shape[i] {
                    break;
                }
                seed[i] = 0;
                i += 1;
            }
        }
    }

    fn structural(&self) -> Result<Option<OutputDist>, RandError> {
        let d = match &self.kind {
            Kind::Uniform { n, q } => OutputDist::uniform(*n, *q)?,
            Kind::Constant { values, q } => OutputDist::point(*q, values)?,
            Kind::SmallBiasF2 { n, field } => small_bias_f2_dist(*n, field),
            Kind::SmallBiasFp { n, field } => small_bias_fp_dist(*n, field),
            Kind::Kwise { n, r, k, field } => OutputDist::from_probs(n * r, 2, kwise_dist(*n, *r, *k, field)),
            Kind::KwiseBiased { n, b, k, field } => {
                // k >= n distinct points: the hash values are fully independent
                if k >= n {
                    return bernoulli_product(*n, 0.5f64.powi(*b as i32)).map(Some);
                }
                if outcome_count(n * b, 2).is_none() {
                    return Ok(None);
                }
                let inner = OutputDist::from_probs(n * b, 2, kwise_dist(*n, *b, *k, field));
                inner.pushforward(*n, 2, |idx| and_blocks(idx, *n, *b, 0))?
            }
            Kind::AlmostKwiseBiased { n, b, d } => {
                if outcome_count(n * b, 2).is_none() {
                    return Ok(None);
                }
                let dd = d.exact_dist()?;
                let w = 1.0 / (1u64 << b) as f64;
                let mut parts = Vec::with_capacity(1 << b);
                for u in 0..(1u64 << b) {
                    parts.push((w, dd.pushforward(*n, 2, |idx| and_blocks(idx, *n, *b, u))?));
                }
                OutputDist::mixture(&parts)
            }
            Kind::Xor(cs) => {
                let mut acc = cs[0].exact_dist()?;
                for c in &cs[1..] {
                    acc = acc.xor_convolve(&c.exact_dist()?);
                }
                acc
            }
            Kind::SumModP(cs) => {
                let mut acc = cs[0].exact_dist()?;
                for c in &cs[1..] {
                    acc = acc.add_convolve(&c.exact_dist()?);
                }
                acc
            }
            Kind::PowerResidue(c) => {
                let inner = c.exact_dist()?;
                let q = c.q as usize;
                let n = c.n;
                inner.pushforward(n, 2, |mut idx| {
                    let mut out = 0;
                    for i in 0..n {
                        out |= ((idx % q != 0) as usize) << i;
                        idx /= q;
                    }
                    out
                })?
            }
            Kind::Complement(c) => {
                if c.q != 2 {
                    return Ok(None);
                }
                let mask = (1usize << c.n) - 1;
                c.exact_dist()?.pushforward(c.n, 2, |idx| idx ^ mask)?
            }
            Kind::FkLayer { base, d, t } => {
                let masked = and_dist(&t.exact_dist()?, &base.exact_dist()?);
                d.exact_dist()?.xor_convolve(&masked)
            }
            Kind::Permuted { inner, perm } => inner.exact_dist()?.permute(perm),
            Kind::Custom(m) => match m.exact_dist() {
                Some(r) => r?,
                None => return Ok(None),
            },
        };
        Ok(Some(d))
    }
}

/// Bit `i` of the result is the AND over block `i` (of `b` bits) of `idx xor u`.
fn and_blocks(idx: usize, n: usize, b: usize, u: u64) -> usize {
    let mask = (1usize << b) - 1;
    let mut uu = 0usize;
    for i in 0..n {
        uu |= (u as usize) << (i * b);
    }
    let x = idx ^ uu;
    (0..n).fold(0, |acc, i| acc | (((x >> (i * b)) & mask == mask) as usize) << i)
}

/// Distribution of `T and B` for independent `T`, `B`: superset sums
/// multiply under AND, so transform, multiply pointwise and invert.
fn and_dist(t: &OutputDist, b: &OutputDist) -> OutputDist {
    let n = t.n();
    let mut ft = t.probs().to_vec();
    let mut fb = b.probs().to_vec();
    superset_sums(&mut ft, n, 1.0);
    superset_sums(&mut fb, n, 1.0);
    let mut fz: Vec<f64> = ft.iter().zip(&fb).map(|(a, b)| a * b).collect();
    superset_sums(&mut fz, n, -1.0);
    fz.iter_mut().for_each(|v| *v = v.max(0.0));
    OutputDist::from_probs(n, 2, fz)
}

/// `sign = 1` gives `F(s) = sum_{u >= s} f(u)`; `sign = -1` inverts it.
fn superset_sums(f: &mut [f64], n: usize, sign: f64) {
    for i in 0..n {
        let bit = 1 << i;
        for s in 0..f.len() {
            if s & bit == 0 {
                f[s] += sign * f[s | bit];
            }
        }
    }
}

fn small_bias_f2_dist(n: usize, field: &Gf2m) -> OutputDist {
    let m = field.degree() as usize;
    let mut acc = F2SpanMixture::new(n);
    let w = 1.0 / field.size() as f64;
    let mut cols = vec![0u64; m];
    for x in 0..field.size() {
        cols.iter_mut().for_each(|c| *c = 0);
        let mut pw = 1u64;
        for i in 0..n {
            for (j, c) in cols.iter_mut().enumerate() {
                *c |= (pw >> j & 1) << i;
            }
            pw = field.mul(pw, x);
        }
        acc.add(&cols, w);
    }
    OutputDist::from_probs(n, 2, acc.finish())
}

fn small_bias_fp_dist(n: usize, field: &Gfpm) -> OutputDist {
    let (p, m) = (field.p(), field.degree());
    let size = outcome_count(n, p as u32).expect("checked by caller");
    let mut probs = vec![0.0; size];
    let w = 1.0 / field.size() as f64;
    for x in 0..field.size() {
        let xv = field.unpack(x);
        let mut cols = vec![vec![0u64; n]; m];
        let mut pw = field.unpack(1);
        for i in 0..n {
            for (j, c) in cols.iter_mut().enumerate() {
                c[i] = pw[j];
            }
            pw = field.mul_vec(&pw, &xv);
        }
        fp_add_span(&mut probs, &cols, p, w);
    }
    OutputDist::from_probs(n, p as u32, probs)
}

/// The hash output is linear in the coefficient bits: uniform on one span.
fn kwise_dist(n: usize, r: usize, k: usize, field: &Gf2m) -> Vec<f64> {
    let m = field.degree();
    let mut cols = Vec::with_capacity(k * m as usize);
    for t in 0..k {
        for u in 0..m {
            let mut coeffs = vec![0u64; k];
            coeffs[t] = 1 << u;
            let mut v = 0u64;
            for j in 0..n {
                let h = field.eval_poly(&coeffs, j as u64);
                v |= (h & ((1 << r) - 1)) << (j * r);
            }
            cols.push(v);
        }
    }
    let mut acc = F2SpanMixture::new(n * r);
    acc.add(&cols, 1.0);
    acc.finish()
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn check_eps(eps: f64) -> Result<(), RandError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(RandError::InvalidParameter(format!("bias {eps} must lie in (0, 1)")))
    }
}

/// The identity map on n fresh random bits.
pub fn uniform(n: usize) -> Sampler {
    Sampler::build(Kind::Uniform { n, q: 2 }, Guarantee::Uniform)
}

pub fn uniform_fp(n: usize, p: u32) -> Sampler {
    Sampler::build(Kind::Uniform { n, q: p }, Guarantee::Uniform)
}

pub fn constant(values: Vec<u8>, q: u32) -> Sampler {
    Sampler::build(Kind::Constant { values, q }, Guarantee::Constant)
}

pub fn zeros(n: usize) -> Sampler {
    constant(vec![0; n], 2)
}

pub fn ones(n: usize) -> Sampler {
    constant(vec![1; n], 2)
}

/// Powering construction: seed (x, y) in F_{2^m}^2, bit i = <x^i, y>, with
/// m = ceil(log2(n/eps)); bias at most (n-1)/2^m.
pub fn small_bias_f2(n: usize, eps: f64) -> Result<Sampler, RandError> {
    check_eps(eps)?;
    let m = ceil_log(2, n.max(1) as f64 / eps);
    let field = Gf2m::new(m).ok_or(RandError::UnsupportedField { p: 2, m: m as usize })?;
    Ok(Sampler::build(Kind::SmallBiasF2 { n, field }, Guarantee::Biased { eps }))
}

/// Powering over F_{p^m} with the coordinate inner product; every
/// nontrivial character has bias at most (n-1)/p^m.
pub fn small_bias_fp(n: usize, p: u64, eps: f64) -> Result<Sampler, RandError> {
    if !is_prime(p) {
        return Err(RandError::NotPrime(p));
    }
    check_eps(eps)?;
    if p == 2 {
        return small_bias_f2(n, eps);
    }
    let m = ceil_log(p, n.max(1) as f64 / eps) as usize;
    let field = Gfpm::new(p, m).ok_or(RandError::UnsupportedField { p, m })?;
    Ok(Sampler::build(Kind::SmallBiasFp { n, field }, Guarantee::Biased { eps }))
}

/// Error bound declared for a sum of d independent eps-biased copies
/// against degree-d polynomials: 16 eps^{1/2^{d-1}}, capped at 1.
pub fn viola_bound(d: usize, per_copy_eps: f64) -> f64 {
    (16.0 * per_copy_eps.powf(1.0 / (1u64 << (d - 1)) as f64)).min(1.0)
}

/// Coordinatewise sum over F_p of d independent small-bias copies.
pub fn viola_sum(n: usize, p: u64, d: usize, per_copy_eps: f64) -> Result<Sampler, RandError> {
    if d == 0 {
        return Err(RandError::InvalidParameter("degree must be at least 1".into()));
    }
    let copy = small_bias_fp(n, p, per_copy_eps)?;
    if d == 1 {
        return Ok(copy);
    }
    let g = Guarantee::DegreeFooling { d, eps: viola_bound(d, per_copy_eps) };
    Ok(Sampler::build(Kind::SumModP(vec![copy; d]), g))
}

/// y -> y^{p-1} coordinatewise: 0 stays 0, everything else becomes 1.
pub fn power_residue_bits(y: Sampler) -> Sampler {
    let p = y.q as f64;
    let one_prob = (p - 1.0) / p;
    let tol = match y.guarantee {
        Guarantee::Uniform => 0.0,
        Guarantee::Biased { eps } => eps * (p - 1.0) / p,
        Guarantee::DegreeFooling { eps, .. } => eps,
        _ => 1.0,
    };
    let g = if tol == 0.0 && y.q > 2 {
        Guarantee::Marginals { one_prob, tol: 0.0 }
    } else if y.q == 2 {
        y.guarantee.clone()
    } else {
        Guarantee::Marginals { one_prob, tol }
    };
    Sampler::build(Kind::PowerResidue(Box::new(y)), g)
}

/// Bit flip, for the convention where noise bits are 1 with probability 1/p.
pub fn complement(s: Sampler) -> Sampler {
    let g = match &s.guarantee {
        Guarantee::Marginals { one_prob, tol } => Guarantee::Marginals { one_prob: 1.0 - one_prob, tol: *tol },
        Guarantee::KWiseBiased { .. } | Guarantee::AlmostKWise { .. } => Guarantee::Unspecified,
        other => other.clone(),
    };
    Sampler::build(Kind::Complement(Box::new(s)), g)
}

fn hash_field(n: usize, r: usize) -> Result<Gf2m, RandError> {
    let m = (ceil_log(2, n.max(1) as f64) as usize).max(r).max(1);
    Gf2m::new(m as u32).ok_or(RandError::UnsupportedField { p: 2, m })
}

/// k-wise independent h: [n] -> {0,1}^r from a degree-(k-1) polynomial over
/// F_{2^m}, m = max(ceil(log2 n), r). Output is h(0), ..., h(n-1) concatenated.
pub fn kwise_hash(n: usize, r: usize, k: usize) -> Result<Sampler, RandError> {
    if k == 0 || r == 0 {
        return Err(RandError::InvalidParameter("k and r must be positive".into()));
    }
    let field = hash_field(n, r)?;
    Ok(Sampler::build(Kind::Kwise { n, r, k, field }, Guarantee::KWise { k, block: r }))
}

/// Exactly k-wise independent bits with Pr[1] = 2^-b: the AND of the b
/// bits of a k-wise independent hash value.
pub fn kwise_biased(n: usize, b: usize, k: usize) -> Result<Sampler, RandError> {
    if k == 0 || b == 0 {
        return Err(RandError::InvalidParameter("k and b must be positive".into()));
    }
    let field = hash_field(n, b)?;
    Ok(Sampler::build(Kind::KwiseBiased { n, b, k, field }, Guarantee::KWiseBiased { k, b: b as u32 }))
}

/// T_i = AND_b(D_i xor U_b) with D a (delta 2^-k)-biased sample on n*b bits.
pub fn almost_kwise_biased(n: usize, b: usize, k: usize, delta: f64) -> Result<Sampler, RandError> {
    if b == 0 || b > 32 {
        return Err(RandError::InvalidParameter("b must lie in 1..=32".into()));
    }
    check_eps(delta)?;
    let d = small_bias_f2(n * b, delta / (1u64 << k.min(60)) as f64)?;
    Ok(Sampler::build(Kind::AlmostKwiseBiased { n, b, d: Box::new(d) }, Guarantee::AlmostKWise { k, b: b as u32, delta }))
}

/// Coordinatewise XOR of independent samples, seeds concatenated.
pub fn xor_combine(parts: Vec<Sampler>) -> Result<Sampler, RandError> {
    let first = parts.first().ok_or(RandError::InvalidParameter("nothing to combine".into()))?;
    for s in &parts {
        if s.n != first.n {
            return Err(RandError::LengthMismatch { expected: first.n, got: s.n });
        }
        if s.q != 2 {
            return Err(RandError::AlphabetMismatch);
        }
    }
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().unwrap());
    }
    // biases multiply under XOR of independent samples
    let mut g = Guarantee::Constant;
    for s in &parts {
        g = match (&g, &s.guarantee) {
            (Guarantee::Uniform, _) | (_, Guarantee::Uniform) => Guarantee::Uniform,
            (Guarantee::Constant, other) | (other, Guarantee::Constant) => other.clone(),
            (Guarantee::Biased { eps: a }, Guarantee::Biased { eps: b }) => Guarantee::Biased { eps: a * b },
            _ => Guarantee::Unspecified,
        };
    }
    Ok(Sampler::build(Kind::Xor(parts), g))
}

/// D xor (T and base).
pub fn fk_layer(base: Sampler, d: Sampler, t: Sampler) -> Result<Sampler, RandError> {
    for s in [&d, &t] {
        if s.n != base.n {
            return Err(RandError::LengthMismatch { expected: base.n, got: s.n });
        }
    }
    if base.q != 2 || d.q != 2 || t.q != 2 {
        return Err(RandError::AlphabetMismatch);
    }
    Ok(Sampler::build(Kind::FkLayer { base: Box::new(base), d: Box::new(d), t: Box::new(t) }, Guarantee::Unspecified))
}

/// Output coordinate i is coordinate `perm[i]` of `inner`.
pub fn permuted(inner: Sampler, perm: Vec<usize>) -> Result<Sampler, RandError> {
    let mut seen = vec![false; inner.n];
    if perm.len() != inner.n || perm.iter().any(|&j| j >= inner.n || std::mem::replace(&mut seen[j], true)) {
        return Err(RandError::InvalidParameter("not a permutation of the output coordinates".into()));
    }
    let g = inner.guarantee.clone();
    Ok(Sampler::build(Kind::Permuted { inner: Box::new(inner), perm }, g))
}

pub fn custom(map: Arc<dyn SampleMap>, guarantee: Guarantee) -> Sampler {
    Sampler::build(Kind::Custom(map), guarantee)
}

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for Sampler {
    /// The compact spec string, parseable by `parse_sampler` except for custom leaves.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eps = match self.guarantee {
            Guarantee::Biased { eps } => eps,
            _ => f64::NAN,
        };
        match &self.kind {
            Kind::Uniform { n, q } if *q == 2 => write!(f, "uni(n={n})"),
            Kind::Uniform { n, q } => write!(f, "uni(n={n},p={q})"),
            Kind::Constant { values, q } => {
                if *q == 2 && values.iter().all(|&v| v == 0) {
                    write!(f, "zero(n={})", values.len())
                } else if *q == 2 && values.iter().all(|&v| v == 1) {
                    write!(f, "ones(n={})", values.len())
                } else {
                    let s: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                    write!(f, "const(q={q},v={})", s.join(":"))
                }
            }
            Kind::SmallBiasF2 { n, .. } => write!(f, "sb2(n={n},eps={})", fmt_f(eps)),
            Kind::SmallBiasFp { n, field } => write!(f, "sbp(n={n},p={},eps={})", field.p(), fmt_f(eps)),
            Kind::Kwise { n, r, k, .. } => write!(f, "kwise(n={n},r={r},k={k})"),
            Kind::KwiseBiased { n, b, k, .. } => write!(f, "kwb(n={n},b={b},k={k})"),
            Kind::AlmostKwiseBiased { n, b, .. } => match self.guarantee {
                Guarantee::AlmostKWise { k, delta, .. } => write!(f, "akw(n={n},b={b},k={k},delta={})", fmt_f(delta)),
                _ => write!(f, "akw(n={n},b={b})"),
            },
            Kind::Xor(cs) => write!(f, "xor({})", join(cs)),
            Kind::SumModP(cs) => match (&cs[0].kind, &cs[0].guarantee) {
                (Kind::SmallBiasFp { n, field }, Guarantee::Biased { eps }) if cs.iter().all(|c| c.to_string() == cs[0].to_string()) => {
                    write!(f, "viola(n={n},p={},d={},eps={})", field.p(), cs.len(), fmt_f(*eps))
                }
                _ => write!(f, "sum({})", join(cs)),
            },
            Kind::PowerResidue(c) => write!(f, "pr({c})"),
            Kind::Complement(c) => write!(f, "not({c})"),
            Kind::FkLayer { base, d, t } => write!(f, "fk({base},{d},{t})"),
            Kind::Permuted { inner, perm } => {
                let s: Vec<String> = perm.iter().map(|v| v.to_string()).collect();
                write!(f, "perm({inner},{})", s.join(":"))
            }
            Kind::Custom(m) => write!(f, "custom:{}", m.describe()),
        }
    }
}

fn join(cs: &[Sampler]) -> String {
    cs.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Coordinatewise sum over F_p of independent samples, seeds concatenated.
pub fn sum_mod_p(parts: Vec<Sampler>) -> Result<Sampler, RandError> {
    let first = parts.first().ok_or(RandError::InvalidParameter("nothing to combine".into()))?;
    for s in &parts {
        if s.n != first.n {
            return Err(RandError::LengthMismatch { expected: first.n, got: s.n });
        }
        if s.q != first.q {
            return Err(RandError::AlphabetMismatch);
        }
    }
    if parts.len() == 1 {
        return Ok(parts.into_iter().next().unwrap());
    }
    Ok(Sampler::build(Kind::SumModP(parts), Guarantee::Unspecified))
}
