//! Commutative groups: a product of one-bit blocks and a few spill
//! coordinates, seen through a character, is a function of one integer
//! linear form `F(x)`. Fooling such linear forms fools the product.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::PrgError;
use crate::group::{Elem, FiniteGroup};
use crate::models::{exact_output_distribution, BlockProduct, InputDist};
use crate::randomness::{kwise_hash, uniform, zeros, OutputDist, Sampler};
use crate::rep::{irrep_catalog, Irrep};

/// Exponents `a(g)` with `chi(g) = exp(2 pi i a(g) / m)`, `m = |G|`.
pub fn character_exponents(g: &FiniteGroup, chi: &Irrep) -> Result<Vec<usize>, PrgError> {
    if chi.dim != 1 {
        return Err(PrgError::Precondition(format!("character of dimension {} is not one-dimensional", chi.dim)));
    }
    let m = g.order();
    Ok(g
        .elements()
        .map(|e| {
            let z = chi.character(e);
            let a = (z.arg() * m as f64 / (2.0 * PI)).round() as i64;
            a.rem_euclid(m as i64) as usize
        })
        .collect())
}

/// `F(x) = c + sum_i w_i x_i` with nonnegative weights, and the map from
/// `F(x)` back to the character exponent of the product.
///
/// Block coordinates carry weights below `m` and sum to less than
/// `2^shift`; spill coordinate `j` carries `2^{shift + j}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearForm {
    pub modulus: usize,
    pub weights: Vec<u64>,
    /// Exponent contributed by constant and negated blocks.
    pub constant: usize,
    pub shift: u32,
    pub spill_coords: Vec<usize>,
    /// Character exponent of the spill, indexed by the spill bits.
    spill_exponents: Vec<usize>,
    /// `m l + 2^shift 2^q`, the stated bound on `sum |w_i|`.
    pub weight_bound: u64,
}

impl LinearForm {
    pub fn weight_sum(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn eval(&self, x: &[u8]) -> u64 {
        self.weights.iter().zip(x).filter(|(_, &b)| b & 1 == 1).map(|(w, _)| w).sum()
    }

    pub fn eval_index(&self, idx: u64) -> u64 {
        self.weights.iter().enumerate().filter(|(i, _)| idx >> i & 1 == 1).map(|(_, w)| w).sum()
    }

    /// The character exponent of the product at any `x` with `F(x) = value`.
    pub fn decode(&self, value: u64) -> usize {
        let low = value & ((1u64 << self.shift) - 1);
        let high = (value >> self.shift) as usize;
        let spill = self.spill_exponents.get(high).copied().unwrap_or(0);
        ((low % self.modulus as u64) as usize + self.constant + spill) % self.modulus
    }
}

/// The linear form of `f` under the character with exponents `exps`.
pub fn linear_form_reduction(f: &BlockProduct, exps: &[usize]) -> Result<LinearForm, PrgError> {
    let g = f.group();
    if !g.is_commutative() {
        return Err(PrgError::NotCommutative(g.name().to_string()));
    }
    let m = g.order();
    if exps.len() != m {
        return Err(PrgError::LengthMismatch { expected: m, got: exps.len() });
    }
    let ell = f.len();
    let shift = ((m * ell.max(1)) as f64).log2().ceil() as u32;
    let q = f.spill_size();
    if shift as usize + q > 62 {
        return Err(PrgError::Precondition(format!("linear form with {q} spill bits does not fit 64 bits")));
    }
    let mut weights = vec![0u64; f.n()];
    let mut constant = 0usize;
    for b in f.blocks() {
        let a = exps[b.base];
        match (b.width(), b.truth_table.as_slice()) {
            (_, t) if t.iter().all(|&v| v == 0) => {}
            (_, t) if t.iter().all(|&v| v == 1) => constant += a,
            (1, [0, 1]) => weights[b.indices[0]] = a as u64,
            (1, [1, 0]) => {
                constant += a;
                weights[b.indices[0]] = ((m - a) % m) as u64;
            }
            _ => return Err(PrgError::Precondition(format!("block of width {} is not a one-bit block", b.width()))),
        }
    }
    let spill_coords: Vec<usize> = f.spill().iter().flat_map(|s| s.indices.iter().copied()).collect();
    for (j, &i) in spill_coords.iter().enumerate() {
        weights[i] = 1u64 << (shift as usize + j);
    }
    let spill_exponents = (0..1usize << q)
        .map(|r| {
            let mut x = vec![0u8; f.n()];
            for (j, &i) in spill_coords.iter().enumerate() {
                x[i] = (r >> j & 1) as u8;
            }
            f.spill().iter().map(|s| exps[s.value(&x)]).sum::<usize>() % m
        })
        .collect();
    Ok(LinearForm {
        modulus: m,
        weights,
        constant: constant % m,
        shift,
        spill_coords,
        spill_exponents,
        weight_bound: (m * ell) as u64 + (1u64 << (shift as usize + q)),
    })
}

/// A generator for integer linear forms: for weights with `sum |w_i| <= W`
/// it should make `F` `O(sqrt W) eps`-close to its uniform-input law.
pub trait LinearFormFooler {
    fn name(&self) -> String;
    fn sampler(&self, n: usize) -> Result<Sampler, PrgError>;
}

/// k-wise independent bits.
#[derive(Clone, Copy, Debug)]
pub struct KWiseBackend(pub usize);

/// Positive control: truly uniform bits.
#[derive(Clone, Copy, Debug)]
pub struct UniformBackend;

/// Negative control: the all-zeros string.
#[derive(Clone, Copy, Debug)]
pub struct ConstantBackend;

impl LinearFormFooler for KWiseBackend {
    fn name(&self) -> String {
        format!("kwise({})", self.0)
    }

    fn sampler(&self, n: usize) -> Result<Sampler, PrgError> {
        Ok(kwise_hash(n, 1, self.0.clamp(1, n.max(1)))?)
    }
}

impl LinearFormFooler for UniformBackend {
    fn name(&self) -> String {
        "uniform".into()
    }

    fn sampler(&self, n: usize) -> Result<Sampler, PrgError> {
        Ok(uniform(n))
    }
}

impl LinearFormFooler for ConstantBackend {
    fn name(&self) -> String {
        "constant".into()
    }

    fn sampler(&self, n: usize) -> Result<Sampler, PrgError> {
        Ok(zeros(n))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterError {
    /// Index of the character among the group's one-dimensional irreps.
    pub index: usize,
    /// TV distance between the laws of `F` under the backend and under uniform input.
    pub form_tv: f64,
    /// `|E chi(f(P)) - E chi(f(U))|`.
    pub bias_gap: f64,
    pub weight_sum: u64,
    pub weight_bound: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CommutativeReport {
    pub backend: String,
    pub seed_len: u32,
    pub characters: Vec<CharacterError>,
    /// `sqrt(m)` times the largest bias gap: a bound on `delta`.
    pub aggregate_bound: f64,
    /// Exact TV distance between `f(P)` and `f(U)`.
    pub delta: f64,
    pub eps: f64,
    pub pass: bool,
}

/// Exact comparison of the backend against uniform input on `f`, per
/// character and in total.
pub fn fool_commutative_spill(f: &BlockProduct, backend: &dyn LinearFormFooler, eps: f64) -> Result<CommutativeReport, PrgError> {
    let g = f.group();
    if !g.is_commutative() {
        return Err(PrgError::NotCommutative(g.name().to_string()));
    }
    let n = f.n();
    if n > 24 {
        return Err(PrgError::Precondition(format!("exact comparison needs n <= 24, got {n}")));
    }
    let sampler = backend.sampler(n)?;
    let dist = sampler.exact_dist()?;
    let m = g.order();
    let values: Vec<Elem> = (0..1u64 << n).map(|idx| f.eval_index(idx)).collect();
    let uniform_mass = 1.0 / (1u64 << n) as f64;
    let mut characters = Vec::new();
    for (index, chi) in irrep_catalog(g)?.irreps.iter().enumerate() {
        let exps = character_exponents(g, chi)?;
        let form = linear_form_reduction(f, &exps)?;
        characters.push(character_error(index, &form, &exps, &values, &dist, uniform_mass));
    }
    let max_gap = characters.iter().map(|c| c.bias_gap).fold(0.0, f64::max);
    let delta = exact_output_distribution(f, InputDist::Exact(&dist))?.tv(&exact_output_distribution(f, InputDist::Uniform)?);
    Ok(CommutativeReport {
        backend: backend.name(),
        seed_len: sampler.seed_len(),
        characters,
        aggregate_bound: (m as f64).sqrt() * max_gap,
        delta,
        eps,
        pass: delta <= eps,
    })
}

fn character_error(index: usize, form: &LinearForm, exps: &[usize], values: &[Elem], dist: &OutputDist, uniform_mass: f64) -> CharacterError {
    let m = form.modulus as f64;
    let root = |a: usize| Complex64::from_polar(1.0, 2.0 * PI * a as f64 / m);
    let mut laws: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    let mut gap = Complex64::new(0.0, 0.0);
    for (idx, (&p, &v)) in dist.probs().iter().zip(values).enumerate() {
        let e = laws.entry(form.eval_index(idx as u64)).or_default();
        e.0 += p;
        e.1 += uniform_mass;
        gap += root(exps[v]) * (p - uniform_mass);
    }
    CharacterError {
        index,
        form_tv: 0.5 * laws.values().map(|(p, u)| (p - u).abs()).sum::<f64>(),
        bias_gap: gap.norm(),
        weight_sum: form.weight_sum(),
        weight_bound: form.weight_bound,
    }
}
