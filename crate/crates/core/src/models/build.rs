//! Instance constructors: read-once polynomials and random corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Block, BlockProduct, ModelError, SpillPart};
use crate::group::{catalog_group, FiniteGroup};

/// `coeff * prod_{v in vars} x_v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: u64,
    pub vars: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ReadOnceTranslation {
    pub product: BlockProduct,
    /// Monomials of degree above the threshold, left out of the product.
    pub dropped: Vec<Monomial>,
}

/// A read-once polynomial over Z_m as a block product over Z_m: each kept
/// monomial becomes an AND block with base `coeff mod m`.
pub fn from_read_once_polynomial(n: usize, monomials: &[Monomial], m: usize, tau: usize) -> Result<ReadOnceTranslation, ModelError> {
    let group = catalog_group(&format!("Z{m}")).map_err(|e| ModelError::Unknown(e.to_string()))?;
    let mut seen = vec![false; n];
    for mono in monomials {
        for &v in &mono.vars {
            if v >= n {
                return Err(ModelError::Invalid(format!("variable {v} out of range for n = {n}")));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(ModelError::NotReadOnce { var: v });
            }
        }
    }
    let mut blocks = Vec::new();
    let mut dropped = Vec::new();
    for mono in monomials {
        let c = (mono.coeff % m as u64) as usize;
        if c == 0 {
            continue;
        }
        if mono.vars.len() > tau {
            dropped.push(mono.clone());
            continue;
        }
        let w = mono.vars.len();
        let mut truth_table = vec![0u8; 1 << w];
        truth_table[(1 << w) - 1] = 1;
        blocks.push(Block { indices: mono.vars.clone(), truth_table, base: c });
    }
    Ok(ReadOnceTranslation { product: BlockProduct::new(group, n, blocks, vec![])?, dropped })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// `prod_i g_i^{x_i}` over all n inputs in order.
    Program,
    /// Blocks of exactly `w` random coordinates and a spill of `q`.
    Block,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InstanceOptions {
    pub include_identity: bool,
    pub include_constant: bool,
}

/// Random instance, deterministic in `seed`.
#[allow(clippy::too_many_arguments)]
pub fn random_instance(
    kind: InstanceKind,
    group: &FiniteGroup,
    n: usize,
    blocks: usize,
    w: usize,
    q: usize,
    seed: u64,
    opts: InstanceOptions,
) -> Result<BlockProduct, ModelError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let order = group.order();
    let e = group.identity();
    if !opts.include_identity && order == 1 {
        return Err(ModelError::Invalid("the trivial group has no non-identity element".into()));
    }
    let element = |rng: &mut ChaCha8Rng| loop {
        let g = rng.gen_range(0..order);
        if opts.include_identity || g != e {
            return g;
        }
    };
    match kind {
        InstanceKind::Program => {
            let elems: Vec<usize> = (0..n).map(|_| element(&mut rng)).collect();
            BlockProduct::program(group.clone(), &elems)
        }
        InstanceKind::Block => {
            if blocks * w + q > n {
                return Err(ModelError::InfeasiblePartition { blocks, width: w, spill: q, n });
            }
            if w == 0 && !opts.include_constant && blocks > 0 {
                return Err(ModelError::Invalid("width-0 blocks are constant".into()));
            }
            let mut coords: Vec<usize> = (0..n).collect();
            coords.shuffle(&mut rng);
            let mut it = coords.into_iter();
            let mut out = Vec::with_capacity(blocks);
            for _ in 0..blocks {
                let indices: Vec<usize> = it.by_ref().take(w).collect();
                let truth_table = loop {
                    let t: Vec<u8> = (0..1usize << w).map(|_| rng.gen_range(0..2)).collect();
                    if opts.include_constant || t.iter().any(|&b| b != t[0]) {
                        break t;
                    }
                };
                out.push(Block { indices, truth_table, base: element(&mut rng) });
            }
            let mut spill = Vec::new();
            if q > 0 {
                let indices: Vec<usize> = it.take(q).collect();
                let values = (0..1usize << q).map(|_| rng.gen_range(0..order)).collect();
                spill.push(SpillPart { position: rng.gen_range(0..=blocks), indices, values });
            }
            BlockProduct::new(group.clone(), n, out, spill)
        }
    }
}
