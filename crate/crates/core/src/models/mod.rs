//! Group programs and block products with a spill.
//!
//! A product is a sequence of parts multiplied left to right. Boolean blocks
//! contribute `g^{f(x_I)}`; spill parts contribute a group element looked up
//! from their own table. Spill parts carry a position: they are multiplied
//! immediately before the block with that index (the length of `blocks` means
//! "at the end"). Every part reads a disjoint set of input coordinates.

mod build;
mod exact;
pub mod io;
mod restrict;

use thiserror::Error;

use crate::group::{Elem, FiniteGroup};

pub use build::{from_read_once_polynomial, random_instance, InstanceKind, InstanceOptions, Monomial, ReadOnceTranslation};
pub use exact::{exact_bias, exact_output_distribution, InputDist, MAX_SEED_ENUMERATION};
pub use restrict::{restrict, Restriction, RestrictionStats};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("variable {var} appears in more than one monomial")]
    NotReadOnce { var: usize },
    #[error("cannot fit {blocks} blocks of width {width} and a spill of {spill} into {n} inputs")]
    InfeasiblePartition { blocks: usize, width: usize, spill: usize, n: usize },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("invalid product: {0}")]
    Invalid(String),
    #[error("unknown group or element: {0}")]
    Unknown(String),
}

/// `g^{f(x_indices)}` with `f` given by its truth table; entry `v` of the
/// table is `f` at the assignment whose bit `j` is `x_{indices[j]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub indices: Vec<usize>,
    pub truth_table: Vec<u8>,
    pub base: Elem,
}

impl Block {
    pub fn width(&self) -> usize {
        self.indices.len()
    }

    /// The bit selected by `x`.
    pub fn bit(&self, x: &[u8]) -> u8 {
        self.truth_table[local_index(&self.indices, x)]
    }

    pub fn is_constant(&self) -> bool {
        self.truth_table.iter().all(|&b| b == self.truth_table[0])
    }

    /// `Pr[f = 1]` under uniform input.
    pub fn one_prob(&self) -> f64 {
        self.truth_table.iter().filter(|&&b| b == 1).count() as f64 / self.truth_table.len() as f64
    }
}

/// A group-valued function of a few coordinates, placed before block `position`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpillPart {
    pub position: usize,
    pub indices: Vec<usize>,
    pub values: Vec<Elem>,
}

impl SpillPart {
    pub fn value(&self, x: &[u8]) -> Elem {
        self.values[local_index(&self.indices, x)]
    }
}

fn local_index(indices: &[usize], x: &[u8]) -> usize {
    indices.iter().enumerate().fold(0, |acc, (j, &i)| acc | ((x[i] & 1) as usize) << j)
}

/// One factor of the product, in evaluation order.
#[derive(Clone, Copy, Debug)]
pub enum Part<'a> {
    Block(&'a Block),
    Spill(&'a SpillPart),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockProduct {
    group: FiniteGroup,
    n: usize,
    blocks: Vec<Block>,
    spill: Vec<SpillPart>,
}

impl BlockProduct {
    /// Checks disjointness, index ranges, table sizes and element ranges.
    pub fn new(group: FiniteGroup, n: usize, blocks: Vec<Block>, mut spill: Vec<SpillPart>) -> Result<Self, ModelError> {
        let mut used = vec![false; n];
        let mut claim = |idx: &[usize]| -> Result<(), ModelError> {
            for &i in idx {
                if i >= n {
                    return Err(ModelError::Invalid(format!("index {i} out of range for n = {n}")));
                }
                if std::mem::replace(&mut used[i], true) {
                    return Err(ModelError::Invalid(format!("index {i} used twice")));
                }
            }
            Ok(())
        };
        for b in &blocks {
            claim(&b.indices)?;
            if b.indices.len() > 24 || b.truth_table.len() != 1 << b.indices.len() {
                return Err(ModelError::Invalid("truth table length must be 2^width".into()));
            }
            if b.truth_table.iter().any(|&v| v > 1) || b.base >= group.order() {
                return Err(ModelError::Invalid("truth table entries must be bits and bases group elements".into()));
            }
        }
        for s in &spill {
            claim(&s.indices)?;
            if s.indices.len() > 24 || s.values.len() != 1 << s.indices.len() {
                return Err(ModelError::Invalid("spill table length must be 2^width".into()));
            }
            if s.values.iter().any(|&v| v >= group.order()) || s.position > blocks.len() {
                return Err(ModelError::Invalid("spill values must be group elements, positions at most the block count".into()));
            }
        }
        spill.sort_by_key(|s| s.position);
        Ok(BlockProduct { group, n, blocks, spill })
    }

    /// The program `prod_i g_i^{x_i}`.
    pub fn program(group: FiniteGroup, elems: &[Elem]) -> Result<Self, ModelError> {
        let blocks = elems.iter().enumerate().map(|(i, &g)| Block { indices: vec![i], truth_table: vec![0, 1], base: g }).collect();
        BlockProduct::new(group, elems.len(), blocks, vec![])
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn spill(&self) -> &[SpillPart] {
        &self.spill
    }

    /// Number of blocks.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty() && self.spill.is_empty()
    }

    /// Largest block width present.
    pub fn width(&self) -> usize {
        self.blocks.iter().map(Block::width).max().unwrap_or(0)
    }

    /// Total number of spill coordinates.
    pub fn spill_size(&self) -> usize {
        self.spill.iter().map(|s| s.indices.len()).sum()
    }

    /// True for a group program: every block reads one bit as the identity, no spill.
    pub fn is_program(&self) -> bool {
        self.spill.is_empty() && self.blocks.iter().all(|b| b.indices.len() == 1 && b.truth_table == [0, 1])
    }

    /// The program's elements, when `is_program`.
    pub fn program_elements(&self) -> Option<Vec<Elem>> {
        self.is_program().then(|| self.blocks.iter().map(|b| b.base).collect())
    }

    /// Factors in evaluation order.
    pub fn parts(&self) -> Vec<Part<'_>> {
        let mut out = Vec::with_capacity(self.blocks.len() + self.spill.len());
        let mut s = self.spill.iter().peekable();
        for (i, b) in self.blocks.iter().enumerate() {
            while let Some(sp) = s.next_if(|sp| sp.position <= i) {
                out.push(Part::Spill(sp));
            }
            out.push(Part::Block(b));
        }
        out.extend(s.map(Part::Spill));
        out
    }

    pub fn eval(&self, x: &[u8]) -> Result<Elem, ModelError> {
        if x.len() != self.n {
            return Err(ModelError::LengthMismatch { expected: self.n, got: x.len() });
        }
        Ok(self.eval_unchecked(x))
    }

    /// `eval` without the length check; panics on short input.
    pub fn eval_unchecked(&self, x: &[u8]) -> Elem {
        let g = &self.group;
        self.parts().iter().fold(g.identity(), |acc, part| match part {
            Part::Block(b) => {
                if b.bit(x) == 1 {
                    g.mul(acc, b.base)
                } else {
                    acc
                }
            }
            Part::Spill(s) => g.mul(acc, s.value(x)),
        })
    }

    /// Evaluation at the input whose bit `i` is bit `i` of `idx` (n <= 64).
    pub fn eval_index(&self, idx: u64) -> Elem {
        let g = &self.group;
        let local = |indices: &[usize]| indices.iter().enumerate().fold(0, |acc, (j, &i)| acc | ((idx >> i & 1) as usize) << j);
        self.parts().iter().fold(g.identity(), |acc, part| match part {
            Part::Block(b) => {
                if b.truth_table[local(&b.indices)] == 1 {
                    g.mul(acc, b.base)
                } else {
                    acc
                }
            }
            Part::Spill(s) => g.mul(acc, s.values[local(&s.indices)]),
        })
    }

    /// `x -> f(x_{perm[0]}, ..., x_{perm[n-1]})`: coordinate `i` of the
    /// original reads input `perm[i]`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Result<BlockProduct, ModelError> {
        if perm.len() != self.n {
            return Err(ModelError::LengthMismatch { expected: self.n, got: perm.len() });
        }
        let map = |idx: &[usize]| idx.iter().map(|&i| perm[i]).collect::<Vec<_>>();
        let blocks = self.blocks.iter().map(|b| Block { indices: map(&b.indices), ..b.clone() }).collect();
        let spill = self.spill.iter().map(|s| SpillPart { indices: map(&s.indices), ..s.clone() }).collect();
        BlockProduct::new(self.group.clone(), self.n, blocks, spill)
    }

    /// Same product with the blocks in a different order (spill parts keep their positions).
    pub fn reorder_blocks(&self, order: &[usize]) -> Result<BlockProduct, ModelError> {
        let mut seen = vec![false; self.blocks.len()];
        if order.len() != self.blocks.len() || order.iter().any(|&i| i >= seen.len() || std::mem::replace(&mut seen[i], true)) {
            return Err(ModelError::Invalid("not a permutation of the blocks".into()));
        }
        let blocks = order.iter().map(|&i| self.blocks[i].clone()).collect();
        BlockProduct::new(self.group.clone(), self.n, blocks, self.spill.clone())
    }
}
