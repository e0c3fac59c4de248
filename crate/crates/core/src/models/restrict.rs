//! The restriction `x -> f(D xor (T and x))`.

use serde::Serialize;

use super::{Block, BlockProduct, ModelError, Part, SpillPart};

/// Fixed values `d` and the free mask `t` (1 = free).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Restriction {
    pub d: Vec<u8>,
    pub t: Vec<u8>,
}

impl Restriction {
    pub fn new(d: Vec<u8>, t: Vec<u8>) -> Result<Self, ModelError> {
        if d.len() != t.len() {
            return Err(ModelError::LengthMismatch { expected: d.len(), got: t.len() });
        }
        Ok(Restriction { d, t })
    }

    /// The input `D xor (T and x)`.
    pub fn apply(&self, x: &[u8]) -> Vec<u8> {
        self.d.iter().zip(&self.t).zip(x).map(|((&d, &t), &x)| d ^ (t & x)).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RestrictionStats {
    /// Non-constant blocks with exactly one free coordinate.
    pub j1: usize,
    /// Non-constant blocks with two or more free coordinates.
    pub j_multi: usize,
    /// Free coordinates of those multi-free blocks.
    pub q: Vec<usize>,
    /// Free coordinates of the original spill.
    pub spill_free: usize,
    /// Blocks whose restricted function is constant.
    pub constant: usize,
    /// Blocks with identity base element; they never contribute.
    pub dead: usize,
    /// Spill coordinates of the restricted product.
    pub new_spill: usize,
    /// Widest block of the restricted product.
    pub new_width: usize,
}

/// Partial evaluation of a table on `indices`: the result is indexed by the free coordinates, in order.
fn partial<T: Copy>(indices: &[usize], table: &[T], r: &Restriction) -> (Vec<usize>, Vec<T>) {
    let free: Vec<usize> = (0..indices.len()).filter(|&j| r.t[indices[j]] == 1).collect();
    let base = indices.iter().enumerate().fold(0usize, |acc, (j, &i)| acc | (r.d[i] as usize & 1) << j);
    let out = (0..1usize << free.len())
        .map(|y| {
            let flip = free.iter().enumerate().fold(0usize, |acc, (k, &j)| acc | (y >> k & 1) << j);
            table[base ^ flip]
        })
        .collect();
    (free.iter().map(|&j| indices[j]).collect(), out)
}

/// Restricts every factor. Constant blocks become width-0 blocks; blocks
/// with several free coordinates are moved into the spill at their own
/// position unless `keep_multi` is set.
pub fn restrict(f: &BlockProduct, r: &Restriction, keep_multi: bool) -> Result<(BlockProduct, RestrictionStats), ModelError> {
    if r.d.len() != f.n() {
        return Err(ModelError::LengthMismatch { expected: f.n(), got: r.d.len() });
    }
    let e = f.group().identity();
    let mut stats = RestrictionStats::default();
    let mut blocks = Vec::new();
    let mut spill = Vec::new();
    // walk the factors in evaluation order so merged blocks and old spill
    // parts keep their relative order
    for part in f.parts() {
        match part {
            Part::Spill(s) => {
                stats.spill_free += s.indices.iter().filter(|&&i| r.t[i] == 1).count();
                let (idx, values) = partial(&s.indices, &s.values, r);
                let (indices, values) = if values.iter().all(|&v| v == values[0]) { (vec![], vec![values[0]]) } else { (idx, values) };
                spill.push(SpillPart { position: blocks.len(), indices, values });
            }
            Part::Block(b) => {
                let (idx, table) = partial(&b.indices, &b.truth_table, r);
                let constant = table.iter().all(|&v| v == table[0]);
                let nb = if constant {
                    Block { indices: vec![], truth_table: vec![table[0]], base: b.base }
                } else {
                    Block { indices: idx, truth_table: table, base: b.base }
                };
                if b.base == e {
                    stats.dead += 1;
                } else if constant {
                    stats.constant += 1;
                } else if nb.indices.len() == 1 {
                    stats.j1 += 1;
                } else {
                    stats.j_multi += 1;
                    stats.q.extend(&nb.indices);
                    if !keep_multi {
                        let values = nb.truth_table.iter().map(|&v| if v == 1 { nb.base } else { e }).collect();
                        spill.push(SpillPart { position: blocks.len(), indices: nb.indices, values });
                        continue;
                    }
                }
                blocks.push(nb);
            }
        }
    }
    let out = BlockProduct::new(f.group().clone(), f.n(), blocks, spill)?;
    stats.new_spill = out.spill_size();
    stats.new_width = out.width();
    Ok((out, stats))
}
