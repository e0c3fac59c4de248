//! Finite groups given by explicit multiplication tables.

mod catalog;
pub mod io;
mod subgroups;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use catalog::{catalog_group, direct_product, parse_catalog_name, CatalogSpec};
pub use subgroups::{
    all_subgroups, classify_p_group, index_p_normal_subgroup, is_dedekind_literal_form,
    is_dedekind_structural, is_normal, is_subgroup, SUBGROUP_ORDER_LIMIT,
};

/// Index of an element, meaningful only relative to its group.
pub type Elem = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("empty table")]
    Empty,
    #[error("row {row} has length {len}, expected a square table")]
    NotSquare { row: usize, len: usize },
    #[error("cell ({row}, {col}) holds {value}, outside the element range")]
    NotClosed { row: usize, col: usize, value: usize },
    #[error("({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("no two-sided identity")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("unknown group name {0:?}")]
    UnknownName(String),
    #[error("order {order} exceeds the limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },
    #[error("the given set is not a subgroup")]
    NotASubgroup,
    #[error("group of order {order} is not a nontrivial p-group")]
    NotAPGroup { order: usize },
    #[error("expected {expected} element names, got {got}")]
    NameCount { expected: usize, got: usize },
}

/// A finite group stored as its Cayley table. Row `g`, column `h` holds `g*h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    name: String,
    order: usize,
    table: Vec<Elem>,
    identity: Elem,
    inverses: Vec<Elem>,
    names: Vec<String>,
}

/// Associativity is checked exhaustively up to this order and sampled above.
const EXHAUSTIVE_ASSOC_LIMIT: usize = 64;
const SAMPLED_ASSOC_TRIPLES: usize = 200_000;

/// Validate a square table and build the group.
pub fn build_group(rows: &[Vec<usize>]) -> Result<FiniteGroup, GroupError> {
    let order = rows.len();
    if order == 0 {
        return Err(GroupError::Empty);
    }
    let mut table = Vec::with_capacity(order * order);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != order {
            return Err(GroupError::NotSquare { row: r, len: row.len() });
        }
        for (c, &v) in row.iter().enumerate() {
            if v >= order {
                return Err(GroupError::NotClosed { row: r, col: c, value: v });
            }
            table.push(v);
        }
    }
    from_flat_table(String::new(), order, table, None)
}

pub(crate) fn from_flat_table(
    name: String,
    order: usize,
    table: Vec<Elem>,
    names: Option<Vec<String>>,
) -> Result<FiniteGroup, GroupError> {
    let mul = |a: usize, b: usize| table[a * order + b];
    let identity = (0..order)
        .find(|&e| (0..order).all(|g| mul(e, g) == g && mul(g, e) == g))
        .ok_or(GroupError::NoIdentity)?;
    let mut inverses = vec![0; order];
    for (g, inv) in inverses.iter_mut().enumerate() {
        *inv = (0..order)
            .find(|&h| mul(g, h) == identity && mul(h, g) == identity)
            .ok_or(GroupError::NoInverse { element: g })?;
    }
    let assoc = |a: usize, b: usize, c: usize| mul(mul(a, b), c) == mul(a, mul(b, c));
    if order <= EXHAUSTIVE_ASSOC_LIMIT {
        for a in 0..order {
            for b in 0..order {
                for c in 0..order {
                    if !assoc(a, b, c) {
                        return Err(GroupError::NotAssociative { a, b, c });
                    }
                }
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x6a09e667);
        for _ in 0..SAMPLED_ASSOC_TRIPLES {
            let (a, b, c) = (rng.gen_range(0..order), rng.gen_range(0..order), rng.gen_range(0..order));
            if !assoc(a, b, c) {
                return Err(GroupError::NotAssociative { a, b, c });
            }
        }
    }
    let names = match names {
        Some(n) if n.len() != order => {
            return Err(GroupError::NameCount { expected: order, got: n.len() })
        }
        Some(n) => n,
        None => (0..order).map(|g| g.to_string()).collect(),
    };
    Ok(FiniteGroup { name, order, table, identity, inverses, names })
}

impl FiniteGroup {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inverses[a]
    }

    pub fn pow(&self, g: Elem, e: usize) -> Elem {
        let mut acc = self.identity;
        for _ in 0..e {
            acc = self.mul(acc, g);
        }
        acc
    }

    pub fn element_order(&self, g: Elem) -> usize {
        let mut k = 1;
        let mut x = g;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn conjugate(&self, by: Elem, h: Elem) -> Elem {
        self.mul(self.mul(by, h), self.inverses[by])
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn element_name(&self, g: Elem) -> &str {
        &self.names[g]
    }

    /// Look an element up by display name.
    pub fn find(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name)
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    /// Rows of the Cayley table.
    pub fn table_rows(&self) -> Vec<Vec<Elem>> {
        self.table.chunks(self.order).map(|r| r.to_vec()).collect()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, GroupError> {
        if names.len() != self.order {
            return Err(GroupError::NameCount { expected: self.order, got: names.len() });
        }
        self.names = names;
        Ok(self)
    }

    /// Product of a word, left to right.
    pub fn product(&self, word: &[Elem]) -> Elem {
        word.iter().fold(self.identity, |acc, &g| self.mul(acc, g))
    }

    /// The subgroup on `elems` as a group in its own right, relabelled by
    /// sorted position. Returns the group and the map new index -> old index.
    pub fn subgroup_as_group(&self, elems: &[Elem]) -> Result<(FiniteGroup, Vec<Elem>), GroupError> {
        let mut sorted = elems.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if !is_subgroup(self, &sorted) {
            return Err(GroupError::NotASubgroup);
        }
        let k = sorted.len();
        let mut pos = vec![usize::MAX; self.order];
        for (i, &g) in sorted.iter().enumerate() {
            pos[g] = i;
        }
        let mut table = Vec::with_capacity(k * k);
        for &a in &sorted {
            for &b in &sorted {
                table.push(pos[self.mul(a, b)]);
            }
        }
        let names = sorted.iter().map(|&g| self.names[g].clone()).collect();
        let sub = from_flat_table(format!("subgroup of {}", self.name), k, table, Some(names))?;
        Ok((sub, sorted))
    }
}
