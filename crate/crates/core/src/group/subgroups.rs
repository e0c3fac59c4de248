//! Subgroup enumeration by closure, normality, p-group structure.

use std::collections::{HashSet, VecDeque};

use super::{Elem, FiniteGroup, GroupError};

/// Exhaustive subgroup enumeration is supported up to this order.
pub const SUBGROUP_ORDER_LIMIT: usize = 256;

/// Bitset over at most 256 elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct ElemSet([u64; 4]);

impl ElemSet {
    fn empty() -> Self {
        ElemSet([0; 4])
    }
    fn contains(&self, g: Elem) -> bool {
        self.0[g / 64] >> (g % 64) & 1 == 1
    }
    fn insert(&mut self, g: Elem) -> bool {
        let fresh = !self.contains(g);
        self.0[g / 64] |= 1 << (g % 64);
        fresh
    }
    fn to_vec(self, order: usize) -> Vec<Elem> {
        (0..order).filter(|&g| self.contains(g)).collect()
    }
}

/// Subgroup generated by `gens`.
fn closure(g: &FiniteGroup, gens: &[Elem]) -> ElemSet {
    let mut set = ElemSet::empty();
    let mut list = vec![g.identity()];
    set.insert(g.identity());
    let mut i = 0;
    while i < list.len() {
        let a = list[i];
        for &s in gens {
            let b = g.mul(a, s);
            if set.insert(b) {
                list.push(b);
            }
        }
        i += 1;
    }
    set
}

fn check_order(g: &FiniteGroup) -> Result<(), GroupError> {
    if g.order() > SUBGROUP_ORDER_LIMIT {
        Err(GroupError::OrderTooLarge { order: g.order(), limit: SUBGROUP_ORDER_LIMIT })
    } else {
        Ok(())
    }
}

/// Every subgroup, as sorted element lists, ordered by size then
/// lexicographically.
pub fn all_subgroups(g: &FiniteGroup) -> Result<Vec<Vec<Elem>>, GroupError> {
    check_order(g)?;
    let n = g.order();
    let trivial = closure(g, &[]);
    let mut seen: HashSet<ElemSet> = HashSet::from([trivial]);
    let mut queue: VecDeque<(ElemSet, Vec<Elem>)> = VecDeque::from([(trivial, Vec::new())]);
    while let Some((set, gens)) = queue.pop_front() {
        for x in 0..n {
            if set.contains(x) {
                continue;
            }
            let mut more = gens.clone();
            more.push(x);
            let next = closure(g, &more);
            if seen.insert(next) {
                queue.push_back((next, more));
            }
        }
    }
    let mut out: Vec<Vec<Elem>> = seen.into_iter().map(|s| s.to_vec(n)).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

/// True iff `s` (any order, duplicates allowed) is a subgroup.
pub fn is_subgroup(g: &FiniteGroup, s: &[Elem]) -> bool {
    if s.iter().any(|&x| x >= g.order()) {
        return false;
    }
    let mut set = vec![false; g.order()];
    for &x in s {
        set[x] = true;
    }
    if !set[g.identity()] {
        return false;
    }
    s.iter().all(|&a| set[g.inv(a)] && s.iter().all(|&b| set[g.mul(a, b)]))
}

pub fn is_normal(g: &FiniteGroup, s: &[Elem]) -> Result<bool, GroupError> {
    if !is_subgroup(g, s) {
        return Err(GroupError::NotASubgroup);
    }
    let mut set = vec![false; g.order()];
    for &x in s {
        set[x] = true;
    }
    Ok(g.elements().all(|x| s.iter().all(|&h| set[g.conjugate(x, h)])))
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..=n).find(|d| n % d == 0).unwrap_or(n)
}

/// `Some((p, k))` iff the order is `p^k` with `k >= 1`. The trivial group
/// gives `None`: every prime would qualify.
pub fn classify_p_group(g: &FiniteGroup) -> Option<(usize, u32)> {
    let mut n = g.order();
    if n < 2 {
        return None;
    }
    let p = smallest_prime_factor(n);
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (n == 1).then_some((p, k))
}

/// The lexicographically least normal subgroup of index p.
pub fn index_p_normal_subgroup(g: &FiniteGroup) -> Result<Vec<Elem>, GroupError> {
    let (p, _) = classify_p_group(g).ok_or(GroupError::NotAPGroup { order: g.order() })?;
    let target = g.order() / p;
    let subs = all_subgroups(g)?;
    for s in subs.into_iter().filter(|s| s.len() == target) {
        if is_normal(g, &s)? {
            return Ok(s);
        }
    }
    unreachable!("a nontrivial p-group has a normal subgroup of index p")
}

/// Every subgroup is normal.
pub fn is_dedekind_structural(g: &FiniteGroup) -> Result<bool, GroupError> {
    for s in all_subgroups(g)? {
        if !is_normal(g, &s)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The explicit form Q8 x Z2^t x D with D commutative of odd order.
///
/// Non-commutative groups with all subgroups normal are exactly the groups
/// of this form, so the test is "all subgroups normal and not commutative".
/// Commutative groups are therefore excluded, as the explicit form demands.
pub fn is_dedekind_literal_form(g: &FiniteGroup) -> Result<bool, GroupError> {
    Ok(!g.is_commutative() && is_dedekind_structural(g)?)
}
