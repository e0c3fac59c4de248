//! Sparse multivariate polynomials over a prime field F_p.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt::Write;

/// A monomial as sorted `(var << 4) | exponent` words; exponents are 1..=12.
pub type Mono = Vec<u32>;

const EXP_BITS: u32 = 4;
const EXP_MASK: u32 = (1 << EXP_BITS) - 1;

fn pack(var: usize, exp: u32) -> u32 {
    ((var as u32) << EXP_BITS) | exp
}

/// `(variable, exponent)` pairs of a packed monomial.
pub fn mono_factors(m: &[u32]) -> impl Iterator<Item = (usize, u32)> + '_ {
    m.iter().map(|&w| ((w >> EXP_BITS) as usize, w & EXP_MASK))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    p: u8,
    vars: usize,
    /// Variables only take values in {0,1}, so `x^2 = x`.
    boolean: bool,
    terms: HashMap<Mono, u8>,
}

impl SparsePoly {
    pub fn zero(p: u8, vars: usize, boolean: bool) -> Self {
        assert!(p >= 2 && p <= 13, "field size out of range");
        SparsePoly { p, vars, boolean, terms: HashMap::new() }
    }

    pub fn constant(p: u8, vars: usize, boolean: bool, c: u8) -> Self {
        let mut out = Self::zero(p, vars, boolean);
        out.add_term(Vec::new(), c);
        out
    }

    pub fn var(p: u8, vars: usize, boolean: bool, i: usize) -> Self {
        assert!(i < vars);
        let mut out = Self::zero(p, vars, boolean);
        out.add_term(vec![pack(i, 1)], 1);
        out
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn is_boolean(&self) -> bool {
        self.boolean
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, u8)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    /// Adds `c * m`; `m` must already be reduced and sorted.
    pub fn add_term(&mut self, m: Mono, c: u8) {
        let c = c % self.p;
        if c == 0 {
            return;
        }
        let p = self.p;
        match self.terms.entry(m) {
            Entry::Occupied(mut o) => {
                let v = (*o.get() + c) % p;
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    /// Adds `c * prod x_i^{e_i}` from an unsorted factor list, reducing exponents.
    pub fn add_factors(&mut self, factors: &[(usize, u32)], c: u8) {
        let mut m: Vec<(usize, u32)> = factors.iter().copied().filter(|&(_, e)| e > 0).collect();
        m.sort_unstable();
        let mut out: Mono = Vec::with_capacity(m.len());
        for (v, e) in m {
            assert!(v < self.vars, "variable out of range");
            match out.last_mut() {
                Some(last) if (*last >> EXP_BITS) as usize == v => {
                    *last = pack(v, self.reduce_exp((*last & EXP_MASK) + e));
                }
                _ => out.push(pack(v, self.reduce_exp(e))),
            }
        }
        self.add_term(out, c);
    }

    fn reduce_exp(&self, e: u32) -> u32 {
        if self.boolean {
            1
        } else {
            // y^p = y on F_p
            (e - 1) % (self.p as u32 - 1) + 1
        }
    }

    fn same_ring(&self, other: &Self) {
        assert!(self.p == other.p && self.vars == other.vars && self.boolean == other.boolean, "polynomials over different rings");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_ring(other);
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.same_ring(other);
        for (m, &c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn scale(&self, c: u8) -> Self {
        let c = c % self.p;
        let mut out = Self::zero(self.p, self.vars, self.boolean);
        if c != 0 {
            let p = self.p as u32;
            out.terms = self.terms.iter().map(|(m, &v)| (m.clone(), (v as u32 * c as u32 % p) as u8)).collect();
        }
        out
    }

    fn mul_mono(&self, a: &[u32], b: &[u32]) -> Mono {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let (va, vb) = (a[i] >> EXP_BITS, b[j] >> EXP_BITS);
            if va < vb {
                out.push(a[i]);
                i += 1;
            } else if vb < va {
                out.push(b[j]);
                j += 1;
            } else {
                out.push(pack(va as usize, self.reduce_exp((a[i] & EXP_MASK) + (b[j] & EXP_MASK))));
                i += 1;
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_ring(other);
        let p = self.p as u32;
        let mut acc: HashMap<Mono, u32> = HashMap::with_capacity(self.terms.len().max(other.terms.len()));
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let slot = acc.entry(self.mul_mono(ma, mb)).or_insert(0);
                *slot = (*slot + ca as u32 * cb as u32) % p;
            }
        }
        let mut out = Self::zero(self.p, self.vars, self.boolean);
        out.terms = acc.into_iter().filter(|&(_, c)| c != 0).map(|(m, c)| (m, c as u8)).collect();
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(self.p, self.vars, self.boolean, 1);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Total degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| mono_factors(m).map(|(_, e)| e as usize).sum()).max().unwrap_or(0)
    }

    /// Value at `x` (entries taken mod p).
    pub fn eval(&self, x: &[u8]) -> u8 {
        let p = self.p as u32;
        let mut total = 0u32;
        for (m, &c) in &self.terms {
            let mut v = c as u32;
            for (var, e) in mono_factors(m) {
                v = v * (x[var] as u32 % p).pow(e) % p;
                if v == 0 {
                    break;
                }
            }
            total = (total + v) % p;
        }
        total as u8
    }

    /// Terms sorted by degree then lexicographically, monomials printed as `x0*x3^2`.
    pub fn to_sorted_strings(&self) -> Vec<(String, u8)> {
        let mut items: Vec<(&Mono, u8)> = self.terms().collect();
        items.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(b.0)));
        items.into_iter().map(|(m, c)| (mono_string(m), c)).collect()
    }

    /// Inverse of `mono_string`.
    pub fn parse_monomial(&self, s: &str) -> Result<Vec<(usize, u32)>, String> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Vec::new());
        }
        s.split('*')
            .map(|f| {
                let (v, e) = f.split_once('^').unwrap_or((f, "1"));
                let var = v.trim().strip_prefix('x').ok_or_else(|| format!("bad factor {f:?}"))?;
                let var: usize = var.parse().map_err(|_| format!("bad variable {v:?}"))?;
                let e: u32 = e.trim().parse().map_err(|_| format!("bad exponent {e:?}"))?;
                if var >= self.vars || e == 0 || e > EXP_MASK {
                    return Err(format!("factor {f:?} out of range"));
                }
                Ok((var, e))
            })
            .collect()
    }
}

pub fn mono_string(m: &[u32]) -> String {
    let mut s = String::new();
    for (i, (v, e)) in mono_factors(m).enumerate() {
        if i > 0 {
            s.push('*');
        }
        write!(s, "x{v}").unwrap();
        if e > 1 {
            write!(s, "^{e}").unwrap();
        }
    }
    s
}
