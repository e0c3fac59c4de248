//! Programs over p-groups as polynomial maps over F_p.
//!
//! A group of order p^k is encoded as F_p^k through a chain of normal
//! subgroups of index p: with `H` normal of index p and `a` outside `H`,
//! every element is uniquely `h * a^e`, and its code is `e` followed by the
//! code of `h` in `H`.
//!
//! Products are compiled level by level. Writing `r_i` for the prefix sum of
//! the top coordinates mod p, a product of `u_i = h_i a^{e_i}` equals
//! `(prod_i t_i) * a^{r_n}` with
//! `t_i = a^{r_{i-1}} h_i a^{-r_{i-1}} * z^{[r_{i-1} + e_i >= p]}` and
//! `z = a^p`. The carry factor is needed because `a^p` lies in `H` but need
//! not be the identity (Z4, Q8). Each `t_i` lies in `H` and is a fixed
//! function of `(r_{i-1}, u_i)`, interpolated once per level as a polynomial
//! on F_p^{k+1}; the product of the `t_i` is compiled recursively in `H`.
//!
//! Compilation first builds the map for a generic word of length n, in one
//! variable per code coordinate of each factor `g_i^{x_i}`; its degree
//! depends only on the group and n. A program is then folded in by
//! substituting `code(g_i) * x_i`.

mod sparse;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{classify_p_group, index_p_normal_subgroup, Elem, FiniteGroup, GroupError};
use crate::models::BlockProduct;

pub use sparse::{mono_factors, mono_string, Mono, SparsePoly};

/// Upper bound on the number of stored terms during one compilation.
pub const MAX_TERMS: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("not a group program (blocks must read one bit each, no spill)")]
    NotAProgram,
    #[error("a conjugate left the normal subgroup at the level of order {order}")]
    NotNormal { order: usize },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// The bijection between a p-group and F_p^k.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    p: u8,
    k: usize,
    codes: Vec<Vec<u8>>,
    decode: Vec<Elem>,
    names: Vec<String>,
}

impl Encoding {
    fn from_codes(p: u8, k: usize, codes: Vec<Vec<u8>>, names: Vec<String>) -> Result<Self, PolyError> {
        let size = (p as usize).pow(k as u32);
        if codes.len() != size {
            return Err(PolyError::Parse(format!("{} codes for a group of order {size}", codes.len())));
        }
        let mut decode = vec![usize::MAX; size];
        for (g, c) in codes.iter().enumerate() {
            if c.len() != k || c.iter().any(|&v| v >= p) {
                return Err(PolyError::Parse(format!("bad code {c:?}")));
            }
            let slot = &mut decode[pack_code(p, c)];
            if *slot != usize::MAX {
                return Err(PolyError::Parse(format!("code {c:?} used twice")));
            }
            *slot = g;
        }
        Ok(Encoding { p, k, codes, decode, names })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.codes.len()
    }

    pub fn encode(&self, g: Elem) -> &[u8] {
        &self.codes[g]
    }

    pub fn decode(&self, code: &[u8]) -> Option<Elem> {
        if code.len() != self.k || code.iter().any(|&c| c >= self.p) {
            return None;
        }
        Some(self.decode[pack_code(self.p, code)])
    }

    pub fn element_name(&self, g: Elem) -> &str {
        &self.names[g]
    }
}

fn pack_code(p: u8, code: &[u8]) -> usize {
    code.iter().rev().fold(0, |acc, &c| acc * p as usize + c as usize)
}

/// One level of the normal series.
struct Level {
    p: u8,
    k: usize,
    order: usize,
    codes: Vec<Vec<u8>>,
    names: Vec<String>,
    step: Option<Step>,
}

struct Step {
    sub: Box<Level>,
    /// Code coordinates of `t(v, u)` in `H`, each as `(exponents over (v, code(u)), coeff)`.
    maps: Vec<Vec<(Vec<u32>, u8)>>,
}

fn build_level(g: &FiniteGroup) -> Result<Level, PolyError> {
    let order = g.order();
    let (p, k) = classify_p_group(g).ok_or(GroupError::NotAPGroup { order })?;
    let (p8, k) = (p as u8, k as usize);
    let h = index_p_normal_subgroup(g)?;
    let mut in_h = vec![None; order];
    for (i, &x) in h.iter().enumerate() {
        in_h[x] = Some(i);
    }
    let a = g.elements().find(|&x| in_h[x].is_none()).expect("H is proper");
    let a_inv = g.inv(a);
    let sub = if h.len() > 1 { Some(build_level(&g.subgroup_as_group(&h)?.0)?) } else { None };
    // x = h * a^e
    let split = |x: Elem| -> (u8, usize) {
        let mut y = x;
        for e in 0..p8 {
            if let Some(i) = in_h[y] {
                return (e, i);
            }
            y = g.mul(y, a_inv);
        }
        unreachable!("cosets of an index-p subgroup are the powers of a")
    };
    let codes: Vec<Vec<u8>> = g
        .elements()
        .map(|x| {
            let (e, i) = split(x);
            let mut c = vec![e];
            if let Some(s) = &sub {
                c.extend_from_slice(&s.codes[i]);
            }
            c
        })
        .collect();
    let names = g.names().to_vec();
    Encoding::from_codes(p8, k, codes.clone(), names.clone()).map_err(|_| GroupError::NotAPGroup { order })?;
    let step = match sub {
        None => None,
        Some(sub) => {
            let z = g.pow(a, p);
            let mut by_code = vec![0; order];
            for x in g.elements() {
                by_code[pack_code(p8, &codes[x])] = x;
            }
            // inputs: v, then the code of u
            let mut tables = vec![vec![0u8; p * order]; k - 1];
            for (packed, &u) in by_code.iter().enumerate() {
                let (e, i) = split(u);
                for v in 0..p {
                    let av = g.pow(a, v);
                    let mut t = g.conjugate(av, h[i]);
                    if v + e as usize >= p {
                        t = g.mul(t, z);
                    }
                    let ti = in_h[t].ok_or(PolyError::NotNormal { order })?;
                    for (j, &c) in sub.codes[ti].iter().enumerate() {
                        tables[j][v + p * packed] = c;
                    }
                }
            }
            let maps = tables.into_iter().map(|t| interpolate(p8, k + 1, t)).collect();
            Some(Step { sub: Box::new(sub), maps })
        }
    };
    Ok(Level { p: p8, k, order, codes, names, step })
}

fn inv_mod(a: u32, p: u32) -> u32 {
    let mut r = 1;
    for _ in 0..p - 2 {
        r = r * a % p;
    }
    r
}

/// Coefficients of the unique polynomial with exponents < p in each of `m`
/// variables taking the given values; value index is `sum_j z_j p^j`.
fn interpolate(p: u8, m: usize, mut f: Vec<u8>) -> Vec<(Vec<u32>, u8)> {
    let q = p as u32;
    let pu = p as usize;
    // inverse of the Vandermonde matrix V[a][t] = a^t
    let mut mat: Vec<Vec<u32>> = (0..pu)
        .map(|a| {
            let mut row: Vec<u32> = (0..pu).map(|t| (a as u32).pow(t as u32) % q).collect();
            row.extend((0..pu).map(|j| (j == a) as u32));
            row
        })
        .collect();
    for col in 0..pu {
        let piv = (col..pu).find(|&r| mat[r][col] != 0).expect("Vandermonde matrices are invertible");
        mat.swap(col, piv);
        let s = inv_mod(mat[col][col], q);
        mat[col].iter_mut().for_each(|v| *v = *v * s % q);
        for r in 0..pu {
            if r != col && mat[r][col] != 0 {
                let factor = mat[r][col];
                for c in 0..2 * pu {
                    mat[r][c] = (mat[r][c] + q * q - factor * mat[col][c] % q) % q;
                }
            }
        }
    }
    let vinv: Vec<Vec<u32>> = mat.into_iter().map(|row| row[pu..].to_vec()).collect();
    let mut stride = 1;
    let mut buf = vec![0u32; pu];
    for _ in 0..m {
        for base in 0..f.len() {
            if (base / stride) % pu != 0 {
                continue;
            }
            for (a, b) in buf.iter_mut().enumerate() {
                *b = f[base + a * stride] as u32;
            }
            for t in 0..pu {
                f[base + t * stride] = ((0..pu).map(|a| vinv[t][a] * buf[a]).sum::<u32>() % q) as u8;
            }
        }
        stride *= pu;
    }
    f.into_iter()
        .enumerate()
        .filter(|&(_, c)| c != 0)
        .map(|(idx, c)| {
            let mut rest = idx;
            let exps = (0..m)
                .map(|_| {
                    let e = (rest % pu) as u32;
                    rest /= pu;
                    e
                })
                .collect();
            (exps, c)
        })
        .collect()
}

/// `sum_mono coeff * prod inputs[j]^{e_j}` for each map.
fn compose(maps: &[Vec<(Vec<u32>, u8)>], inputs: &[&SparsePoly]) -> Vec<SparsePoly> {
    let (p, vars) = (inputs[0].p(), inputs[0].vars());
    let mut powers: Vec<Vec<SparsePoly>> = inputs.iter().map(|&x| vec![SparsePoly::constant(p, vars, false, 1), x.clone()]).collect();
    maps.iter()
        .map(|map| {
            let mut out = SparsePoly::zero(p, vars, false);
            for (exps, c) in map {
                if exps.iter().zip(inputs).any(|(&e, x)| e > 0 && x.is_zero()) {
                    continue;
                }
                let mut term = SparsePoly::constant(p, vars, false, *c);
                for (j, &e) in exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    while powers[j].len() <= e as usize {
                        let next = powers[j].last().unwrap().mul(inputs[j]);
                        powers[j].push(next);
                    }
                    term = term.mul(&powers[j][e as usize]);
                }
                out.add_assign(&term);
            }
            out
        })
        .collect()
}

fn compile_level(level: &Level, terms: Vec<Vec<SparsePoly>>, vars: usize, limit: usize) -> Result<Vec<SparsePoly>, PolyError> {
    let mut prefix = SparsePoly::zero(level.p, vars, false);
    let Some(step) = &level.step else {
        for t in &terms {
            prefix.add_assign(&t[0]);
        }
        return Ok(vec![prefix]);
    };
    let mut next = Vec::with_capacity(terms.len());
    let mut stored = 0;
    for term in &terms {
        let mut inputs = vec![&prefix];
        inputs.extend(term.iter());
        let t = compose(&step.maps, &inputs);
        prefix.add_assign(&term[0]);
        if t.iter().any(|x| !x.is_zero()) {
            stored += t.iter().map(SparsePoly::len).sum::<usize>();
            if stored > limit {
                return Err(PolyError::TooLarge(format!("more than {limit} terms at the level of order {}", level.order)));
            }
            next.push(t);
        }
    }
    let mut out = vec![prefix];
    out.extend(compile_level(&step.sub, next, vars, limit)?);
    Ok(out)
}

/// Compiler for one group; caches the generic word maps by length.
pub struct Compiler {
    top: Level,
    group_name: String,
    term_limit: usize,
    cache: Mutex<HashMap<usize, Arc<Vec<SparsePoly>>>>,
}

impl Compiler {
    pub fn new(g: &FiniteGroup) -> Result<Self, PolyError> {
        Ok(Compiler { top: build_level(g)?, group_name: g.name().to_string(), term_limit: MAX_TERMS, cache: Mutex::new(HashMap::new()) })
    }

    /// Replaces the default `MAX_TERMS` cap.
    pub fn with_term_limit(mut self, limit: usize) -> Self {
        self.term_limit = limit;
        self
    }

    pub fn encoding(&self) -> Encoding {
        Encoding::from_codes(self.top.p, self.top.k, self.top.codes.clone(), self.top.names.clone()).expect("checked at build time")
    }

    pub fn p(&self) -> u8 {
        self.top.p
    }

    pub fn k(&self) -> usize {
        self.top.k
    }

    /// The map from the codes of `u_1..u_n` (variable `i*k + j` is coordinate
    /// `j` of `u_i`) to the code of `u_1 ... u_n`.
    pub fn word_map(&self, n: usize) -> Result<Arc<Vec<SparsePoly>>, PolyError> {
        if let Some(m) = self.cache.lock().unwrap().get(&n) {
            return Ok(m.clone());
        }
        let (p, k) = (self.top.p, self.top.k);
        let vars = n * k;
        let terms = (0..n).map(|i| (0..k).map(|j| SparsePoly::var(p, vars, false, i * k + j)).collect()).collect();
        let map = Arc::new(compile_level(&self.top, terms, vars, self.term_limit)?);
        self.cache.lock().unwrap().insert(n, map.clone());
        Ok(map)
    }

    /// Degree of the word map of length n.
    pub fn word_degree(&self, n: usize) -> Result<usize, PolyError> {
        Ok(self.word_map(n)?.iter().map(SparsePoly::degree).max().unwrap_or(0))
    }

    pub fn compile_elements(&self, elems: &[Elem]) -> Result<PolyMap, PolyError> {
        let n = elems.len();
        if let Some(&g) = elems.iter().find(|&&g| g >= self.top.order) {
            return Err(GroupError::NotClosed { row: 0, col: 0, value: g }.into());
        }
        let word = self.word_map(n)?;
        let (p, k) = (self.top.p, self.top.k);
        let polys = word
            .iter()
            .map(|poly| {
                let mut out = SparsePoly::zero(p, n, true);
                let mut factors = Vec::new();
                for (m, c) in poly.terms() {
                    factors.clear();
                    let mut coeff = c as u32;
                    for (var, e) in mono_factors(m) {
                        let (i, j) = (var / k, var % k);
                        coeff = coeff * (self.top.codes[elems[i]][j] as u32).pow(e) % p as u32;
                        if coeff == 0 {
                            break;
                        }
                        factors.push((i, 1));
                    }
                    if coeff != 0 {
                        out.add_factors(&factors, coeff as u8);
                    }
                }
                out
            })
            .collect();
        let word_degree = word.iter().map(SparsePoly::degree).max().unwrap_or(0);
        Ok(PolyMap { group: self.group_name.clone(), n, encoding: self.encoding(), polys, word_degree })
    }

    pub fn compile(&self, program: &BlockProduct) -> Result<PolyMap, PolyError> {
        let elems = program.program_elements().ok_or(PolyError::NotAProgram)?;
        self.compile_elements(&elems)
    }
}

pub fn encode(g: &FiniteGroup) -> Result<Encoding, PolyError> {
    Ok(Compiler::new(g)?.encoding())
}

pub fn compile(program: &BlockProduct) -> Result<PolyMap, PolyError> {
    Compiler::new(program.group())?.compile(program)
}

/// `k` polynomials in the program's input bits, one per code coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    group: String,
    n: usize,
    encoding: Encoding,
    polys: Vec<SparsePoly>,
    word_degree: usize,
}

impl PolyMap {
    pub fn p(&self) -> u8 {
        self.encoding.p
    }

    pub fn k(&self) -> usize {
        self.encoding.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn encoding(&self) -> &Encoding {
        &self.encoding
    }

    pub fn polys(&self) -> &[SparsePoly] {
        &self.polys
    }

    /// Largest degree of the folded polynomials (multilinear in the input bits).
    pub fn degree(&self) -> usize {
        self.polys.iter().map(SparsePoly::degree).max().unwrap_or(0)
    }

    /// Degree of the generic word map the program was folded from; depends
    /// only on the group and n.
    pub fn word_degree(&self) -> usize {
        self.word_degree
    }

    pub fn eval(&self, x: &[u8]) -> Result<Elem, PolyError> {
        if x.len() != self.n {
            return Err(PolyError::LengthMismatch { expected: self.n, got: x.len() });
        }
        let code: Vec<u8> = self.polys.iter().map(|f| f.eval(x)).collect();
        Ok(self.encoding.decode(&code).expect("every code is valid"))
    }

    /// Values at every input, indexed with bit `i` of the index as `x_i` (n <= 24).
    pub fn eval_all(&self) -> Result<Vec<Elem>, PolyError> {
        if self.n > 24 {
            return Err(PolyError::TooLarge(format!("2^{} inputs", self.n)));
        }
        let p = self.p() as u32;
        let masks: Vec<Vec<(u32, u32)>> = self
            .polys
            .iter()
            .map(|f| f.terms().map(|(m, c)| (mono_factors(m).fold(0u32, |acc, (v, _)| acc | 1 << v), c as u32)).collect())
            .collect();
        let mut code = vec![0u8; self.k()];
        Ok((0u32..1 << self.n)
            .map(|x| {
                for (slot, terms) in code.iter_mut().zip(&masks) {
                    *slot = (terms.iter().filter(|&&(m, _)| x & m == m).map(|&(_, c)| c).sum::<u32>() % p) as u8;
                }
                self.encoding.decode(&code).expect("every code is valid")
            })
            .collect())
    }

    /// The map `y -> P(X xor y)`.
    pub fn compose_with_restriction(&self, x_fixed: &[u8]) -> Result<PolyMap, PolyError> {
        if x_fixed.len() != self.n {
            return Err(PolyError::LengthMismatch { expected: self.n, got: x_fixed.len() });
        }
        let p = self.p();
        let polys = self
            .polys
            .iter()
            .map(|f| {
                let mut out = SparsePoly::zero(p, self.n, true);
                for (m, c) in f.terms() {
                    // prod over flipped variables of (1 - y_i), times the others
                    let vars: Vec<usize> = mono_factors(m).map(|(v, _)| v).collect();
                    let (flipped, kept): (Vec<usize>, Vec<usize>) = vars.into_iter().partition(|&v| x_fixed[v] & 1 == 1);
                    for mask in 0u64..1 << flipped.len() {
                        let mut factors: Vec<(usize, u32)> = kept.iter().map(|&v| (v, 1)).collect();
                        factors.extend(flipped.iter().enumerate().filter(|&(j, _)| mask >> j & 1 == 1).map(|(_, &v)| (v, 1)));
                        let coeff = if mask.count_ones() % 2 == 1 { (p - c) % p } else { c };
                        out.add_factors(&factors, coeff);
                    }
                }
                out
            })
            .collect();
        Ok(PolyMap { polys, ..self.clone() })
    }

    pub fn to_file(&self) -> PolyMapFile {
        PolyMapFile {
            group: self.group.clone(),
            p: self.p(),
            k: self.k(),
            n: self.n,
            degree: self.degree(),
            word_degree: self.word_degree,
            encoding: (0..self.encoding.order())
                .map(|g| EncodingEntry { element: self.encoding.names[g].clone(), code: self.encoding.codes[g].clone() })
                .collect(),
            polys: self
                .polys
                .iter()
                .map(|f| f.to_sorted_strings().into_iter().map(|(m, c)| (if m.is_empty() { "1".into() } else { m }, c)).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable")
    }

    pub fn from_file(f: PolyMapFile) -> Result<PolyMap, PolyError> {
        if !(2..=13).contains(&f.p) || ![2, 3, 5, 7, 11, 13].contains(&f.p) {
            return Err(PolyError::Parse(format!("p = {} is not a supported prime", f.p)));
        }
        if f.polys.len() != f.k {
            return Err(PolyError::Parse(format!("{} polynomials for k = {}", f.polys.len(), f.k)));
        }
        let names = f.encoding.iter().map(|e| e.element.clone()).collect();
        let codes = f.encoding.into_iter().map(|e| e.code).collect();
        let encoding = Encoding::from_codes(f.p, f.k, codes, names)?;
        let mut polys = Vec::with_capacity(f.k);
        for terms in &f.polys {
            let mut poly = SparsePoly::zero(f.p, f.n, true);
            for (m, &c) in terms {
                let factors = poly.parse_monomial(m).map_err(PolyError::Parse)?;
                poly.add_factors(&factors, c);
            }
            polys.push(poly);
        }
        Ok(PolyMap { group: f.group, n: f.n, encoding, polys, word_degree: f.word_degree })
    }

    pub fn from_json(s: &str) -> Result<PolyMap, PolyError> {
        let f: PolyMapFile = serde_json::from_str(s).map_err(|e| PolyError::Parse(e.to_string()))?;
        PolyMap::from_file(f)
    }
}

pub fn eval_polymap(p: &PolyMap, x: &[u8]) -> Result<Elem, PolyError> {
    p.eval(x)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EncodingEntry {
    pub element: String,
    pub code: Vec<u8>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyMapFile {
    pub group: String,
    pub p: u8,
    pub k: usize,
    pub n: usize,
    pub degree: usize,
    pub word_degree: usize,
    pub encoding: Vec<EncodingEntry>,
    pub polys: Vec<BTreeMap<String, u8>>,
}
