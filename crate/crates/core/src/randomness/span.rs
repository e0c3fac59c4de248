//! Uniform distributions on linear images, accumulated exactly.
//!
//! Several samplers are linear in part of their seed: for a fixed outer seed
//! the output is `L y` with `y` uniform, hence uniform on the column span of
//! `L`. Summing these spans is much cheaper than enumerating `y`.

use super::dist::wht;

/// Row-reduce F_2 vectors (bitmasks); returns a basis in reduced echelon
/// form together with each row's pivot bit.
pub fn f2_echelon(vectors: &[u64]) -> Vec<(u64, u32)> {
    let mut rows: Vec<(u64, u32)> = Vec::new();
    for &v in vectors {
        let mut v = v;
        for &(r, piv) in &rows {
            if v >> piv & 1 == 1 {
                v ^= r;
            }
        }
        if v == 0 {
            continue;
        }
        let piv = v.trailing_zeros();
        for row in rows.iter_mut() {
            if row.0 >> piv & 1 == 1 {
                row.0 ^= v;
            }
        }
        rows.push((v, piv));
    }
    rows
}

pub fn f2_rank(vectors: &[u64]) -> usize {
    f2_echelon(vectors).len()
}

/// Basis of `{a : a . v = 0 for all v in span}` inside `F_2^n`.
pub fn f2_orthogonal(echelon: &[(u64, u32)], n: usize) -> Vec<u64> {
    let pivots: u64 = echelon.iter().fold(0, |acc, &(_, p)| acc | 1 << p);
    (0..n as u32)
        .filter(|f| pivots >> f & 1 == 0)
        .map(|f| {
            let mut a = 1u64 << f;
            for &(row, piv) in echelon {
                if row >> f & 1 == 1 {
                    a |= 1 << piv;
                }
            }
            a
        })
        .collect()
}

/// Calls `visit` on every element of the span of `basis`, in Gray-code order.
pub fn f2_span_for_each(basis: &[u64], mut visit: impl FnMut(u64)) {
    let mut cur = 0u64;
    visit(cur);
    for i in 1u64..(1u64 << basis.len()) {
        cur ^= basis[i.trailing_zeros() as usize];
        visit(cur);
    }
}

/// Mixture of uniform distributions on F_2-spans, over `n <= 24` bits.
pub struct F2SpanMixture {
    n: usize,
    direct: Vec<f64>,
    spectral: Vec<f64>,
}

impl F2SpanMixture {
    pub fn new(n: usize) -> Self {
        F2SpanMixture { n, direct: vec![0.0; 1 << n], spectral: vec![0.0; 1 << n] }
    }

    /// Add `weight` times the uniform distribution on the span of `columns`.
    /// Large spans are added through their orthogonal complement in the
    /// Fourier domain instead.
    pub fn add(&mut self, columns: &[u64], weight: f64) {
        let basis = f2_echelon(columns);
        let r = basis.len();
        if r <= self.n - r {
            let w = weight / (1u64 << r) as f64;
            let vecs: Vec<u64> = basis.iter().map(|b| b.0).collect();
            f2_span_for_each(&vecs, |z| self.direct[z as usize] += w);
        } else {
            let dual = f2_orthogonal(&basis, self.n);
            f2_span_for_each(&dual, |a| self.spectral[a as usize] += weight);
        }
    }

    pub fn finish(self) -> Vec<f64> {
        let F2SpanMixture { direct, mut spectral, .. } = self;
        if spectral.iter().any(|&x| x != 0.0) {
            wht(&mut spectral);
            let scale = 1.0 / spectral.len() as f64;
            direct.iter().zip(&spectral).map(|(d, s)| (d + s * scale).max(0.0)).collect()
        } else {
            direct
        }
    }
}

/// Reduced echelon basis over F_p of the given vectors (entries < p).
pub fn fp_echelon(vectors: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let inv = |a: u64| mod_pow(a, p - 2, p);
    let mut rows: Vec<(Vec<u64>, usize)> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        for (r, piv) in &rows {
            let c = v[*piv];
            if c != 0 {
                v.iter_mut().zip(r).for_each(|(x, y)| *x = (*x + (p - c) * y) % p);
            }
        }
        let Some(piv) = v.iter().position(|&x| x != 0) else { continue };
        let s = inv(v[piv]);
        v.iter_mut().for_each(|x| *x = *x * s % p);
        for (r, _) in rows.iter_mut() {
            let c = r[piv];
            if c != 0 {
                r.iter_mut().zip(&v).for_each(|(x, y)| *x = (*x + (p - c) * y) % p);
            }
        }
        rows.push((v, piv));
    }
    rows.into_iter().map(|(r, _)| r).collect()
}

pub fn mod_pow(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

/// Adds `weight` times the uniform distribution on the F_p-span of
/// `columns` into `probs`, indexed by `sum_i z_i p^i`.
pub fn fp_add_span(probs: &mut [f64], columns: &[Vec<u64>], p: u64, weight: f64) {
    let basis = fp_echelon(columns, p);
    let n = columns.first().map_or(0, |c| c.len());
    let pw: Vec<usize> = (0..n).map(|i| (p as usize).pow(i as u32)).collect();
    let idx: Vec<usize> = basis.iter().map(|b| b.iter().zip(&pw).map(|(&c, &w)| c as usize * w).sum()).collect();
    let count = (p as usize).pow(basis.len() as u32);
    let w = weight / count as f64;
    // odometer over coefficient tuples; digitwise addition mod p of indices
    let p = p as usize;
    let add = |a: usize, b: usize| -> usize {
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        for _ in 0..n {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    };
    let mut coeffs = vec![0usize; basis.len()];
    let mut cur = 0usize;
    loop {
        probs[cur] += w;
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return;
            }
            coeffs[i] += 1;
            cur = add(cur, idx[i]);
            if coeffs[i] < p {
                break;
            }
            // wrapped: p additions brought this digit back to zero
            coeffs[i] = 0;
            i += 1;
        }
    }
}
