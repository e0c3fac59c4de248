//! Dense exact distributions over `[q]^n` and the transforms that combine them.
//!
//! Outcome `(y_0, ..., y_{n-1})` is stored at index `sum_i y_i q^i`, so for
//! `q = 2` coordinate `i` is bit `i` of the index.

use std::f64::consts::TAU;

use num_complex::Complex64;

use super::RandError;

/// Output spaces up to this many outcomes are held densely.
pub const MAX_OUTCOMES: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq)]
pub struct OutputDist {
    n: usize,
    q: u32,
    probs: Vec<f64>,
}

pub(crate) fn outcome_count(n: usize, q: u32) -> Option<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.checked_mul(q as usize)?;
        if total > MAX_OUTCOMES {
            return None;
        }
    }
    Some(total)
}

fn check_space(n: usize, q: u32) -> Result<usize, RandError> {
    outcome_count(n, q).ok_or(RandError::TooLargeForExact { what: format!("output space {q}^{n}") })
}

impl OutputDist {
    pub fn uniform(n: usize, q: u32) -> Result<Self, RandError> {
        let size = check_space(n, q)?;
        Ok(OutputDist { n, q, probs: vec![1.0 / size as f64; size] })
    }

    pub fn point(q: u32, values: &[u8]) -> Result<Self, RandError> {
        let size = check_space(values.len(), q)?;
        let mut probs = vec![0.0; size];
        let d = OutputDist { n: values.len(), q, probs: Vec::new() };
        probs[d.index(values)] = 1.0;
        Ok(OutputDist { probs, ..d })
    }

    /// Panics if the length is not `q^n`.
    pub fn from_probs(n: usize, q: u32, probs: Vec<f64>) -> Self {
        assert_eq!(Some(probs.len()), outcome_count(n, q), "length must be q^n");
        OutputDist { n, q, probs }
    }

    pub fn from_counts(n: usize, q: u32, counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        OutputDist::from_probs(n, q, counts.iter().map(|&c| c as f64 / total as f64).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn index(&self, values: &[u8]) -> usize {
        values.iter().rev().fold(0, |acc, &v| acc * self.q as usize + v as usize)
    }

    pub fn values(&self, mut idx: usize) -> Vec<u8> {
        (0..self.n)
            .map(|_| {
                let v = idx % self.q as usize;
                idx /= self.q as usize;
                v as u8
            })
            .collect()
    }

    pub fn prob(&self, values: &[u8]) -> f64 {
        self.probs[self.index(values)]
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn tv(&self, other: &OutputDist) -> f64 {
        assert_eq!((self.n, self.q), (other.n, other.q));
        0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Coordinatewise XOR of independent samples (q = 2).
    pub fn xor_convolve(&self, other: &OutputDist) -> OutputDist {
        assert_eq!((self.q, other.q), (2, 2));
        assert_eq!(self.n, other.n);
        let mut a = self.probs.clone();
        let mut b = other.probs.clone();
        wht(&mut a);
        wht(&mut b);
        a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
        wht(&mut a);
        let scale = 1.0 / a.len() as f64;
        OutputDist { n: self.n, q: 2, probs: a.into_iter().map(|x| (x * scale).max(0.0)).collect() }
    }

    /// Coordinatewise sum mod q of independent samples.
    pub fn add_convolve(&self, other: &OutputDist) -> OutputDist {
        assert_eq!((self.n, self.q), (other.n, other.q));
        if self.q == 2 {
            return self.xor_convolve(other);
        }
        let mut a = self.spectrum();
        let b = other.spectrum();
        a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
        OutputDist::from_spectrum(self.n, self.q, a)
    }

    /// `F(a) = sum_y P(y) w^{a.y}` with `w = e^{2 pi i / q}`: the character expectations.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut v: Vec<Complex64> = self.probs.iter().map(|&p| Complex64::new(p, 0.0)).collect();
        dft_axes(&mut v, self.n, self.q as usize, false);
        v
    }

    fn from_spectrum(n: usize, q: u32, mut spec: Vec<Complex64>) -> OutputDist {
        dft_axes(&mut spec, n, q as usize, true);
        let scale = 1.0 / spec.len() as f64;
        OutputDist { n, q, probs: spec.into_iter().map(|z| (z.re * scale).max(0.0)).collect() }
    }

    /// Distribution of `f(Y)` for a map on outcome indices.
    pub fn pushforward(&self, n: usize, q: u32, f: impl Fn(usize) -> usize) -> Result<OutputDist, RandError> {
        let size = check_space(n, q)?;
        let mut probs = vec![0.0; size];
        for (i, &p) in self.probs.iter().enumerate() {
            if p != 0.0 {
                probs[f(i)] += p;
            }
        }
        Ok(OutputDist { n, q, probs })
    }

    /// Mixture `sum_i w_i D_i`.
    pub fn mixture(parts: &[(f64, OutputDist)]) -> OutputDist {
        let (n, q) = (parts[0].1.n, parts[0].1.q);
        let mut probs = vec![0.0; parts[0].1.probs.len()];
        for (w, d) in parts {
            assert_eq!((d.n, d.q), (n, q));
            probs.iter_mut().zip(&d.probs).for_each(|(a, b)| *a += w * b);
        }
        OutputDist { n, q, probs }
    }

    /// Output coordinate `i` takes input coordinate `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> OutputDist {
        let q = self.q as usize;
        let pw: Vec<usize> = (0..self.n).map(|i| q.pow(i as u32)).collect();
        let probs_len = self.probs.len();
        let mut probs = vec![0.0; probs_len];
        for (idx, &p) in self.probs.iter().enumerate() {
            let mut out = 0;
            for (i, &src) in perm.iter().enumerate() {
                out += (idx / pw[src]) % q * pw[i];
            }
            probs[out] += p;
        }
        OutputDist { n: self.n, q: self.q, probs }
    }

    /// Joint marginal on `coords`, in the given order.
    pub fn marginal(&self, coords: &[usize]) -> OutputDist {
        let q = self.q as usize;
        let size = q.pow(coords.len() as u32);
        let mut probs = vec![0.0; size];
        if q == 2 {
            for (idx, &p) in self.probs.iter().enumerate() {
                let mut out = 0;
                for (i, &c) in coords.iter().enumerate() {
                    out |= (idx >> c & 1) << i;
                }
                probs[out] += p;
            }
        } else {
            let pw: Vec<usize> = (0..self.n).map(|i| q.pow(i as u32)).collect();
            for (idx, &p) in self.probs.iter().enumerate() {
                let mut out = 0;
                let mut place = 1;
                for &c in coords {
                    out += (idx / pw[c]) % q * place;
                    place *= q;
                }
                probs[out] += p;
            }
        }
        OutputDist { n: coords.len(), q: self.q, probs }
    }

    /// Distribution of the remaining coordinates given `Y_coords = values`.
    pub fn condition(&self, coords: &[usize], values: &[u8]) -> Result<OutputDist, RandError> {
        let rest: Vec<usize> = (0..self.n).filter(|i| !coords.contains(i)).collect();
        let q = self.q as usize;
        let pw: Vec<usize> = (0..self.n).map(|i| q.pow(i as u32)).collect();
        let mut probs = vec![0.0; q.pow(rest.len() as u32)];
        let mut mass = 0.0;
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 || coords.iter().zip(values).any(|(&c, &v)| (idx / pw[c]) % q != v as usize) {
                continue;
            }
            let mut out = 0;
            let mut place = 1;
            for &c in &rest {
                out += (idx / pw[c]) % q * place;
                place *= q;
            }
            probs[out] += p;
            mass += p;
        }
        if mass <= 0.0 {
            return Err(RandError::EmptyConditionedSupport);
        }
        probs.iter_mut().for_each(|p| *p /= mass);
        Ok(OutputDist { n: rest.len(), q: self.q, probs })
    }

    /// `Pr[Y_i = 1]` per coordinate (q = 2) or `Pr[Y_i != 0]` in general.
    pub fn marginal_ones(&self) -> Vec<f64> {
        (0..self.n).map(|i| 1.0 - self.marginal(&[i]).probs[0]).collect()
    }

    /// Largest `|E[w^{a.Y}]|` over nonzero `a`, and the maximiser.
    pub fn max_bias(&self) -> (f64, usize) {
        if self.n == 0 {
            return (0.0, 0);
        }
        let mut best = (0.0, 0);
        if self.q == 2 {
            let mut f = self.probs.clone();
            wht(&mut f);
            for (a, v) in f.iter().enumerate().skip(1) {
                if v.abs() > best.0 {
                    best = (v.abs(), a);
                }
            }
        } else {
            for (a, v) in self.spectrum().iter().enumerate().skip(1) {
                if v.norm() > best.0 {
                    best = (v.norm(), a);
                }
            }
        }
        best
    }

    /// Largest bias over nonzero `a` with at most `k` nonzero coordinates.
    pub fn max_bias_weight(&self, k: usize) -> f64 {
        let q = self.q as usize;
        let weight = |mut a: usize| {
            let mut w = 0;
            while a > 0 {
                w += (a % q != 0) as usize;
                a /= q;
            }
            w
        };
        if self.q == 2 {
            let mut f = self.probs.clone();
            wht(&mut f);
            f.iter().enumerate().skip(1).filter(|(a, _)| weight(*a) <= k).map(|(_, v)| v.abs()).fold(0.0, f64::max)
        } else {
            self.spectrum().iter().enumerate().skip(1).filter(|(a, _)| weight(*a) <= k).map(|(_, v)| v.norm()).fold(0.0, f64::max)
        }
    }

    /// Max over `k`-subsets `S` and outcomes `v` of `|Pr[Y_S = v] - prod_i Pr_target[v_i]|`,
    /// where each coordinate's target is Bernoulli(`one_prob`) (q = 2).
    pub fn kwise_linf(&self, k: usize, one_prob: f64) -> f64 {
        assert_eq!(self.q, 2);
        let k = k.min(self.n);
        let mut worst: f64 = 0.0;
        for subset in subsets(self.n, k) {
            let m = self.marginal(&subset);
            for (v, &p) in m.probs.iter().enumerate() {
                let ones = v.count_ones() as i32;
                let target = one_prob.powi(ones) * (1.0 - one_prob).powi(k as i32 - ones);
                worst = worst.max((p - target).abs());
            }
        }
        worst
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// In-place unnormalised Walsh–Hadamard transform.
pub fn wht(v: &mut [f64]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// Length-q DFT along every axis of a `[q]^n` array; `inverse` flips the sign.
fn dft_axes(v: &mut [Complex64], n: usize, q: usize, inverse: bool) {
    let sign = if inverse { -1.0 } else { 1.0 };
    let roots: Vec<Complex64> = (0..q).map(|j| Complex64::from_polar(1.0, sign * TAU * j as f64 / q as f64)).collect();
    let mut buf = vec![Complex64::new(0.0, 0.0); q];
    let mut stride = 1;
    for _ in 0..n {
        let block = stride * q;
        for base in (0..v.len()).step_by(block) {
            for off in 0..stride {
                for (a, slot) in buf.iter_mut().enumerate() {
                    *slot = (0..q).map(|y| v[base + off + y * stride] * roots[(a * y) % q]).sum();
                }
                for (a, &val) in buf.iter().enumerate() {
                    v[base + off + a * stride] = val;
                }
            }
        }
        stride = block;
    }
}
