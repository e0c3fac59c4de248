//! Arithmetic in F_{2^m} and F_{p^m} with fixed moduli.

use super::moduli::{F2_MODULI, ODD_MODULI};

/// F_{2^m}, elements packed as `m`-bit integers in the polynomial basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2m {
    m: u32,
    low: u64,
    mask: u64,
}

impl Gf2m {
    /// `1 <= m <= 63`.
    pub fn new(m: u32) -> Option<Self> {
        if !(1..=63).contains(&m) {
            return None;
        }
        Some(Gf2m { m, low: F2_MODULI[m as usize - 1], mask: (1u64 << m) - 1 })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn size(&self) -> u64 {
        1u64 << self.m
    }

    /// Low coefficients of the modulus.
    pub fn modulus_low(&self) -> u64 {
        self.low
    }

    #[inline]
    fn xtime(&self, a: u64) -> u64 {
        let carry = (a >> (self.m - 1)) & 1;
        let a = (a << 1) & self.mask;
        if carry == 1 {
            a ^ self.low
        } else {
            a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, mut b: u64) -> u64 {
        let mut r = 0;
        let mut a = a;
        while b != 0 {
            if b & 1 == 1 {
                r ^= a;
            }
            b >>= 1;
            a = self.xtime(a);
        }
        r
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `c_0 + c_1 x + ... ` by Horner, coefficients low first.
    pub fn eval_poly(&self, coeffs: &[u64], x: u64) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}

/// F_{p^m} for the odd primes with shipped moduli, elements packed as
/// base-p integers `sum c_j p^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gfpm {
    p: u64,
    m: usize,
    /// low coefficients of the monic modulus, length m
    modulus: Vec<u64>,
}

/// Odd primes with shipped field tables.
pub const FIELD_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

impl Gfpm {
    pub fn new(p: u64, m: usize) -> Option<Self> {
        let (_, rows) = ODD_MODULI.iter().find(|(q, _)| *q == p)?;
        let terms = rows.get(m.checked_sub(1)?)?;
        let mut modulus = vec![0; m];
        for &(i, c) in terms.iter() {
            modulus[i] = c;
        }
        Some(Gfpm { p, m, modulus })
    }

    /// Largest degree shipped for `p`.
    pub fn max_degree(p: u64) -> Option<usize> {
        ODD_MODULI.iter().find(|(q, _)| *q == p).map(|(_, rows)| rows.len())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn size(&self) -> u64 {
        self.p.pow(self.m as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn unpack(&self, mut x: u64) -> Vec<u64> {
        (0..self.m)
            .map(|_| {
                let c = x % self.p;
                x /= self.p;
                c
            })
            .collect()
    }

    pub fn pack(&self, c: &[u64]) -> u64 {
        c.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    /// Product of coefficient vectors (each of length m).
    pub fn mul_vec(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (p, m) = (self.p, self.m);
        let mut prod = vec![0u64; 2 * m];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        // x^m = -modulus
        for d in (m..2 * m).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &mj) in self.modulus.iter().enumerate() {
                prod[d - m + j] = (prod[d - m + j] + (p - mj % p) * c) % p;
            }
        }
        prod.truncate(m);
        prod
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.pack(&self.mul_vec(&self.unpack(a), &self.unpack(b)))
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (x, y) = (self.unpack(a), self.unpack(b));
        self.pack(&x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect::<Vec<_>>())
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Smallest `m >= 1` with `base^m >= target`.
pub(crate) fn ceil_log(base: u64, target: f64) -> u32 {
    let mut m = 1;
    while (base as f64).powi(m as i32) < target {
        m += 1;
    }
    m
}
