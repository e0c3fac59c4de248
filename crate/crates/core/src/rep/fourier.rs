//! Distributions over a group and their non-abelian Fourier coefficients.

use rand::Rng;
use serde::Serialize;

use super::{op_norm, CMatrix, Irrep, IrrepSet, RepError};
use crate::group::Elem;

/// Probability mass per element.
#[derive(Clone, Debug, PartialEq)]
pub struct GDistribution {
    probs: Vec<f64>,
}

pub const MASS_TOL: f64 = 1e-12;

impl GDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self, RepError> {
        let total: f64 = probs.iter().sum();
        if probs.is_empty() || probs.iter().any(|&p| !(p >= 0.0)) || (total - 1.0).abs() > MASS_TOL * probs.len().max(1) as f64 {
            return Err(RepError::NotADistribution { total });
        }
        Ok(GDistribution { probs })
    }

    pub fn uniform(order: usize) -> Self {
        GDistribution { probs: vec![1.0 / order as f64; order] }
    }

    pub fn point_mass(order: usize, g: Elem) -> Self {
        let mut probs = vec![0.0; order];
        probs[g] = 1.0;
        GDistribution { probs }
    }

    /// Normalised i.i.d. exponential weights: uniform on the simplex.
    pub fn random(order: usize, rng: &mut impl Rng) -> Self {
        let w: Vec<f64> = (0..order).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
        let s: f64 = w.iter().sum();
        GDistribution { probs: w.into_iter().map(|x| x / s).collect() }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn order(&self) -> usize {
        self.probs.len()
    }

    pub fn tv(&self, other: &GDistribution) -> f64 {
        0.5 * self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// `E[rho(Z)]`.
    pub fn expectation(&self, rho: &Irrep) -> CMatrix {
        let mut acc = CMatrix::zeros(rho.dim);
        for (g, &p) in self.probs.iter().enumerate() {
            if p != 0.0 {
                acc = acc.add(&rho.images[g].scale_re(p));
            }
        }
        acc
    }
}

/// `sum_g Z(g) conj(rho(g))`.
pub fn fourier_coefficient(z: &GDistribution, rho: &Irrep) -> CMatrix {
    z.expectation(rho).conj()
}

/// `| sum_g Z(g)^2 - (1/|G|) sum_rho d_rho ||Z^(rho)||_F^2 |`.
pub fn parseval_residual(z: &GDistribution, set: &IrrepSet) -> f64 {
    let lhs: f64 = z.probs.iter().map(|p| p * p).sum();
    let rhs: f64 = set
        .irreps
        .iter()
        .map(|rho| rho.dim as f64 * fourier_coefficient(z, rho).frobenius_sq())
        .sum::<f64>()
        / z.order() as f64;
    (lhs - rhs).abs()
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct Closeness {
    pub tv: f64,
    pub max_gap: f64,
    /// `sqrt(|G|) * max_gap`
    pub bound: f64,
}

/// Total variation against the Fourier bound `sqrt(|G|) max_rho ||X^ - Y^||_op`.
pub fn closeness_bound(x: &GDistribution, y: &GDistribution, set: &IrrepSet) -> Result<Closeness, RepError> {
    let mut max_gap: f64 = 0.0;
    for rho in &set.irreps {
        let gap = fourier_coefficient(x, rho).sub(&fourier_coefficient(y, rho));
        max_gap = max_gap.max(op_norm(&gap)?);
    }
    Ok(Closeness { tv: x.tv(y), max_gap, bound: (x.order() as f64).sqrt() * max_gap })
}

