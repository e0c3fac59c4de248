//! Seeded pseudorandom samplers and exact oracles for their guarantees.

mod dist;
mod fields;
mod measure;
mod moduli;
mod parse;
mod sampler;
mod span;

use thiserror::Error;

pub use dist::{subsets, wht, OutputDist, MAX_OUTCOMES};
pub use fields::{Gf2m, Gfpm, FIELD_PRIMES};
pub use measure::{
    audit, audit_dist, bernoulli_product, conditioned_bias, conditioned_bias_of, measured_bias, poly_fooling_error, AuditReport,
    BiasReport, Measurement, Mode, EXACT_TOL, MAX_POLYNOMIALS,
};
pub use parse::parse_sampler;
pub use sampler::{
    almost_kwise_biased, complement, constant, custom, fk_layer, kwise_biased, kwise_hash, ones, permuted, power_residue_bits,
    small_bias_f2, small_bias_fp, sum_mod_p, uniform, uniform_fp, viola_bound, viola_sum, xor_combine, zeros, Guarantee, Kind,
    SampleMap, Sampler, MAX_ENUMERATION,
};
pub use span::{f2_echelon, f2_orthogonal, f2_rank, f2_span_for_each, fp_echelon, mod_pow, F2SpanMixture};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RandError {
    #[error("too large for exact computation: {what}")]
    TooLargeForExact { what: String },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no field table for F_{p}^{m}")]
    UnsupportedField { p: u64, m: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("conditioned event has probability zero")]
    EmptyConditionedSupport,
    #[error("cannot parse sampler spec: {0}")]
    Parse(String),
    #[error("samplers have different alphabets")]
    AlphabetMismatch,
}

/// Which noise-bit convention a power-residue sampler is read under.
///
/// `(p-1)/p` is what `y -> y^{p-1}` produces from uniform `y`; `1/p` is the
/// complementary reading, obtained by flipping every bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseConvention {
    OneMinusInverseP,
    InverseP,
}

impl NoiseConvention {
    pub fn one_prob(self, p: u64) -> f64 {
        match self {
            NoiseConvention::OneMinusInverseP => (p as f64 - 1.0) / p as f64,
            NoiseConvention::InverseP => 1.0 / p as f64,
        }
    }

    /// Applies the convention to a power-residue sampler.
    pub fn apply(self, bits: Sampler) -> Sampler {
        match self {
            NoiseConvention::OneMinusInverseP => bits,
            NoiseConvention::InverseP => complement(bits),
        }
    }
}
