//! The p-group generator: a small-bias sample XOR a pseudorandom noise vector.
//!
//! The noise vector is `y -> y^{p-1}` applied to a sum of small-bias samples
//! over F_p, which fools polynomials of degree `d (p-1)` where `d` is the
//! degree of the group's word map. A small-bias sample plus true noise fools
//! programs, and averaging over the small-bias part leaves a low-degree
//! polynomial in the noise.

use super::{check_eps, calibrated_entry, Param, PrgError, PrgSpec, Provenance, Target};
use crate::group::{classify_p_group, FiniteGroup};
use crate::poly::Compiler;
use crate::randomness::{power_residue_bits, small_bias_f2, viola_sum, xor_combine, zeros, NoiseConvention};

/// Word maps are built at this length to read off the degree; it is the same
/// for every length from 4 on for all catalog p-groups.
const DEGREE_REFERENCE_LENGTH: usize = 8;

/// Degree of the group's generic word map, a constant of the group.
pub fn stable_degree(g: &FiniteGroup) -> Result<usize, PrgError> {
    Ok(Compiler::new(g)?.word_degree(DEGREE_REFERENCE_LENGTH)?)
}

/// Constants of the p-group generator. The small-bias part is
/// `eps^c_bias`-biased; each of the noise part's copies is `eps^c_noise`-biased.
#[derive(Clone, Debug, PartialEq)]
pub struct PGroupParams {
    pub c_bias: f64,
    pub c_noise: f64,
    /// Ablation switch: without noise the output is the small-bias part alone.
    pub noise: bool,
    pub convention: NoiseConvention,
    pub provenance: Provenance,
}

impl PGroupParams {
    pub fn with_exponents(c_bias: f64, c_noise: f64, provenance: Provenance) -> Self {
        PGroupParams { c_bias, c_noise, noise: true, convention: NoiseConvention::OneMinusInverseP, provenance }
    }

    /// Per-copy noise bias chosen so the declared sum bound `16 e^{1/2^{d-1}}`
    /// is at most `eps/2`; the small-bias part gets the same exponent.
    pub fn paper(g: &FiniteGroup, eps: f64) -> Result<Self, PrgError> {
        check_eps(eps)?;
        let (p, _) = classify_p_group(g).ok_or(PrgError::NotAPGroup { order: g.order() })?;
        let d = stable_degree(g)? * (p - 1);
        let per_copy_log = (eps / 32.0).ln() * (1u64 << (d - 1)) as f64;
        let c = per_copy_log / eps.ln();
        Ok(Self::with_exponents(c, c, Provenance::PaperAsymptotic))
    }

    /// The shipped calibration for this group.
    pub fn calibrated(g: &FiniteGroup) -> Result<Self, PrgError> {
        let e = calibrated_entry("pgroup", g.name()).ok_or_else(|| PrgError::Uncalibrated(format!("pgroup over {}", g.name())))?;
        Ok(Self::with_exponents(e.value("c_bias")?, e.value("c_noise")?, Provenance::Calibrated))
    }
}

/// Number of spill coordinates the spill-tolerant variants are built for.
pub fn spill_budget(eps: f64) -> usize {
    (3.0 * (1.0 / eps).log2()).ceil() as usize
}

/// `X xor X'` with `X` small-bias over F_2 and `X'` the powered F_p sum.
pub fn prg_p_group(g: &FiniteGroup, n: usize, eps: f64, params: &PGroupParams) -> Result<PrgSpec, PrgError> {
    build(g, n, eps, 0, params)
}

/// The p-group generator with every copy's bias divided by `2^{q+1}`, so that
/// conditioning on `q` spill coordinates keeps each copy small-bias.
pub fn prg_spill_pgroup(g: &FiniteGroup, n: usize, eps: f64, q: usize, params: &PGroupParams) -> Result<PrgSpec, PrgError> {
    build(g, n, eps, q, params)
}

fn build(g: &FiniteGroup, n: usize, eps: f64, q: usize, params: &PGroupParams) -> Result<PrgSpec, PrgError> {
    check_eps(eps)?;
    let (p, _) = classify_p_group(g).ok_or(PrgError::NotAPGroup { order: g.order() })?;
    if q > 60 {
        return Err(PrgError::Precondition(format!("spill size {q} too large")));
    }
    let degree = stable_degree(g)?;
    let d = degree * (p - 1);
    let tighten = if q == 0 { 1.0 } else { (1u64 << (q + 1)) as f64 };
    let bias_x = eps.powf(params.c_bias) / tighten;
    let bias_noise = eps.powf(params.c_noise) / tighten;
    let x = small_bias_f2(n, bias_x)?;
    let noise = if params.noise {
        params.convention.apply(power_residue_bits(viola_sum(n, p as u64, d, bias_noise)?))
    } else {
        zeros(n)
    };
    let sampler = xor_combine(vec![x.clone(), noise.clone()])?;
    let prov = params.provenance;
    let convention = match params.convention {
        NoiseConvention::OneMinusInverseP => 0.0,
        NoiseConvention::InverseP => 1.0,
    };
    let ps = vec![
        Param::new("c_bias", params.c_bias, prov),
        Param::new("c_noise", params.c_noise, prov),
        Param::new("noise", params.noise as u8 as f64, if params.noise { Provenance::Derived } else { Provenance::Override }),
        Param::new("noise_convention", convention, Provenance::Override),
        Param::new("p", p as f64, Provenance::Derived),
        Param::new("word_degree", degree as f64, Provenance::Derived),
        Param::new("noise_degree", d as f64, Provenance::Derived),
        Param::new("tighten", tighten, Provenance::Derived),
        Param::new("bias_x", bias_x, Provenance::Derived),
        Param::new("bias_noise_copy", bias_noise, Provenance::Derived),
    ];
    let target = Target { group: g.name().to_string(), n, ell: n, w: 1, q, any_order: true };
    let construction = if q == 0 { "pgroup" } else { "pgroup-spill" };
    Ok(PrgSpec::assemble(construction, target, eps, ps, &[("small_bias", &x), ("noise", &noise)], sampler))
}
