//! Width reduction: the small-bias-plus-pseudorandom-noise layer, the
//! long-product generator, one iteration, and the iterated schedule.

use serde::{Deserialize, Serialize};

use super::pgroup::spill_budget;
use super::{calibrated_entry, check_eps, log2_inv, prg_spill_pgroup, Component, PGroupParams, Param, PrgError, PrgSpec, Provenance, Stage, Target};
use crate::group::{classify_p_group, FiniteGroup};
use crate::randomness::{self, almost_kwise_biased, kwise_hash, xor_combine, zeros, RandError, Sampler};
use crate::rep::{irrep_catalog, is_mixing};

/// `D xor (T and base)`, seeds concatenated as base, D, T.
pub fn fk_layer(base: Sampler, d: Sampler, t: Sampler) -> Result<Sampler, PrgError> {
    randomness::fk_layer(base, d, t).map_err(|e| match e {
        RandError::LengthMismatch { expected, got } => PrgError::LengthMismatch { expected, got },
        other => PrgError::Rand(other),
    })
}

/// Almost k-wise independent bits with `Pr[1] = 2^-b`; `k` is capped at
/// `n`, where k-wise and n-wise independence coincide.
fn biased_bits(n: usize, b: usize, k: usize, delta: f64) -> Result<Sampler, PrgError> {
    Ok(almost_kwise_biased(n, b, k.clamp(1, n.max(1)), delta)?)
}

/// Constants of the long-product layer `D xor (T and P1)`:
/// `k = C (log(1/eps) + w)`, `delta = theta^k`, `Pr[T_i = 1] = 2^-b` with
/// `b = ceil(a w + 3 log(1/theta))`, i.e. `p = 2^{-a w} theta^3` rounded down
/// to a power of two. Explicit `k`, `delta` or `b` replace the derived values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LongProductParams {
    pub c: f64,
    pub a: f64,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub b: Option<usize>,
    /// Ablation: T is all zeros, leaving D alone.
    pub t_zero: bool,
    pub provenance: Provenance,
}

impl LongProductParams {
    /// `a = 23`; `C = 300` is the smallest value for which the
    /// tail-bound exponent `C (log(1/eps) + w) / (300 w)` is at least one.
    pub fn paper() -> Self {
        LongProductParams { c: 300.0, a: 23.0, k: None, delta: None, b: None, t_zero: false, provenance: Provenance::PaperAsymptotic }
    }

    /// The shipped calibration of `C` and `a` for this group.
    pub fn calibrated(g: &FiniteGroup) -> Result<Self, PrgError> {
        let e = calibrated_entry("long-products", g.name())
            .ok_or_else(|| PrgError::Uncalibrated(format!("long-products over {}", g.name())))?;
        Ok(Self::scaled(e.value("c")?, e.value("a")?, Provenance::Calibrated))
    }

    /// Same shapes with the exponent of `2^{-a w}` scaled down to `a`.
    pub fn scaled(c: f64, a: f64, provenance: Provenance) -> Self {
        LongProductParams { c, a, k: None, delta: None, b: None, t_zero: false, provenance }
    }

    pub fn k(&self, w: usize, eps: f64) -> usize {
        self.k.unwrap_or_else(|| (self.c * (log2_inv(eps) + w as f64)).ceil().max(1.0) as usize)
    }

    pub fn delta(&self, theta: f64, w: usize, eps: f64) -> f64 {
        self.delta.unwrap_or_else(|| theta.powi(self.k(w, eps) as i32))
    }

    pub fn b(&self, theta: f64, w: usize) -> usize {
        self.b.unwrap_or_else(|| (self.a * w as f64 + 3.0 * (1.0 / theta).log2()).ceil().max(1.0) as usize)
    }

    fn record(&self, theta: f64, w: usize, eps: f64, n: usize, prefix: &str) -> Vec<Param> {
        let prov = |explicit: bool| if explicit { Provenance::Override } else { Provenance::Derived };
        vec![
            Param::new(&format!("{prefix}c"), self.c, self.provenance),
            Param::new(&format!("{prefix}a"), self.a, self.provenance),
            Param::new(&format!("{prefix}k"), self.k(w, eps).min(n.max(1)) as f64, prov(self.k.is_some())),
            Param::new(&format!("{prefix}delta"), self.delta(theta, w, eps), prov(self.delta.is_some())),
            Param::new(&format!("{prefix}b"), self.b(theta, w) as f64, prov(self.b.is_some())),
            Param::new(&format!("{prefix}t_zero"), self.t_zero as u8 as f64, Provenance::Override),
        ]
    }
}

/// The restriction `(D, T)` of the long-product layer on `n` bits.
pub fn long_product_noise(n: usize, theta: f64, w: usize, eps: f64, params: &LongProductParams) -> Result<(Sampler, Sampler), PrgError> {
    let k = params.k(w, eps);
    let delta = params.delta(theta, w, eps);
    let d = biased_bits(n, 1, k, delta)?;
    let t = if params.t_zero { zeros(n) } else { biased_bits(n, params.b(theta, w), k, delta)? };
    Ok((d, t))
}

/// `D xor (T and P1)` with `D`, `T` almost k-wise independent.
pub fn prg_long_products(p1: &PrgSpec, theta: f64, w: usize, eps: f64, params: &LongProductParams) -> Result<PrgSpec, PrgError> {
    check_eps(eps)?;
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(PrgError::Precondition(format!("theta = {theta} must lie in (0, 1/2]")));
    }
    let n = p1.n();
    let (d, t) = long_product_noise(n, theta, w, eps, params)?;
    let sampler = fk_layer(p1.sampler().clone(), d.clone(), t.clone())?;
    let mut ps = params.record(theta, w, eps, n, "");
    ps.push(Param::new("theta", theta, Provenance::Derived));
    ps.push(Param::new("w", w as f64, Provenance::Override));
    let target = Target { w: 3 * w, q: 2 * spill_bits(eps), ..p1.target.clone() };
    let mut spec = PrgSpec::assemble("long-products", target, eps, ps, &[("d", &d), ("t", &t)], sampler);
    spec.components.extend(prefixed("p1_", &p1.components));
    Ok(spec)
}

fn spill_bits(eps: f64) -> usize {
    log2_inv(eps).ceil() as usize
}

fn prefixed(prefix: &str, cs: &[Component]) -> Vec<Component> {
    cs.iter().map(|c| Component { name: format!("{prefix}{}", c.name), ..c.clone() }).collect()
}

/// Constants of the short-product layer: `k = C (w + log(ell/eps))`,
/// `delta = (m w)^{-k}`, `Pr[T_i = 1] = 2^-b` with `b = ceil(C)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortParams {
    pub c: f64,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub b: Option<usize>,
    pub provenance: Provenance,
}

impl ShortParams {
    /// `C = 17`: the smallest integer with `33 w + 5 log m - 2 C w <= -w`
    /// for every `w >= log m`, as the short-product tail bound needs.
    pub fn paper() -> Self {
        ShortParams { c: 17.0, k: None, delta: None, b: None, provenance: Provenance::PaperAsymptotic }
    }

    pub fn with_c(c: f64, provenance: Provenance) -> Self {
        ShortParams { c, k: None, delta: None, b: None, provenance }
    }

    pub fn k(&self, w: usize, ell: usize, eps: f64) -> usize {
        self.k.unwrap_or_else(|| (self.c * (w as f64 + (ell.max(1) as f64 / eps).log2())).ceil().max(1.0) as usize)
    }

    pub fn delta(&self, m: usize, w: usize, ell: usize, eps: f64) -> f64 {
        self.delta.unwrap_or_else(|| ((m * w.max(1)) as f64).powf(-(self.k(w, ell, eps) as f64)))
    }

    pub fn b(&self) -> usize {
        self.b.unwrap_or_else(|| self.c.ceil().max(1.0) as usize)
    }
}

/// Inputs of one iteration besides the two generators.
#[derive(Clone, Debug, PartialEq)]
pub struct OneIterConfig {
    /// Number of blocks of the products handled.
    pub ell: usize,
    pub w: usize,
    pub eps: f64,
    pub theta: f64,
    pub short: ShortParams,
    pub long: LongProductParams,
}

/// `(D xor (T and P)) xor P_long`, where `P_long = D' xor (T' and P1)`.
pub fn one_iteration(p: &PrgSpec, p1: &PrgSpec, g: &FiniteGroup, cfg: &OneIterConfig) -> Result<PrgSpec, PrgError> {
    check_eps(cfg.eps)?;
    let m = g.order();
    if (cfg.w as f64) < (m as f64).log2() {
        return Err(PrgError::Precondition(format!("width {} is below log2 |G| = {:.2}", cfg.w, (m as f64).log2())));
    }
    if p.n() != p1.n() {
        return Err(PrgError::LengthMismatch { expected: p.n(), got: p1.n() });
    }
    let n = p.n();
    let k = cfg.short.k(cfg.w, cfg.ell, cfg.eps);
    let delta = cfg.short.delta(m, cfg.w, cfg.ell, cfg.eps);
    let d = biased_bits(n, 1, k, delta)?;
    let t = biased_bits(n, cfg.short.b(), k, delta)?;
    let short = fk_layer(p.sampler().clone(), d.clone(), t.clone())?;
    let long = prg_long_products(p1, cfg.theta, cfg.w, cfg.eps, &cfg.long)?;
    let sampler = xor_combine(vec![short, long.sampler().clone()])?;
    let mut ps = vec![
        Param::new("short_c", cfg.short.c, cfg.short.provenance),
        Param::new("short_k", k.min(n.max(1)) as f64, if cfg.short.k.is_some() { Provenance::Override } else { Provenance::Derived }),
        Param::new("short_delta", delta, if cfg.short.delta.is_some() { Provenance::Override } else { Provenance::Derived }),
        Param::new("short_b", cfg.short.b() as f64, if cfg.short.b.is_some() { Provenance::Override } else { Provenance::Derived }),
        Param::new("w", cfg.w as f64, Provenance::Override),
    ];
    ps.extend(long.params.iter().map(|x| Param { name: format!("long_{}", x.name), ..x.clone() }));
    let target = Target { group: g.name().to_string(), n, ell: cfg.ell, w: 3 * cfg.w, q: 2 * spill_bits(cfg.eps), any_order: false };
    let mut spec = PrgSpec::assemble("one-iter", target, cfg.eps, ps, &[("d_short", &d), ("t_short", &t)], sampler);
    spec.components.extend(prefixed("p_", &p.components));
    spec.components.extend(prefixed("long_", &long.components));
    Ok(spec)
}

/// The iteration schedule, computed from the group order, the product shape and eps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// `max(w, ceil log2 ell, ceil log2 m)`.
    pub w_prime: usize,
    /// `ceil(log2 log2(1/eps) + log2 m)`: iterations stop at this width.
    pub w_star: usize,
    /// `ceil((log(1/eps) + log m) / (log log(1/eps) + log m))`, at least 2.
    pub b: usize,
    pub t1: usize,
    /// Grouping phases actually scheduled.
    pub r: usize,
    /// `ceil(log_b((m log(1/eps))^C))` with the configured `C`.
    pub r_closed_form: usize,
    /// Width iterations needed to bring `b w_star` back to `w_star`.
    pub t2: usize,
    /// Independence of the terminal layer, `ceil(c_term log2(m/eps))`.
    pub k_term: usize,
    pub stages: Vec<Stage>,
}

impl Schedule {
    /// Number of width iterations.
    pub fn iterations(&self) -> usize {
        self.stages.iter().filter(|s| s.phase == "width").count()
    }
}

/// Width after one iteration on width `w`: three parts of `ceil(w/3)` become two.
fn width_step(w: usize) -> usize {
    (2 * w.div_ceil(3)).min(w - 1).max(1)
}

fn steps_down(mut w: usize, target: usize) -> usize {
    let mut t = 0;
    while w > target {
        w = width_step(w);
        t += 1;
    }
    t
}

/// Everything that fixes the reduction besides the group and the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionParams {
    pub short: ShortParams,
    pub long: LongProductParams,
    /// The `C` in the grouping count `log_b((m log(1/eps))^C)`.
    pub c_group: f64,
    /// Terminal layer: `ceil(c_term log2(m/eps))`-wise, `delta_term`-close (default eps).
    pub c_term: f64,
    pub delta_term: Option<f64>,
    /// Independence of the bounded-independence spill generator used for commutative groups.
    pub backend_k: usize,
    /// Exponents for the spill-tolerant p-group generator used for Dedekind 2-groups.
    pub pgroup_c_bias: f64,
    pub pgroup_c_noise: f64,
}

impl ReductionParams {
    pub fn paper() -> Self {
        ReductionParams {
            short: ShortParams::paper(),
            long: LongProductParams::paper(),
            c_group: 1.0,
            c_term: 2.0,
            delta_term: None,
            backend_k: 16,
            pgroup_c_bias: 2.0,
            pgroup_c_noise: 2.0,
        }
    }

    /// Small constants under which every layer's exact distribution is
    /// computable at n <= 16: short and long noise with `Pr[T_i = 1] = 1/2`,
    /// 4-wise independence with closeness `2^-10`.
    pub fn desk() -> Self {
        let short = ShortParams { c: 1.0, k: Some(4), delta: Some(1.0 / 1024.0), b: Some(1), provenance: Provenance::Override };
        let long = LongProductParams {
            c: 1.0,
            a: 0.5,
            k: Some(4),
            delta: Some(1.0 / 1024.0),
            b: Some(1),
            t_zero: false,
            provenance: Provenance::Override,
        };
        ReductionParams {
            short,
            long,
            c_group: 1.0,
            c_term: 1.0,
            delta_term: Some(1.0 / 1024.0),
            backend_k: 4,
            pgroup_c_bias: 0.5,
            pgroup_c_noise: 0.5,
        }
    }

    pub fn to_params(&self) -> Vec<Param> {
        let ov = Provenance::Override;
        let mut ps = vec![
            Param::new("short_c", self.short.c, self.short.provenance),
            Param::new("long_c", self.long.c, self.long.provenance),
            Param::new("long_a", self.long.a, self.long.provenance),
            Param::new("long_t_zero", self.long.t_zero as u8 as f64, ov),
            Param::new("c_group", self.c_group, ov),
            Param::new("c_term", self.c_term, ov),
            Param::new("backend_k", self.backend_k as f64, ov),
            Param::new("pgroup_c_bias", self.pgroup_c_bias, ov),
            Param::new("pgroup_c_noise", self.pgroup_c_noise, ov),
        ];
        let optional = [
            ("short_k", self.short.k.map(|v| v as f64)),
            ("short_delta", self.short.delta),
            ("short_b", self.short.b.map(|v| v as f64)),
            ("long_k", self.long.k.map(|v| v as f64)),
            ("long_delta", self.long.delta),
            ("long_b", self.long.b.map(|v| v as f64)),
            ("delta_term", self.delta_term),
        ];
        ps.extend(optional.iter().filter_map(|(name, v)| v.map(|v| Param::new(name, v, ov))));
        ps
    }

    /// Inverse of `to_params`; optional values absent from the list are unset.
    pub fn from_params(ps: &[Param]) -> Result<Self, PrgError> {
        let get = |name: &str| -> Result<Option<f64>, PrgError> {
            Ok(ps.iter().find(|p| p.name == name).map(|p| p.value))
        };
        let req = |name: &str| get(name)?.ok_or_else(|| PrgError::Parse(format!("missing parameter {name}")));
        let prov = |name: &str| ps.iter().find(|p| p.name == name).map(|p| p.provenance).unwrap_or(Provenance::Override);
        Ok(ReductionParams {
            short: ShortParams {
                c: req("short_c")?,
                k: get("short_k")?.map(|v| v as usize),
                delta: get("short_delta")?,
                b: get("short_b")?.map(|v| v as usize),
                provenance: prov("short_c"),
            },
            long: LongProductParams {
                c: req("long_c")?,
                a: req("long_a")?,
                k: get("long_k")?.map(|v| v as usize),
                delta: get("long_delta")?,
                b: get("long_b")?.map(|v| v as usize),
                t_zero: req("long_t_zero")? != 0.0,
                provenance: prov("long_c"),
            },
            c_group: req("c_group")?,
            c_term: req("c_term")?,
            delta_term: get("delta_term")?,
            backend_k: req("backend_k")? as usize,
            pgroup_c_bias: req("pgroup_c_bias")?,
            pgroup_c_noise: req("pgroup_c_noise")?,
        })
    }
}

/// The stage list for products of `ell` blocks of width `w` over a group of order `m`.
///
/// Width iterations run from `w'` down to `w*`. While more blocks remain
/// than the terminal layer can handle (`k_term / width` blocks), blocks are
/// grouped `b` at a time and the widened product is iterated down again.
pub fn reduction_schedule(m: usize, ell: usize, w: usize, eps: f64, params: &ReductionParams) -> Result<Schedule, PrgError> {
    check_eps(eps)?;
    let l1 = log2_inv(eps);
    let lm = (m.max(2) as f64).log2();
    let ceil_log = |x: usize| (x.max(1) as f64).log2().ceil() as usize;
    let w_star = (l1.log2().max(0.0) + lm).ceil().max(1.0) as usize;
    let w_prime = w.max(ceil_log(ell)).max(lm.ceil() as usize).max(1);
    let b = (((l1 + lm) / (l1.log2().max(0.0) + lm)).ceil() as usize).max(2);
    let k_term = (params.c_term * (m as f64 / eps).log2()).ceil().max(1.0) as usize;
    let r_closed_form = ((params.c_group * (m as f64 * l1).log2()) / (b as f64).log2()).ceil().max(0.0) as usize;
    let t2 = steps_down(b * w_star, w_star);

    let mut stages = Vec::new();
    let (mut width, mut blocks) = (w_prime, ell.max(1));
    let iterate_down = |width: &mut usize, blocks: usize, stages: &mut Vec<Stage>| {
        while *width > w_star {
            let next = width_step(*width);
            let it_w = width.div_ceil(3).max(lm.ceil() as usize);
            stages.push(Stage {
                index: stages.len(),
                phase: "width".into(),
                width_in: *width,
                width_out: next,
                blocks_in: blocks,
                blocks_out: blocks,
                params: vec![Param::new("w", it_w as f64, Provenance::Derived)],
            });
            *width = next;
        }
    };
    iterate_down(&mut width, blocks, &mut stages);
    let t1 = stages.len();
    let mut r = 0;
    while blocks > (k_term / width).max(1) {
        let grouped = blocks.div_ceil(b);
        stages.push(Stage {
            index: stages.len(),
            phase: "grouping".into(),
            width_in: width,
            width_out: width * b,
            blocks_in: blocks,
            blocks_out: grouped,
            params: vec![Param::new("b", b as f64, Provenance::Derived)],
        });
        blocks = grouped;
        width *= b;
        iterate_down(&mut width, blocks, &mut stages);
        r += 1;
    }
    stages.push(Stage {
        index: stages.len(),
        phase: "terminal".into(),
        width_in: width,
        width_out: 0,
        blocks_in: blocks,
        blocks_out: 0,
        params: vec![Param::new("k_term", k_term as f64, Provenance::Derived)],
    });
    Ok(Schedule { w_prime, w_star, b, t1, r, r_closed_form, t2, k_term, stages })
}

/// The generator for products over `g` of `ell` blocks of width `w`:
/// an almost k-wise terminal layer wrapped by one iteration per width stage.
///
/// The spill generator is a bounded-independence sampler for commutative
/// groups and the spill-tolerant p-group generator for Dedekind 2-groups.
pub fn iterate_reduction(g: &FiniteGroup, n: usize, ell: usize, w: usize, eps: f64, params: &ReductionParams) -> Result<PrgSpec, PrgError> {
    check_eps(eps)?;
    let verdict = is_mixing(&irrep_catalog(g)?)?;
    let two_group = matches!(classify_p_group(g), Some((2, _)));
    if !verdict.mixing || !(g.is_commutative() || two_group) {
        return Err(PrgError::UnsupportedGroup(g.name().to_string()));
    }
    let m = g.order();
    let schedule = reduction_schedule(m, ell, w, eps, params)?;
    let q = spill_budget(eps);
    let p1 = if g.is_commutative() {
        let s = kwise_hash(n, 1, params.backend_k.clamp(1, n.max(1)))?;
        let target = Target { group: g.name().to_string(), n, ell: n, w: 1, q, any_order: false };
        PrgSpec::assemble("kwise-backend", target, eps, vec![], &[("kwise", &s)], s.clone())
    } else {
        let pp = PGroupParams::with_exponents(params.pgroup_c_bias, params.pgroup_c_noise, Provenance::Override);
        prg_spill_pgroup(g, n, eps, q, &pp)?
    };

    let k_term = schedule.k_term.min(n.max(1));
    let terminal = biased_bits(n, 1, k_term, params.delta_term.unwrap_or(eps))?;
    let target = Target { group: g.name().to_string(), n, ell, w, q: 0, any_order: false };
    let mut spec = PrgSpec::assemble("terminal", target.clone(), eps, vec![], &[("terminal", &terminal)], terminal.clone());
    let width_stages: Vec<&Stage> = schedule.stages.iter().filter(|s| s.phase == "width").collect();
    for (i, st) in width_stages.iter().enumerate().rev() {
        let cfg = OneIterConfig {
            ell: st.blocks_in,
            w: st.params[0].value as usize,
            eps,
            theta: verdict.theta,
            short: params.short.clone(),
            long: params.long.clone(),
        };
        let next = one_iteration(&spec, &p1, g, &cfg)?;
        let mut components: Vec<Component> =
            next.components.iter().filter(|c| !c.name.starts_with("p_")).map(|c| Component { name: format!("stage{i}_{}", c.name), ..c.clone() }).collect();
        components.extend(spec.components);
        spec = PrgSpec { components, ..next };
    }
    let mut ps = params.to_params();
    ps.push(Param::new("theta", verdict.theta, Provenance::Derived));
    ps.push(Param::new("k_term", k_term as f64, Provenance::Derived));
    ps.push(Param::new("iterations", width_stages.len() as f64, Provenance::Derived));
    Ok(PrgSpec {
        construction: "reduction".into(),
        target,
        eps,
        params: ps,
        components: spec.components,
        stages: schedule.stages,
        sampler: spec.sampler,
    })
}
