//! The hash-matrix generator for mixing groups.
//!
//! For each guess `i < L = ceil(log2 n)` of the number of non-identity
//! factors, coordinate `j` is selected with probability `2^-i` and then
//! reads bit `M[i][h(j)]` of a uniform matrix. All selections come from one
//! hash `H: [n] -> {0,1}^L`: `j` is selected at level `i` when the first `i`
//! bits of `H(j)` are zero. The output XORs the `L` levels.

use std::sync::Arc;

use super::{calibrated_entry, check_eps, log2_inv, Param, PrgError, PrgSpec, Provenance, Target};
use crate::group::FiniteGroup;
use crate::randomness::{
    almost_kwise_biased, custom, kwise_hash, uniform, wht, xor_combine, Guarantee, OutputDist, RandError, SampleMap, Sampler,
};
use crate::rep::{irrep_catalog, is_mixing};

/// Exact distributions are computed up to this many output bits.
const EXACT_MAX_N: usize = 22;

#[derive(Debug)]
pub struct HashMatrix {
    n: usize,
    rows: usize,
    cols: usize,
    select: Sampler,
    column: Sampler,
    matrix: Sampler,
}

impl HashMatrix {
    /// `ell` is the guessed subset size: the matrix has `ceil(log2 n)` rows
    /// and `10 ell` columns rounded up to a power of two, `H` is
    /// `10 ell`-wise and `h` is `5 ell`-wise independent.
    pub fn new(n: usize, ell: usize) -> Result<Self, RandError> {
        let rows = (n.max(2) as f64).log2().ceil() as usize;
        let cols = (10 * ell.max(1)).next_power_of_two();
        let col_bits = cols.trailing_zeros() as usize;
        // k-wise independence on n points is full independence once k >= n
        let select = kwise_hash(n, rows, (10 * ell).clamp(1, n.max(1)))?;
        let column = kwise_hash(n, col_bits, (5 * ell).clamp(1, n.max(1)))?;
        Ok(HashMatrix { n, rows, cols, select, column, matrix: uniform(rows * cols) })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn parts(&self) -> [(&'static str, &Sampler); 3] {
        [("select_hash", &self.select), ("column_hash", &self.column), ("matrix", &self.matrix)]
    }

    /// Deepest level that selects `j`, given the bits of `H(j)`.
    fn level(&self, hbits: &[u8]) -> usize {
        hbits[..self.rows - 1].iter().take_while(|&&b| b == 0).count()
    }

    fn fully_independent(&self) -> bool {
        let k = |s: &Sampler| match s.guarantee() {
            Guarantee::KWise { k, .. } => *k,
            _ => 0,
        };
        k(&self.select) >= self.n && k(&self.column) >= self.n
    }
}

impl SampleMap for HashMatrix {
    fn n(&self) -> usize {
        self.n
    }

    fn shape(&self) -> Vec<u64> {
        [&self.select, &self.column, &self.matrix].iter().flat_map(|s| s.shape().to_vec()).collect()
    }

    fn sample(&self, seed: &[u64]) -> Vec<u8> {
        let (a, rest) = seed.split_at(self.select.shape().len());
        let (b, c) = rest.split_at(self.column.shape().len());
        let hs = self.select.sample(a);
        let hc = self.column.sample(b);
        let m = self.matrix.sample(c);
        let col_bits = self.cols.trailing_zeros() as usize;
        (0..self.n)
            .map(|j| {
                let z = self.level(&hs[j * self.rows..(j + 1) * self.rows]);
                let c = (0..col_bits).fold(0usize, |acc, u| acc | (hc[j * col_bits + u] as usize) << u);
                (0..=z).fold(0u8, |acc, i| acc ^ m[i * self.cols + c])
            })
            .collect()
    }

    /// With fully independent hashes, coordinates sharing a (level, column)
    /// label get the same uniform bit and distinct labels get independent
    /// bits (prefix sums of a column are independent). So the bias of a
    /// parity on `k` coordinates is the probability that every label occurs
    /// an even number of times among `k` i.i.d. labels:
    /// `k! [t^k] prod_labels cosh(pi_label t)`.
    fn exact_dist(&self) -> Option<Result<OutputDist, RandError>> {
        if !self.fully_independent() || self.n > EXACT_MAX_N {
            return None;
        }
        let n = self.n;
        let level_prob = |z: usize| if z + 1 < self.rows { 0.5f64.powi(z as i32 + 1) } else { 0.5f64.powi(self.rows as i32 - 1) };
        let mut series = vec![0.0; n + 1];
        series[0] = 1.0;
        for z in 0..self.rows {
            let a = level_prob(z) / self.cols as f64;
            let mut cosh = vec![0.0; n + 1];
            let mut term = 1.0;
            for j in 0..=n {
                if j % 2 == 0 {
                    cosh[j] = term;
                }
                term *= a / (j + 1) as f64;
            }
            for _ in 0..self.cols {
                series = truncated_product(&series, &cosh);
            }
        }
        let mut fact = 1.0;
        let even: Vec<f64> = (0..=n)
            .map(|k| {
                if k > 0 {
                    fact *= k as f64;
                }
                series[k] * fact
            })
            .collect();
        let mut v: Vec<f64> = (0..1usize << n).map(|s| even[s.count_ones() as usize]).collect();
        wht(&mut v);
        let scale = 1.0 / (1u64 << n) as f64;
        Some(Ok(OutputDist::from_probs(n, 2, v.into_iter().map(|x| (x * scale).max(0.0)).collect())))
    }

    fn describe(&self) -> String {
        format!("hashmatrix(n={},rows={},cols={},{},{})", self.n, self.rows, self.cols, self.select, self.column)
    }
}

fn truncated_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(a.len() - i) {
            out[i + j] += x * y;
        }
    }
    out
}

/// Constants of the hash-matrix generator: subsets of size
/// `ceil(kappa log2(1/eps))`, and an optional almost
/// `ceil(2 kappa log2(1/eps))`-wise uniform layer with closeness `delta_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingParams {
    pub kappa: f64,
    pub a_layer: bool,
    /// Defaults to `eps`.
    pub delta_a: Option<f64>,
    pub provenance: Provenance,
}

impl MixingParams {
    pub fn with_kappa(kappa: f64, provenance: Provenance) -> Self {
        MixingParams { kappa, a_layer: true, delta_a: None, provenance }
    }

    /// `kappa = 80 ln 2 / theta^2`: a tenth of the `kappa log(1/eps)`
    /// selected coordinates each shrink the bias by `1 - theta^2/8`.
    pub fn paper(g: &FiniteGroup) -> Result<Self, PrgError> {
        let verdict = is_mixing(&irrep_catalog(g)?)?;
        if !verdict.mixing {
            return Err(PrgError::NotMixing(g.name().to_string()));
        }
        Ok(Self::with_kappa(80.0 * std::f64::consts::LN_2 / (verdict.theta * verdict.theta), Provenance::PaperAsymptotic))
    }

    pub fn calibrated(g: &FiniteGroup) -> Result<Self, PrgError> {
        let e = calibrated_entry("mixing", g.name()).ok_or_else(|| PrgError::Uncalibrated(format!("mixing over {}", g.name())))?;
        Ok(Self::with_kappa(e.value("kappa")?, Provenance::Calibrated))
    }
}

pub fn prg_mixing(g: &FiniteGroup, n: usize, eps: f64, params: &MixingParams) -> Result<PrgSpec, PrgError> {
    check_eps(eps)?;
    let verdict = is_mixing(&irrep_catalog(g)?)?;
    if !verdict.mixing {
        return Err(PrgError::NotMixing(g.name().to_string()));
    }
    if params.kappa <= 0.0 {
        return Err(PrgError::Precondition("kappa must be positive".into()));
    }
    let ell = (params.kappa * log2_inv(eps)).ceil().max(1.0) as usize;
    let k_a = ((2.0 * params.kappa * log2_inv(eps)).ceil() as usize).clamp(1, n.max(1));
    let delta_a = params.delta_a.unwrap_or(eps);
    let hm = HashMatrix::new(n, ell)?;
    let (rows, cols) = (hm.rows(), hm.cols());
    let hm_parts: Vec<(&str, Sampler)> = hm.parts().iter().map(|(name, s)| (*name, (*s).clone())).collect();
    let core = custom(Arc::new(hm), Guarantee::Unspecified);
    let a = if params.a_layer { Some(almost_kwise_biased(n, 1, k_a, delta_a)?) } else { None };
    let sampler = match &a {
        Some(a) => xor_combine(vec![a.clone(), core])?,
        None => core,
    };
    let mut parts: Vec<(&str, &Sampler)> = Vec::new();
    if let Some(a) = &a {
        parts.push(("a_layer", a));
    }
    parts.extend(hm_parts.iter().map(|(name, s)| (*name, s)));
    let prov = params.provenance;
    let ps = vec![
        Param::new("kappa", params.kappa, prov),
        Param::new("a_layer", params.a_layer as u8 as f64, Provenance::Override),
        Param::new("delta_a", delta_a, if params.delta_a.is_some() { Provenance::Override } else { Provenance::Derived }),
        Param::new("theta", verdict.theta, Provenance::Derived),
        Param::new("subset_size", ell as f64, Provenance::Derived),
        Param::new("a_wise", k_a as f64, Provenance::Derived),
        Param::new("rows", rows as f64, Provenance::Derived),
        Param::new("cols", cols as f64, Provenance::Derived),
    ];
    let target = Target { group: g.name().to_string(), n, ell: n, w: 1, q: 0, any_order: true };
    Ok(PrgSpec::assemble("mixing", target, eps, ps, &parts, sampler))
}
