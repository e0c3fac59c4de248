//! Generator constructions assembled from the primitive samplers.
//!
//! Every construction returns a [`PrgSpec`]: the composed sampler together
//! with the target class, every constant it used (tagged with where the value
//! came from) and the seed length of each component.

mod calibrated;
mod commutative;
mod mixing;
mod pgroup;
mod reduction;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::GroupError;
use crate::models::ModelError;
use crate::poly::PolyError;
use crate::randomness::{RandError, Sampler};
use crate::rep::RepError;

pub use calibrated::{calibrated_entry, calibrated_table, CalibratedEntry, CalibratedTable, CALIBRATION_SCHEMA};
pub use commutative::{
    character_exponents, fool_commutative_spill, linear_form_reduction, CharacterError, CommutativeReport, ConstantBackend, KWiseBackend,
    LinearForm, LinearFormFooler, UniformBackend,
};
pub use mixing::{prg_mixing, HashMatrix, MixingParams};
pub use pgroup::{prg_p_group, prg_spill_pgroup, spill_budget, stable_degree, PGroupParams};
pub use reduction::{
    fk_layer, iterate_reduction, long_product_noise, one_iteration, prg_long_products, reduction_schedule, LongProductParams, OneIterConfig,
    ReductionParams, Schedule, ShortParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrgError {
    #[error("group of order {order} is not a p-group")]
    NotAPGroup { order: usize },
    #[error("group {0} is not mixing")]
    NotMixing(String),
    #[error("group {0} is not commutative")]
    NotCommutative(String),
    #[error("no reduction is available for group {0}")]
    UnsupportedGroup(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no calibrated constants for {0}")]
    Uncalibrated(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Rand(#[from] RandError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid spec file: {0}")]
    Parse(String),
}

/// Where a constant's value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// The asymptotic setting the proofs use, with unspecified constants filled in as documented.
    PaperAsymptotic,
    /// Found by the harness's binary search on a frozen corpus.
    Calibrated,
    /// Set explicitly by the caller.
    Override,
    /// Computed from other parameters.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: f64,
    pub provenance: Provenance,
}

impl Param {
    pub fn new(name: &str, value: f64, provenance: Provenance) -> Self {
        Param { name: name.to_string(), value, provenance }
    }
}

/// The class of functions a generator is meant to fool.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub group: String,
    pub n: usize,
    /// Number of blocks.
    pub ell: usize,
    /// Block width.
    pub w: usize,
    /// Spill size.
    pub q: usize,
    pub any_order: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub name: String,
    pub sampler: String,
    pub seed_len: u32,
}

/// One entry of an iteration schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub index: usize,
    /// "width", "grouping" or "terminal".
    pub phase: String,
    /// Block width before and after this stage.
    pub width_in: usize,
    pub width_out: usize,
    /// Number of blocks before and after this stage.
    pub blocks_in: usize,
    pub blocks_out: usize,
    pub params: Vec<Param>,
}

#[derive(Clone, Debug)]
pub struct PrgSpec {
    pub construction: String,
    pub target: Target,
    pub eps: f64,
    pub params: Vec<Param>,
    pub components: Vec<Component>,
    pub stages: Vec<Stage>,
    sampler: Sampler,
}

impl PrgSpec {
    pub(crate) fn assemble(
        construction: &str,
        target: Target,
        eps: f64,
        params: Vec<Param>,
        parts: &[(&str, &Sampler)],
        sampler: Sampler,
    ) -> Self {
        let components = parts
            .iter()
            .map(|(name, s)| Component { name: name.to_string(), sampler: s.to_string(), seed_len: s.seed_len() })
            .collect();
        PrgSpec { construction: construction.to_string(), target, eps, params, components, stages: Vec::new(), sampler }
    }

    /// A bare sampler as a one-component spec, e.g. uniform input as a stand-in generator.
    pub fn from_sampler(construction: &str, target: Target, eps: f64, sampler: Sampler) -> Self {
        let parts = [(construction, &sampler)];
        Self::assemble(construction, target, eps, Vec::new(), &parts, sampler.clone())
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    pub fn into_sampler(self) -> Sampler {
        self.sampler
    }

    pub fn n(&self) -> usize {
        self.sampler.n()
    }

    pub fn seed_len(&self) -> u32 {
        self.sampler.seed_len()
    }

    /// Sum of the components' seed lengths; equal to `seed_len` by construction.
    pub fn component_seed_len(&self) -> u32 {
        self.components.iter().map(|c| c.seed_len).sum()
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn sample(&self, seed: &[u64]) -> Vec<u8> {
        self.sampler.sample(seed)
    }

    pub fn to_file(&self) -> PrgSpecFile {
        PrgSpecFile {
            schema: SPEC_SCHEMA.to_string(),
            construction: self.construction.clone(),
            target: self.target.clone(),
            eps: self.eps,
            seed_len: self.seed_len(),
            params: self.params.clone(),
            components: self.components.clone(),
            stages: self.stages.clone(),
            sampler: self.sampler.to_string(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("spec serializes")
    }
}

pub const SPEC_SCHEMA: &str = "grouprg-prg/1";

/// The serialized form of a spec. The sampler is recorded by its description;
/// `rebuild` reconstructs the generator from the construction and parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrgSpecFile {
    pub schema: String,
    pub construction: String,
    pub target: Target,
    pub eps: f64,
    pub seed_len: u32,
    pub params: Vec<Param>,
    pub components: Vec<Component>,
    pub stages: Vec<Stage>,
    pub sampler: String,
}

impl PrgSpecFile {
    pub fn from_json(s: &str) -> Result<Self, PrgError> {
        let f: PrgSpecFile = serde_json::from_str(s).map_err(|e| PrgError::Parse(e.to_string()))?;
        if f.schema != SPEC_SCHEMA {
            return Err(PrgError::Parse(format!("unsupported schema {:?}", f.schema)));
        }
        Ok(f)
    }

    fn value(&self, name: &str) -> Result<f64, PrgError> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value).ok_or_else(|| PrgError::Parse(format!("missing parameter {name}")))
    }

    /// Builds the generator again from the recorded construction and constants.
    pub fn rebuild(&self) -> Result<PrgSpec, PrgError> {
        let g = crate::group::catalog_group(&self.target.group)?;
        let (n, eps) = (self.target.n, self.eps);
        let spec = match self.construction.as_str() {
            "pgroup" | "pgroup-spill" => {
                let mut p = PGroupParams::with_exponents(self.value("c_bias")?, self.value("c_noise")?, Provenance::Override);
                p.noise = self.value("noise")? != 0.0;
                if self.construction == "pgroup" {
                    prg_p_group(&g, n, eps, &p)?
                } else {
                    prg_spill_pgroup(&g, n, eps, self.target.q, &p)?
                }
            }
            "mixing" => {
                let mut p = MixingParams::with_kappa(self.value("kappa")?, Provenance::Override);
                p.a_layer = self.value("a_layer")? != 0.0;
                p.delta_a = Some(self.value("delta_a")?);
                prg_mixing(&g, n, eps, &p)?
            }
            "reduction" => {
                let p = ReductionParams::from_params(&self.params)?;
                iterate_reduction(&g, n, self.target.ell, self.target.w, eps, &p)?
            }
            other => return Err(PrgError::Parse(format!("cannot rebuild construction {other:?}"))),
        };
        if spec.to_file().sampler != self.sampler {
            return Err(PrgError::Parse("rebuilt sampler differs from the recorded one".into()));
        }
        Ok(spec)
    }
}

pub(crate) fn log2_inv(eps: f64) -> f64 {
    (1.0 / eps).log2()
}

pub(crate) fn check_eps(eps: f64) -> Result<(), PrgError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(PrgError::Precondition(format!("eps = {eps} must lie in (0, 1)")))
    }
}
