//! Browser bindings. Every export returns a JSON string; failures come back
//! as `{"error": "..."}` so the page never has to catch exceptions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use grouprg::group::{catalog_group, classify_p_group, is_dedekind_structural};
use grouprg::harness::{evaluate, CorpusSpec, ExperimentConfig, Mode};
use grouprg::prg::{prg_mixing, prg_p_group, MixingParams, PGroupParams, PrgSpecFile};
use grouprg::rep::{irrep_catalog, is_mixing};

type Res = Result<Value, Box<dyn std::error::Error>>;

fn respond(r: Res) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

#[wasm_bindgen]
pub fn group_info(name: &str) -> String {
    respond((|| {
        let g = catalog_group(name)?;
        let verdict = is_mixing(&irrep_catalog(&g)?)?;
        Ok(json!({
            "name": g.name(),
            "order": g.order(),
            "commutative": g.is_commutative(),
            "p_group": classify_p_group(&g).map(|(p, k)| json!({ "p": p, "k": k })),
            "dedekind": is_dedekind_structural(&g)?,
            "mixing": verdict.mixing,
            "theta": verdict.theta,
        }))
    })())
}

/// `construction` is "pgroup" or "mixing"; uses the shipped calibrated constants.
#[wasm_bindgen]
pub fn build_prg(construction: &str, group: &str, n: usize, eps: f64) -> String {
    respond((|| {
        let g = catalog_group(group)?;
        let spec = match construction {
            "pgroup" => prg_p_group(&g, n, eps, &PGroupParams::calibrated(&g)?)?,
            "mixing" => prg_mixing(&g, n, eps, &MixingParams::calibrated(&g)?)?,
            other => return Err(format!("unknown construction {other:?}").into()),
        };
        Ok(serde_json::from_str(&spec.to_json())?)
    })())
}

/// Exact distance of a built generator on `count` random programs.
#[wasm_bindgen]
pub fn evaluate_prg(spec_json: &str, count: usize, corpus_seed: u64) -> String {
    respond((|| {
        let spec = PrgSpecFile::from_json(spec_json)?.rebuild()?;
        let corpus = CorpusSpec::programs(&spec.target.group, spec.n(), count, corpus_seed);
        let cfg = ExperimentConfig { corpus, mode: Mode::Exact, permutations: 0, rng_seed: 0 };
        Ok(serde_json::from_str(&evaluate(&spec, &cfg)?.to_json())?)
    })())
}
