//! Constants found by the harness's calibration runs, shipped as data.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{Param, PrgError};

pub const CALIBRATION_SCHEMA: &str = "grouprg-calibration/1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedEntry {
    pub construction: String,
    pub group: String,
    pub n: usize,
    pub eps: f64,
    pub params: Vec<Param>,
    /// Worst exact distance over the calibration corpus at these values.
    pub worst_delta: f64,
    /// How the corpus was generated.
    pub corpus: String,
}

impl CalibratedEntry {
    pub fn value(&self, name: &str) -> Result<f64, PrgError> {
        self.params
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.value)
            .ok_or_else(|| PrgError::Uncalibrated(format!("{} over {} lacks {name}", self.construction, self.group)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibratedTable {
    pub schema: String,
    pub entries: Vec<CalibratedEntry>,
}

pub fn calibrated_table() -> &'static CalibratedTable {
    static TABLE: OnceLock<CalibratedTable> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(include_str!("../../data/calibrated.json")).expect("shipped calibration parses"))
}

/// The shipped entry for a construction over a group, if any.
pub fn calibrated_entry(construction: &str, group: &str) -> Option<&'static CalibratedEntry> {
    calibrated_table().entries.iter().find(|e| e.construction == construction && e.group == group)
}
