//! JSON form of an irrep set; complex entries are `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{CMatrix, Irrep, IrrepSet};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IrrepFile {
    pub dim: usize,
    /// images[g][row][col] = [re, im]
    pub images: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IrrepSetFile {
    pub group: String,
    pub order: usize,
    pub complete: bool,
    pub irreps: Vec<IrrepFile>,
}

impl From<&IrrepSet> for IrrepSetFile {
    fn from(s: &IrrepSet) -> Self {
        let irreps = s
            .irreps
            .iter()
            .map(|r| IrrepFile {
                dim: r.dim,
                images: r
                    .images
                    .iter()
                    .map(|m| m.rows().into_iter().map(|row| row.into_iter().map(|z| [z.re, z.im]).collect()).collect())
                    .collect(),
            })
            .collect();
        IrrepSetFile { group: s.group_name.clone(), order: s.order, complete: s.complete, irreps }
    }
}

impl IrrepSetFile {
    /// Shape errors (ragged rows) are reported; numerical validity is left
    /// to `validate_irrep_set`.
    pub fn into_set(self) -> Result<IrrepSet, String> {
        let mut irreps = Vec::new();
        for (i, r) in self.irreps.into_iter().enumerate() {
            let mut images = Vec::new();
            for m in r.images {
                if m.len() != r.dim || m.iter().any(|row| row.len() != r.dim) {
                    return Err(format!("irrep {i}: image is not {0}x{0}", r.dim));
                }
                let rows: Vec<Vec<Complex64>> =
                    m.into_iter().map(|row| row.into_iter().map(|[a, b]| Complex64::new(a, b)).collect()).collect();
                images.push(CMatrix::from_rows(&rows));
            }
            irreps.push(Irrep { dim: r.dim, images });
        }
        Ok(IrrepSet { group_name: self.group, order: self.order, irreps, complete: self.complete })
    }
}

pub fn to_json(s: &IrrepSet) -> String {
    serde_json::to_string(&IrrepSetFile::from(s)).expect("serializable")
}

pub fn from_json(s: &str) -> Result<IrrepSet, Box<dyn std::error::Error + Send + Sync>> {
    let file: IrrepSetFile = serde_json::from_str(s)?;
    Ok(file.into_set()?)
}
