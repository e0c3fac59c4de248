//! JSON form: `{group, n, blocks: [{indices, truth_table, base}], spill: [{position, indices, values}]}`.
//!
//! `group` is a catalog name or a full group file; elements are written by
//! name and read back from either names or indices.

use serde::{Deserialize, Serialize};

use super::{Block, BlockProduct, ModelError, SpillPart};
use crate::group::io::GroupFile;
use crate::group::{catalog_group, Elem, FiniteGroup};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GroupRef {
    Name(String),
    Table(GroupFile),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ElemRef {
    Index(usize),
    Name(String),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BlockFile {
    pub indices: Vec<usize>,
    pub truth_table: Vec<u8>,
    pub base: ElemRef,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SpillFile {
    #[serde(default)]
    pub position: usize,
    pub indices: Vec<usize>,
    pub values: Vec<ElemRef>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ModelFile {
    pub group: GroupRef,
    pub n: usize,
    pub blocks: Vec<BlockFile>,
    #[serde(default)]
    pub spill: Vec<SpillFile>,
}

pub fn resolve_group(g: &GroupRef) -> Result<FiniteGroup, ModelError> {
    match g {
        GroupRef::Name(name) => catalog_group(name).map_err(|e| ModelError::Unknown(e.to_string())),
        GroupRef::Table(file) => file.clone().into_group().map_err(|e| ModelError::Unknown(e.to_string())),
    }
}

pub fn resolve_elem(g: &FiniteGroup, e: &ElemRef) -> Result<Elem, ModelError> {
    match e {
        ElemRef::Index(i) if *i < g.order() => Ok(*i),
        ElemRef::Index(i) => Err(ModelError::Unknown(format!("element {i}"))),
        ElemRef::Name(s) => g.find(s).ok_or_else(|| ModelError::Unknown(format!("element {s}"))),
    }
}

fn group_ref(g: &FiniteGroup) -> GroupRef {
    match catalog_group(g.name()) {
        Ok(c) if c.table_rows() == g.table_rows() => GroupRef::Name(g.name().to_string()),
        _ => GroupRef::Table(GroupFile::from(g)),
    }
}

impl From<&BlockProduct> for ModelFile {
    fn from(f: &BlockProduct) -> Self {
        let g = f.group();
        let name = |e: Elem| ElemRef::Name(g.element_name(e).to_string());
        ModelFile {
            group: group_ref(g),
            n: f.n(),
            blocks: f
                .blocks()
                .iter()
                .map(|b| BlockFile { indices: b.indices.clone(), truth_table: b.truth_table.clone(), base: name(b.base) })
                .collect(),
            spill: f
                .spill()
                .iter()
                .map(|s| SpillFile { position: s.position, indices: s.indices.clone(), values: s.values.iter().map(|&v| name(v)).collect() })
                .collect(),
        }
    }
}

impl ModelFile {
    pub fn into_product(self) -> Result<BlockProduct, ModelError> {
        let g = resolve_group(&self.group)?;
        let blocks = self
            .blocks
            .iter()
            .map(|b| Ok(Block { indices: b.indices.clone(), truth_table: b.truth_table.clone(), base: resolve_elem(&g, &b.base)? }))
            .collect::<Result<Vec<_>, ModelError>>()?;
        let spill = self
            .spill
            .iter()
            .map(|s| {
                let values = s.values.iter().map(|v| resolve_elem(&g, v)).collect::<Result<Vec<_>, _>>()?;
                Ok(SpillPart { position: s.position, indices: s.indices.clone(), values })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        BlockProduct::new(g, self.n, blocks, spill)
    }
}

pub fn to_json(f: &BlockProduct) -> String {
    serde_json::to_string_pretty(&ModelFile::from(f)).expect("serializable")
}

pub fn from_json(s: &str) -> Result<BlockProduct, Box<dyn std::error::Error + Send + Sync>> {
    let file: ModelFile = serde_json::from_str(s)?;
    Ok(file.into_product()?)
}
