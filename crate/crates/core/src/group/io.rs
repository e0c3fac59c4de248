//! JSON form of a group: `{name, order, table, names}`.

use serde::{Deserialize, Serialize};

use super::{build_group, FiniteGroup, GroupError};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub names: Vec<String>,
}

impl From<&FiniteGroup> for GroupFile {
    fn from(g: &FiniteGroup) -> Self {
        GroupFile {
            name: g.name().to_string(),
            order: g.order(),
            table: g.table_rows(),
            names: g.names().to_vec(),
        }
    }
}

impl GroupFile {
    pub fn into_group(self) -> Result<FiniteGroup, GroupError> {
        if self.table.len() != self.order {
            return Err(GroupError::NotSquare { row: self.table.len(), len: self.order });
        }
        build_group(&self.table)?.with_names(self.names).map(|g| g.with_name(self.name))
    }
}

pub fn to_json(g: &FiniteGroup) -> String {
    serde_json::to_string_pretty(&GroupFile::from(g)).expect("serializable")
}

pub fn from_json(s: &str) -> Result<FiniteGroup, Box<dyn std::error::Error + Send + Sync>> {
    let file: GroupFile = serde_json::from_str(s)?;
    Ok(file.into_group()?)
}
