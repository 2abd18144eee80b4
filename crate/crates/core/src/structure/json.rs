//! JSON document form of a [`FiniteStructure`].
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "vocabulary": {"relations": [{"name": "E", "arity": 2}], "functions": [], "constants": []},
//!   "universe": [0, 1],
//!   "relations": {"E": [[0, 1]]},
//!   "functions": {},
//!   "constants": {}
//! }
//! ```
//!
//! Function entries are `[arg_0, .., arg_{k-1}, value]`. Maps are ordered, so
//! serializing a parsed canonical document reproduces it byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ElemId, FiniteStructure, StructureError, Vocabulary};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureDoc {
    pub schema_version: u32,
    pub vocabulary: Vocabulary,
    pub universe: Vec<ElemId>,
    pub relations: BTreeMap<String, Vec<Vec<ElemId>>>,
    pub functions: BTreeMap<String, Vec<Vec<ElemId>>>,
    pub constants: BTreeMap<String, ElemId>,
}

impl From<&FiniteStructure> for StructureDoc {
    fn from(m: &FiniteStructure) -> Self {
        let v = m.vocabulary();
        StructureDoc {
            schema_version: SCHEMA_VERSION,
            vocabulary: v.clone(),
            universe: m.universe().to_vec(),
            relations: v
                .relations
                .iter()
                .zip(&m.relations)
                .map(|(s, t)| (s.name.clone(), t.iter().cloned().collect()))
                .collect(),
            functions: v
                .functions
                .iter()
                .zip(&m.functions)
                .map(|(s, t)| {
                    let rows = t
                        .iter()
                        .map(|(a, val)| a.iter().copied().chain([*val]).collect())
                        .collect();
                    (s.name.clone(), rows)
                })
                .collect(),
            constants: v.constants.iter().cloned().zip(m.constants().iter().copied()).collect(),
        }
    }
}

impl StructureDoc {
    pub fn into_structure(self) -> Result<FiniteStructure, StructureError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(StructureError::Json(format!(
                "unsupported schema version {}",
                self.schema_version
            )));
        }
        self.vocabulary.validate()?;
        let mut m = FiniteStructure::with_universe(self.vocabulary, self.universe);
        for (name, rows) in self.relations {
            let idx = m
                .vocabulary
                .relation_index(&name)
                .ok_or(StructureError::UnknownSymbol(name))?;
            m.relations[idx] = rows.into_iter().collect();
        }
        for (name, rows) in self.functions {
            let idx = m
                .vocabulary
                .function_index(&name)
                .ok_or(StructureError::UnknownSymbol(name.clone()))?;
            for mut row in rows {
                let val = row
                    .pop()
                    .ok_or_else(|| StructureError::Json(format!("empty row for function {name}")))?;
                m.functions[idx].insert(row, val);
            }
        }
        let mut consts = Vec::new();
        for name in &m.vocabulary.constants {
            let c = self
                .constants
                .get(name)
                .ok_or_else(|| StructureError::Json(format!("constant {name} uninterpreted")))?;
            consts.push(*c);
        }
        m.constants = consts;
        m.validate()?;
        Ok(m)
    }
}

impl FiniteStructure {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&StructureDoc::from(self)).expect("structure serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, StructureError> {
        let doc: StructureDoc = serde_json::from_str(s).map_err(|e| StructureError::Json(e.to_string()))?;
        doc.into_structure()
    }
}

impl Serialize for FiniteStructure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        StructureDoc::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteStructure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        StructureDoc::deserialize(d)?
            .into_structure()
            .map_err(serde::de::Error::custom)
    }
}
