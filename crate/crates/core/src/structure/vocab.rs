use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::StructureError;

/// Default truncation for indexed symbol families.
pub const DEFAULT_INDEX_BOUND: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunctionSymbol {
    pub name: String,
    pub arity: usize,
    /// Partial symbols may be undefined on part of their domain.
    #[serde(default)]
    pub partial: bool,
}

/// A finite signature. Indexed families (`R0, R1, ..`) are declared by
/// spelling out every member below `index_bound`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    pub relations: Vec<Symbol>,
    pub functions: Vec<FunctionSymbol>,
    pub constants: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_bound: Option<usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn relation(mut self, name: &str, arity: usize) -> Self {
        self.relations.push(Symbol {
            name: name.to_string(),
            arity,
        });
        self
    }

    pub fn function(mut self, name: &str, arity: usize) -> Self {
        self.functions.push(FunctionSymbol {
            name: name.to_string(),
            arity,
            partial: false,
        });
        self
    }

    pub fn partial_function(mut self, name: &str, arity: usize) -> Self {
        self.functions.push(FunctionSymbol {
            name: name.to_string(),
            arity,
            partial: true,
        });
        self
    }

    pub fn constant(mut self, name: &str) -> Self {
        self.constants.push(name.to_string());
        self
    }

    /// Adds `prefix0 .. prefix{bound-1}` relations of the given arity.
    pub fn relation_family(mut self, prefix: &str, arity: usize, bound: usize) -> Self {
        for n in 0..bound {
            self = self.relation(&format!("{prefix}{n}"), arity);
        }
        self.index_bound = Some(bound);
        self
    }

    pub fn function_family(mut self, prefix: &str, arity: usize, bound: usize) -> Self {
        for n in 0..bound {
            self = self.function(&format!("{prefix}{n}"), arity);
        }
        self.index_bound = Some(bound);
        self
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|s| s.name == name)
    }

    pub fn function_index(&self, name: &str) -> Option<usize> {
        self.functions.iter().position(|s| s.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|s| s == name)
    }

    pub fn validate(&self) -> Result<(), StructureError> {
        let mut seen = BTreeSet::new();
        let names = self
            .relations
            .iter()
            .map(|s| &s.name)
            .chain(self.functions.iter().map(|s| &s.name))
            .chain(self.constants.iter());
        for name in names {
            if !seen.insert(name.clone()) {
                return Err(StructureError::InvalidVocabulary(format!(
                    "duplicate symbol `{name}`"
                )));
            }
        }
        if self.index_bound == Some(0) {
            return Err(StructureError::InvalidVocabulary(
                "index bound must be at least 1".into(),
            ));
        }
        Ok(())
    }
}
