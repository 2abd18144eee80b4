//! Finite structures over a declared vocabulary, closure, and embedding search.

mod embed;
mod finite;
mod json;
mod vocab;

pub use embed::{
    embeddings_extending, enumerate_embeddings, first_embedding, is_embedding, is_isomorphic, tuples, Embedding,
};
pub use finite::{ElemId, FiniteStructure, DEFAULT_CLOSURE_CAP};
pub use json::{StructureDoc, SCHEMA_VERSION};
pub use vocab::{FunctionSymbol, Symbol, Vocabulary, DEFAULT_INDEX_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("structures are over different vocabularies")]
    VocabularyMismatch,
    #[error("closure exceeded {cap} elements")]
    ClosureDiverges { cap: usize },
    #[error("element {0} is not in the universe")]
    NotInUniverse(ElemId),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("json: {0}")]
    Json(String),
}
