//! Amalgamation classes and the generic-model builder: joint embedding and
//! disjoint amalgamation checks, task-scheduled chain construction,
//! richness defects, bounded back-and-forth games, and separability
//! witnesses.

mod checks;
mod classes;
mod game;
mod generic;
mod separability;

use std::collections::BTreeSet;
use std::fmt::Debug;

use serde::{de::DeserializeOwned, Serialize};

pub use checks::{check_disjoint_ap, check_jep, verify_amalgam, ApOutcome, JepOutcome};
pub use classes::{Graphs, LinearOrders, ListedClass};
pub use game::{back_and_forth_check, duplicator_survives, generated_iso, GameArena, StructureGame};
pub use generic::{build_generic, extension_pairs, richness_defect, Defect, ExtensionPair, GenericApproximation, Task, TaskStatus};
pub use separability::{separability_witness, DiagramFormula, Literal, Separability};

use crate::structure::ElemId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("enumeration exceeded {cap} members")]
    EnumerationOverflow { cap: usize },
    #[error("amalgamation failed: {0}")]
    AmalgamationFailed(String),
    #[error("structure is not a member of the class")]
    NotMember,
}

/// Cap on the number of members any enumerator is allowed to return.
pub const DEFAULT_ENUMERATION_CAP: usize = 20_000;

/// A class of finite (or finitely generated) structures with its
/// substructure notion and an amalgamation procedure.
///
/// Element ids are the class's notion of generators; an amalgam returned by
/// [`AmalgamationClass::amalgamate`] keeps every id of the structure being
/// extended, so tasks can be told apart by the ids their embeddings hit.
pub trait AmalgamationClass {
    type Structure: Clone + Debug + PartialEq + Serialize + DeserializeOwned;
    type Embedding: Clone + Debug + PartialEq + Serialize + DeserializeOwned;

    fn name(&self) -> String;

    fn size(&self, s: &Self::Structure) -> usize;

    fn ids(&self, s: &Self::Structure) -> BTreeSet<ElemId>;

    fn is_member(&self, s: &Self::Structure) -> bool;

    /// One representative per isomorphism type, of size at most `bound`, in a
    /// fixed order.
    fn members_up_to(&self, bound: usize) -> Result<Vec<Self::Structure>, EngineError>;

    /// All embeddings `a → b`, in a fixed order.
    fn embeddings(&self, a: &Self::Structure, b: &Self::Structure) -> Vec<Self::Embedding>;

    fn is_embedding(&self, a: &Self::Structure, b: &Self::Structure, e: &Self::Embedding) -> bool;

    /// `second ∘ first`.
    fn compose(&self, first: &Self::Embedding, second: &Self::Embedding) -> Self::Embedding;

    fn identity(&self, s: &Self::Structure) -> Self::Embedding;

    /// Ids of the target hit by `e`.
    fn range_ids(&self, e: &Self::Embedding) -> BTreeSet<ElemId>;

    /// Proper substructures `A < B` that are members, with their inclusions.
    fn proper_substructures(&self, b: &Self::Structure) -> Vec<(Self::Structure, Self::Embedding)>;

    /// Embeddings `g: b → m` with `g ∘ incl = f`, at most `limit` of them.
    fn extensions(
        &self,
        _a: &Self::Structure,
        b: &Self::Structure,
        m: &Self::Structure,
        incl: &Self::Embedding,
        f: &Self::Embedding,
        limit: usize,
    ) -> Vec<Self::Embedding> {
        self.embeddings(b, m)
            .into_iter()
            .filter(|g| self.compose(incl, g) == *f)
            .take(limit)
            .collect()
    }

    /// Disjoint amalgam of `b` and `m` over `a` (`incl: a → b`, `f: a → m`).
    /// Returns `(m', e: m → m', g: b → m')` with `e ∘ f = g ∘ incl`, ids of
    /// `m` preserved by `e`, and the ranges of `e` and `g` meeting exactly
    /// in the image of `a`.
    #[allow(clippy::type_complexity)]
    fn amalgamate(
        &self,
        a: &Self::Structure,
        b: &Self::Structure,
        m: &Self::Structure,
        incl: &Self::Embedding,
        f: &Self::Embedding,
    ) -> Result<(Self::Structure, Self::Embedding, Self::Embedding), EngineError>;

    fn is_isomorphic(&self, a: &Self::Structure, b: &Self::Structure) -> bool {
        self.size(a) == self.size(b)
            && self.ids(a).len() == self.ids(b).len()
            && self
                .embeddings(a, b)
                .iter()
                .any(|e| self.range_ids(e).len() == self.ids(b).len())
    }
}
