//! Finite structures with closure relations bounded by independence, and
//! frugal disjoint amalgamation of configurations of them.

mod frugal;
mod structure;
mod survey;

pub use frugal::{cross_tuples, frugal_amalgamate, option_at, option_count, union_skeleton, KConfiguration};
pub use structure::{check_kr0_membership, is_kr0_member, kr_vocabulary, max_independent_size, KrStructure};
pub use survey::{configurations, shapes, survey_k_disjoint_ap, OutcomeCounts, Shape, SurveyConfig, SurveyRow, SurveyTable};

use crate::structure::StructureError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KdimError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("part {0} is the whole union, so no frugal extension is proper")]
    FrugalImpossible(usize),
    #[error("no completion of the union is a member")]
    NoAmalgam,
    #[error("gave up after {0} complete assignments")]
    SearchBudgetExceeded(usize),
}
