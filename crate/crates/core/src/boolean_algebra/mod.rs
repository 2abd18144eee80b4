//! Finite Boolean algebras in atom form: subalgebras as partitions,
//! principal ideals and quotients, independence modulo an ideal, free bases,
//! and pushouts.

mod algebra;
mod basis;
mod independence;
mod pushout;

pub use algebra::{quotient, BAEmbedding, FiniteBooleanAlgebra, PrincipalIdeal, Projection, Subalgebra};
pub use basis::{find_basis_containing, generated_with_ideal, is_basis, rebase_with_element};
pub use independence::{first_violation, independent_over, is_independent_mod_ideal, minterm};
pub use pushout::{pushout, pushout_independence, Pushout};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BAError {
    #[error("the ideal is not proper")]
    ImproperIdeal,
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("algebra with {atoms} atoms is not free on any number of generators")]
    NotFree { atoms: usize },
    #[error("element covers {covered} atoms; a basis member must cover {needed}")]
    NoBasisThrough { covered: usize, needed: usize },
    #[error("0 and 1 belong to no basis")]
    TrivialElement,
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}
