//! Structures whose middle sort is a finite Boolean algebra labelled by
//! a set P0 (through G1 and the relation R) and by the functions
//! `F_n : P2 → P1`, truncated to `n < N`.

mod amalgam;
mod checks;
mod corpus;
mod embed;
mod free;
mod generic;
mod model;
mod mutants;
mod nonoise;
mod sequences;

pub use amalgam::{aligned_index, amalgamate_free, assembled_witness, disjoint_amalgamate_k1, ranges_meet_in, FreeAmalgam};
pub use checks::{canonical_witness, check_k1, check_k1_witness, check_kminus1, find_witness, is_k1_member, over_p4, ClauseReport, ClauseResult};
pub use corpus::{enumerate_corpus, enumerate_corpus_sized, CorpusBounds, InstanceSpec, PreValue};
pub use model::{K1Structure, K1Witness};
pub use embed::{generated_substructure, inclusion, induced_embedding, is_k1_isomorphic, k1_embeddings, k1_embeddings_extending, K1Embedding};
pub use generic::{build_generic_k1, K1Class, K1Game, K1Generic};
pub use free::{check_free_extension, compose_free_witnesses, construct_free_witness, union_of_chain, FreeExtensionWitness};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum K1Error {
    #[error("ids of the smaller structure do not induce an embedding")]
    NotSubstructure,
    #[error("not a member: {0}")]
    NotMember(String),
    #[error("no witness: {0}")]
    NoWitness(String),
    #[error("blocks over the substructure have unequal sizes {0:?}")]
    NonUniformSplit(Vec<usize>),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("amalgamation collapses {0}")]
    CollapseDetected(String),
    #[error("no admissible ultrafilter for {0}")]
    UltrafilterChoiceFailed(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("link {0} has too few new elements of P2 to harvest")]
    HarvestFailed(usize),
    #[error("witness chains do not align below N: {0}")]
    WitnessAlignmentFailed(String),
}
pub use nonoise::{nonoise_check, open_cells, with_atom_under};
pub use sequences::{adjoin_tail_element, adjoin_trace_element, build_good_chain, good_seed, check_good_sequence, check_labeled_sequence, label_good_sequence, GoodChain, LabeledSequence};
pub use mutants::{k0_mutants, kminus1_mutants, Mutant};
