//! Finite model theory at desk scale: structures and embeddings, finite
//! Boolean algebras, Fraïssé-style generic approximations, the free
//! amalgamation class of Boolean-algebra-labelled structures, and frugal
//! amalgamation of k-configurations.

pub mod bitset;
pub mod structure;
pub mod boolean_algebra;
pub mod fraisse;
pub mod k1;
pub mod kdim;
