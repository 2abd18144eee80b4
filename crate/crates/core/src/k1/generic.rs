//! The finitely generated class as an amalgamation class for the generic
//! builder, with the free witness of each link recorded as it is built.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::amalgam::amalgamate_free;
use super::checks::{check_kminus1, find_witness};
use super::corpus::{enumerate_corpus_sized, CorpusBounds, InstanceSpec};
use super::embed::{generated_substructure, induced_embedding, is_k1_isomorphic, k1_embeddings, K1Embedding};
use super::free::{construct_free_witness, union_of_chain, FreeExtensionWitness};
use super::model::K1Structure;
use crate::boolean_algebra::BAEmbedding;
use crate::fraisse::{build_generic, AmalgamationClass, EngineError, GameArena, GenericApproximation};
use crate::structure::ElemId;

/// Members whose least witness starts below N, so every element of P2 has
/// at least one tail value.
pub struct K1Class {
    pub trunc_n: usize,
    witnesses: RefCell<Vec<FreeExtensionWitness>>,
}

impl K1Class {
    pub fn new(trunc_n: usize) -> Self {
        Self {
            trunc_n,
            witnesses: RefCell::new(Vec::new()),
        }
    }

    /// Witnesses of the amalgams produced so far, in order.
    pub fn take_witnesses(&self) -> Vec<FreeExtensionWitness> {
        std::mem::take(&mut self.witnesses.borrow_mut())
    }
}

fn split_ids(m: &K1Structure, ids: &BTreeSet<ElemId>) -> (BTreeSet<ElemId>, BTreeSet<ElemId>) {
    ids.iter().partition(|x| m.p0.contains(x))
}

impl AmalgamationClass for K1Class {
    type Structure = K1Structure;
    type Embedding = K1Embedding;

    fn name(&self) -> String {
        format!("k1(N={})", self.trunc_n)
    }

    fn size(&self, s: &K1Structure) -> usize {
        s.size()
    }

    fn ids(&self, s: &K1Structure) -> BTreeSet<ElemId> {
        s.ids()
    }

    fn is_member(&self, s: &K1Structure) -> bool {
        s.trunc_n == self.trunc_n && check_kminus1(s).passed() && find_witness(s).is_some_and(|w| w.n_star < self.trunc_n)
    }

    fn members_up_to(&self, bound: usize) -> Result<Vec<K1Structure>, EngineError> {
        let b = CorpusBounds {
            trunc_n: self.trunc_n,
            max_p0: bound,
            max_p2: bound,
            max_n_star: self.trunc_n.saturating_sub(1),
            max_pre_values: bound,
        };
        Ok(enumerate_corpus_sized(b, bound).iter().map(InstanceSpec::build).filter(|m| m.size() <= bound).collect())
    }

    fn embeddings(&self, a: &K1Structure, b: &K1Structure) -> Vec<K1Embedding> {
        k1_embeddings(a, b)
    }

    fn is_embedding(&self, a: &K1Structure, b: &K1Structure, e: &K1Embedding) -> bool {
        induced_embedding(a, b, &e.p0, &e.p2).as_ref() == Some(e)
    }

    fn compose(&self, first: &K1Embedding, second: &K1Embedding) -> K1Embedding {
        first.then(second)
    }

    fn identity(&self, s: &K1Structure) -> K1Embedding {
        K1Embedding::identity(s)
    }

    fn range_ids(&self, e: &K1Embedding) -> BTreeSet<ElemId> {
        e.range_ids()
    }

    fn proper_substructures(&self, b: &K1Structure) -> Vec<(K1Structure, K1Embedding)> {
        let ids: Vec<ElemId> = b.ids().into_iter().collect();
        let mut out = Vec::new();
        for mask in 0..(1u32 << ids.len()) - 1 {
            let s: BTreeSet<ElemId> = ids.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| *x).collect();
            let (s0, s2) = split_ids(b, &s);
            let (a, incl) = generated_substructure(b, &s0, &s2);
            if self.is_member(&a) {
                out.push((a, incl));
            }
        }
        out
    }

    fn amalgamate(&self, a: &K1Structure, b: &K1Structure, m: &K1Structure, incl: &K1Embedding, f: &K1Embedding) -> Result<(K1Structure, K1Embedding, K1Embedding), EngineError> {
        let fail = |e: super::K1Error| EngineError::AmalgamationFailed(e.to_string());
        let (s0, s2) = split_ids(m, &f.range_ids());
        let (n1, _) = generated_substructure(m, &s0, &s2);
        // Rename b so that the copy of a carries the ids of its image in m.
        let mut rename: BTreeMap<ElemId, ElemId> = BTreeMap::new();
        for (x, y) in incl.p0.iter().chain(&incl.p2) {
            let target = f.p0.get(x).or_else(|| f.p2.get(x)).copied().ok_or_else(|| EngineError::AmalgamationFailed(format!("id {x} not mapped")))?;
            rename.insert(*y, target);
        }
        let mut next = m.next_fresh_id().max(b.next_fresh_id());
        for x in b.p0.iter().chain(&b.p2) {
            if !rename.contains_key(x) {
                rename.insert(*x, next);
                next += 1;
            }
        }
        let _ = a;
        let n2 = b.relabel(&rename);
        let am = amalgamate_free(m, &n1, &n2).map_err(fail)?;
        let to_n2 = K1Embedding {
            p0: b.p0.iter().map(|x| (*x, rename[x])).collect(),
            p2: b.p2.iter().map(|x| (*x, rename[x])).collect(),
            p1: BAEmbedding::identity(b.atoms()),
        };
        let g = to_n2.then(&am.f);
        self.witnesses.borrow_mut().push(am.witness);
        Ok((am.m2, am.e, g))
    }

    fn is_isomorphic(&self, a: &K1Structure, b: &K1Structure) -> bool {
        is_k1_isomorphic(a, b)
    }
}

/// A generic approximation together with the witness that its last member
/// is free over the minimal structure.
pub struct K1Generic {
    pub approx: GenericApproximation<K1Structure, K1Embedding>,
    pub witness: FreeExtensionWitness,
}

/// Runs the generic builder on the class truncated at `trunc_n`. The
/// witness over the minimal structure composes the seed's witness with
/// those of every amalgam.
pub fn build_generic_k1(trunc_n: usize, bound: usize, steps: usize, seed: Option<K1Structure>) -> Result<K1Generic, EngineError> {
    let class = K1Class::new(trunc_n);
    let approx = build_generic(&class, bound, steps, seed)?;
    let min = K1Structure::minimal(trunc_n);
    let first = construct_free_witness(&min, &approx.chain[0], None).map_err(|e| EngineError::AmalgamationFailed(e.to_string()))?;
    let mut chain = vec![min];
    chain.extend(approx.chain.iter().cloned());
    let mut links = vec![first];
    links.extend(class.take_witnesses());
    let (_, witness) = union_of_chain(&chain, &links).ok_or_else(|| EngineError::AmalgamationFailed("chain links do not compose".into()))?;
    Ok(K1Generic { approx, witness })
}

/// The game on two members, moves being elements of P0 ∪ P2 drawn from the
/// given sets. A position is a partial isomorphism when the pairing extends
/// to an isomorphism of the generated substructures.
pub struct K1Game<'a> {
    pub left: &'a K1Structure,
    pub right: &'a K1Structure,
    pub left_ids: Vec<ElemId>,
    pub right_ids: Vec<ElemId>,
    cache: RefCell<HashMap<(bool, Vec<ElemId>), K1Structure>>,
}

impl<'a> K1Game<'a> {
    pub fn new(left: &'a K1Structure, right: &'a K1Structure) -> Self {
        Self {
            left,
            right,
            left_ids: left.ids().into_iter().collect(),
            right_ids: right.ids().into_iter().collect(),
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn generated(&self, side: bool, moves: &[ElemId]) -> K1Structure {
        let m = if side { self.left } else { self.right };
        let mut key: Vec<ElemId> = moves.to_vec();
        key.sort_unstable();
        key.dedup();
        self.cache
            .borrow_mut()
            .entry((side, key.clone()))
            .or_insert_with(|| {
                let (s0, s2) = split_ids(m, &key.into_iter().collect());
                generated_substructure(m, &s0, &s2).0
            })
            .clone()
    }
}

impl GameArena for K1Game<'_> {
    type Move = ElemId;

    fn left_moves(&self, _played: &[ElemId]) -> Vec<ElemId> {
        self.left_ids.clone()
    }

    fn right_moves(&self, _played: &[ElemId]) -> Vec<ElemId> {
        self.right_ids.clone()
    }

    fn partial_iso(&self, left: &[ElemId], right: &[ElemId]) -> bool {
        let mut p0 = BTreeMap::new();
        let mut p2 = BTreeMap::new();
        let mut back = BTreeMap::new();
        for (x, y) in left.iter().zip(right) {
            let in_p0 = self.left.p0.contains(x);
            if in_p0 != self.right.p0.contains(y) || *back.entry(*y).or_insert(*x) != *x {
                return false;
            }
            let map = if in_p0 { &mut p0 } else { &mut p2 };
            if *map.entry(*x).or_insert(*y) != *y {
                return false;
            }
        }
        let (a, b) = (self.generated(true, left), self.generated(false, right));
        a.atoms() == b.atoms() && induced_embedding(&a, &b, &p0, &p2).is_some()
    }
}
