use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ElemId, FiniteStructure, StructureError};

/// An element map between two structures. Validity is checked against a
/// concrete (source, target) pair by [`is_embedding`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Embedding {
    pub map: BTreeMap<ElemId, ElemId>,
}

impl Embedding {
    pub fn identity(s: &FiniteStructure) -> Self {
        Self {
            map: s.universe().iter().map(|e| (*e, *e)).collect(),
        }
    }

    pub fn image(&self, e: ElemId) -> Option<ElemId> {
        self.map.get(&e).copied()
    }

    pub fn range(&self) -> BTreeSet<ElemId> {
        self.map.values().copied().collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &Embedding) -> Embedding {
        Embedding {
            map: self
                .map
                .iter()
                .filter_map(|(k, v)| other.image(*v).map(|w| (*k, w)))
                .collect(),
        }
    }
}

fn check_vocab(a: &FiniteStructure, b: &FiniteStructure) -> Result<(), StructureError> {
    if a.vocabulary() != b.vocabulary() {
        return Err(StructureError::VocabularyMismatch);
    }
    Ok(())
}

/// Full predicate: injective, defined on all of `a`, preserves and reflects
/// relations, commutes with functions (including definedness) and constants.
pub fn is_embedding(a: &FiniteStructure, b: &FiniteStructure, e: &Embedding) -> bool {
    if a.vocabulary() != b.vocabulary() || e.map.len() != a.len() {
        return false;
    }
    if a.universe().iter().any(|x| e.image(*x).is_none_or(|y| !b.contains(y))) {
        return false;
    }
    if e.range().len() != e.map.len() {
        return false;
    }
    let img = |t: &[ElemId]| -> Vec<ElemId> { t.iter().map(|x| e.map[x]).collect() };
    for r in 0..a.vocabulary().relations.len() {
        let arity = a.vocabulary().relations[r].arity;
        for t in tuples(a.universe(), arity) {
            if a.holds(r, &t) != b.holds(r, &img(&t)) {
                return false;
            }
        }
    }
    for f in 0..a.vocabulary().functions.len() {
        let arity = a.vocabulary().functions[f].arity;
        for t in tuples(a.universe(), arity) {
            match (a.apply(f, &t), b.apply(f, &img(&t))) {
                (None, None) => {}
                (Some(v), Some(w)) if e.map[&v] == w => {}
                _ => return false,
            }
        }
    }
    a.constants()
        .iter()
        .zip(b.constants())
        .all(|(c, d)| e.map[c] == *d)
}

/// All tuples of the given arity over `universe`, lexicographically.
pub fn tuples(universe: &[ElemId], arity: usize) -> Vec<Vec<ElemId>> {
    let mut out = vec![Vec::with_capacity(arity)];
    for _ in 0..arity {
        let mut next = Vec::with_capacity(out.len() * universe.len());
        for t in &out {
            for u in universe {
                let mut t2 = t.clone();
                t2.push(*u);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

struct Search<'a> {
    a: &'a FiniteStructure,
    b: &'a FiniteStructure,
    assigned: Vec<Option<ElemId>>,
    used: BTreeSet<ElemId>,
}

impl Search<'_> {
    fn idx(&self, e: ElemId) -> usize {
        self.a.position(e).expect("element of source")
    }

    fn image_of(&self, e: ElemId) -> Option<ElemId> {
        self.assigned[self.idx(e)]
    }

    /// Checks every atomic fact whose arguments lie in the assigned prefix
    /// and mention position `i`.
    fn consistent_at(&self, i: usize) -> bool {
        let prefix = &self.a.universe()[..=i];
        let newest = self.a.universe()[i];
        let img = |t: &[ElemId]| -> Vec<ElemId> { t.iter().map(|x| self.image_of(*x).unwrap()).collect() };
        let voc = self.a.vocabulary();
        for (r, sym) in voc.relations.iter().enumerate() {
            for t in tuples(prefix, sym.arity).into_iter().filter(|t| t.contains(&newest)) {
                if self.a.holds(r, &t) != self.b.holds(r, &img(&t)) {
                    return false;
                }
            }
        }
        for (f, sym) in voc.functions.iter().enumerate() {
            for t in tuples(prefix, sym.arity) {
                let av = self.a.apply(f, &t);
                let involves_new = t.contains(&newest) || av == Some(newest);
                if !involves_new {
                    continue;
                }
                let bv = self.b.apply(f, &img(&t));
                match (av, bv) {
                    (None, None) => {}
                    (Some(v), Some(w)) => {
                        if let Some(iv) = self.image_of(v) {
                            if iv != w {
                                return false;
                            }
                        }
                    }
                    _ => return false,
                }
            }
        }
        for (c, d) in self.a.constants().iter().zip(self.b.constants()) {
            if *c == newest && self.assigned[i] != Some(*d) {
                return false;
            }
        }
        true
    }

    fn emit(&self, out: &mut Vec<Embedding>) {
        let e = Embedding {
            map: self
                .a
                .universe()
                .iter()
                .zip(&self.assigned)
                .map(|(x, y)| (*x, y.unwrap()))
                .collect(),
        };
        if is_embedding(self.a, self.b, &e) {
            out.push(e);
        }
    }
}

fn search(a: &FiniteStructure, b: &FiniteStructure, fixed: &BTreeMap<ElemId, ElemId>, limit: usize) -> Vec<Embedding> {
    let mut out = Vec::new();
    if a.len() > b.len() {
        return out;
    }
    let mut s = Search {
        a,
        b,
        assigned: vec![None; a.len()],
        used: BTreeSet::new(),
    };
    // Pre-assigned elements are validated as the prefix grows.
    let mut fixed_ok = true;
    for (x, y) in fixed {
        match a.position(*x) {
            Some(i) if b.contains(*y) && s.used.insert(*y) => s.assigned[i] = Some(*y),
            _ => fixed_ok = false,
        }
    }
    if !fixed_ok {
        return out;
    }
    extend(&mut s, 0, &mut out, limit);
    out
}

fn extend(s: &mut Search<'_>, i: usize, out: &mut Vec<Embedding>, limit: usize) {
    if out.len() >= limit {
        return;
    }
    if i == s.a.len() {
        s.emit(out);
        return;
    }
    if let Some(_fixed) = s.assigned[i] {
        if s.consistent_at(i) {
            extend(s, i + 1, out, limit);
        }
        return;
    }
    for &cand in s.b.universe() {
        if s.used.contains(&cand) {
            continue;
        }
        s.assigned[i] = Some(cand);
        s.used.insert(cand);
        if s.consistent_at(i) {
            extend(s, i + 1, out, limit);
        }
        s.used.remove(&cand);
        s.assigned[i] = None;
        if out.len() >= limit {
            return;
        }
    }
}

/// All embeddings `a → b`, ordered lexicographically by the image of `a`'s
/// sorted universe.
pub fn enumerate_embeddings(a: &FiniteStructure, b: &FiniteStructure) -> Result<Vec<Embedding>, StructureError> {
    check_vocab(a, b)?;
    Ok(search(a, b, &BTreeMap::new(), usize::MAX))
}

pub fn first_embedding(a: &FiniteStructure, b: &FiniteStructure) -> Result<Option<Embedding>, StructureError> {
    check_vocab(a, b)?;
    Ok(search(a, b, &BTreeMap::new(), 1).pop())
}

/// Embeddings `a → b` that agree with `fixed` on its domain.
pub fn embeddings_extending(
    a: &FiniteStructure,
    b: &FiniteStructure,
    fixed: &BTreeMap<ElemId, ElemId>,
    limit: usize,
) -> Result<Vec<Embedding>, StructureError> {
    check_vocab(a, b)?;
    Ok(search(a, b, fixed, limit))
}

pub fn is_isomorphic(a: &FiniteStructure, b: &FiniteStructure) -> Result<bool, StructureError> {
    check_vocab(a, b)?;
    if a.len() != b.len() {
        return Ok(false);
    }
    Ok(first_embedding(a, b)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Vocabulary;

    fn digraph(n: u32, edges: &[(u32, u32)]) -> FiniteStructure {
        let mut g = FiniteStructure::with_universe(Vocabulary::new().relation("E", 2), 0..n);
        for (x, y) in edges {
            g.insert_by_name("E", &[*x, *y]).unwrap();
        }
        g
    }

    #[test]
    fn point_into_point_is_identity() {
        let p = FiniteStructure::with_universe(Vocabulary::new(), [0]);
        let e = enumerate_embeddings(&p, &p).unwrap();
        assert_eq!(e, vec![Embedding::identity(&p)]);
    }

    #[test]
    fn edge_into_three_cycle() {
        let edge = digraph(2, &[(0, 1)]);
        let cyc = digraph(3, &[(0, 1), (1, 2), (2, 0)]);
        let e = enumerate_embeddings(&edge, &cyc).unwrap();
        assert_eq!(e.len(), 3);
        // lexicographic by images
        let firsts: Vec<_> = e.iter().map(|m| (m.map[&0], m.map[&1])).collect();
        assert_eq!(firsts, vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn pigeonhole() {
        let big = digraph(3, &[]);
        let small = digraph(2, &[]);
        assert!(enumerate_embeddings(&big, &small).unwrap().is_empty());
        assert!(!is_isomorphic(&big, &small).unwrap());
    }

    #[test]
    fn vocabulary_mismatch() {
        let a = digraph(1, &[]);
        let b = FiniteStructure::with_universe(Vocabulary::new(), [0]);
        assert!(matches!(enumerate_embeddings(&a, &b), Err(StructureError::VocabularyMismatch)));
    }

    #[test]
    fn partial_function_definedness_is_reflected() {
        let v = Vocabulary::new().partial_function("g", 1);
        let mut a = FiniteStructure::with_universe(v.clone(), [0]);
        a.define_by_name("g", &[0], 0).unwrap();
        let b = FiniteStructure::with_universe(v, [0, 1]);
        assert!(enumerate_embeddings(&a, &b).unwrap().is_empty());
    }
}
