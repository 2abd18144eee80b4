use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::model::K1Structure;
use crate::bitset::AtomSet;
use crate::boolean_algebra::{BAEmbedding, FiniteBooleanAlgebra, Subalgebra};
use crate::structure::ElemId;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct K1Embedding {
    pub p0: BTreeMap<ElemId, ElemId>,
    pub p2: BTreeMap<ElemId, ElemId>,
    pub p1: BAEmbedding,
}

impl K1Embedding {
    pub fn identity(m: &K1Structure) -> Self {
        Self {
            p0: m.p0.iter().map(|x| (*x, *x)).collect(),
            p2: m.p2.iter().map(|x| (*x, *x)).collect(),
            p1: BAEmbedding::identity(m.atoms()),
        }
    }

    pub fn range_ids(&self) -> BTreeSet<ElemId> {
        self.p0.values().chain(self.p2.values()).copied().collect()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &K1Embedding) -> K1Embedding {
        let comp = |a: &BTreeMap<ElemId, ElemId>, b: &BTreeMap<ElemId, ElemId>| a.iter().filter_map(|(k, v)| b.get(v).map(|w| (*k, *w))).collect();
        K1Embedding {
            p0: comp(&self.p0, &other.p0),
            p2: comp(&self.p2, &other.p2),
            p1: self.p1.then(&other.p1),
        }
    }

    pub fn apply(&self, x: &AtomSet) -> AtomSet {
        self.p1.apply(x)
    }
}

fn sign_patterns(atoms: usize, gens: &[AtomSet]) -> Vec<AtomSet> {
    (0..atoms)
        .map(|a| AtomSet::from_indices(gens.len(), gens.iter().enumerate().filter(|(_, g)| g.contains(a)).map(|(i, _)| i)))
        .collect()
}

/// The embedding determined by the given P0 and P2 maps, if there is one.
///
/// P1 of `a` is generated by its G1 and F values (and X), so an atom of
/// `a` must go to the join of the atoms of `b` with the same sign pattern
/// over the image generators.
pub fn induced_embedding(a: &K1Structure, b: &K1Structure, p0: &BTreeMap<ElemId, ElemId>, p2: &BTreeMap<ElemId, ElemId>) -> Option<K1Embedding> {
    if a.trunc_n != b.trunc_n || a.free_generators.len() > b.free_generators.len() {
        return None;
    }
    let mut ga = Vec::new();
    let mut gb = Vec::new();
    for (i, x) in a.p0.iter().enumerate() {
        let j = b.p0_index(*p0.get(x)?)?;
        ga.push(a.g1_element(i));
        gb.push(b.g1_element(j));
    }
    for (c, x) in a.p2.iter().enumerate() {
        let d = b.p2_index(*p2.get(x)?)?;
        if a.f[c].len() != b.f[d].len() {
            return None;
        }
        for (u, v) in a.f[c].iter().zip(&b.f[d]) {
            match (u, v) {
                (None, None) => {}
                (Some(u), Some(v)) => {
                    ga.push(u.clone());
                    gb.push(v.clone());
                }
                _ => return None,
            }
        }
    }
    for (i, x) in a.free_generators.iter().enumerate() {
        ga.push(x.clone());
        gb.push(b.free_generators[i].clone());
    }
    let pa = sign_patterns(a.atoms(), &ga);
    let pb = sign_patterns(b.atoms(), &gb);
    let mut by_pattern: HashMap<&AtomSet, AtomSet> = HashMap::new();
    for (t, p) in pb.iter().enumerate() {
        by_pattern.entry(p).or_insert_with(|| AtomSet::empty(b.atoms())).insert(t);
    }
    if by_pattern.len() != a.atoms() || pa.iter().collect::<BTreeSet<_>>().len() != a.atoms() {
        return None;
    }
    let mut images = Vec::with_capacity(a.atoms());
    for (s, p) in pa.iter().enumerate() {
        let img = by_pattern.get(p)?.clone();
        if a.b_star().contains(s) != img.is_subset(b.b_star()) {
            return None;
        }
        images.push(img);
    }
    Some(K1Embedding {
        p0: p0.clone(),
        p2: p2.clone(),
        p1: BAEmbedding {
            target_atoms: b.atoms(),
            images,
        },
    })
}

/// Embeddings `a → b` extending the fixed id pairs, in lexicographic
/// order of the images of `a.p2` then `a.p0`.
pub fn k1_embeddings_extending(a: &K1Structure, b: &K1Structure, fixed: &BTreeMap<ElemId, ElemId>, limit: usize) -> Vec<K1Embedding> {
    let mut out = Vec::new();
    if a.p0.len() > b.p0.len() || a.p2.len() > b.p2.len() || a.atoms() > b.atoms() {
        return out;
    }
    let mut p2 = BTreeMap::new();
    assign_p2(a, b, fixed, 0, &mut p2, &mut out, limit);
    out
}

pub fn k1_embeddings(a: &K1Structure, b: &K1Structure) -> Vec<K1Embedding> {
    k1_embeddings_extending(a, b, &BTreeMap::new(), usize::MAX)
}

fn candidates(pool: &[ElemId], x: ElemId, fixed: &BTreeMap<ElemId, ElemId>, used: &BTreeSet<ElemId>) -> Vec<ElemId> {
    match fixed.get(&x) {
        Some(y) => pool.contains(y).then_some(*y).into_iter().filter(|y| !used.contains(y)).collect(),
        None => pool.iter().copied().filter(|y| !used.contains(y)).collect(),
    }
}

fn assign_p2(a: &K1Structure, b: &K1Structure, fixed: &BTreeMap<ElemId, ElemId>, i: usize, p2: &mut BTreeMap<ElemId, ElemId>, out: &mut Vec<K1Embedding>, limit: usize) {
    if out.len() >= limit {
        return;
    }
    if i == a.p2.len() {
        let mut p0 = BTreeMap::new();
        assign_p0(a, b, fixed, 0, p2, &mut p0, out, limit);
        return;
    }
    let used: BTreeSet<ElemId> = p2.values().copied().collect();
    let x = a.p2[i];
    for y in candidates(&b.p2, x, fixed, &used) {
        let (c, d) = (i, b.p2_index(y).unwrap());
        let shape_ok = a.f[c].len() == b.f[d].len() && a.f[c].iter().zip(&b.f[d]).all(|(u, v)| u.is_some() == v.is_some());
        if !shape_ok {
            continue;
        }
        p2.insert(x, y);
        assign_p2(a, b, fixed, i + 1, p2, out, limit);
        p2.remove(&x);
    }
}

#[allow(clippy::too_many_arguments)]
fn assign_p0(
    a: &K1Structure,
    b: &K1Structure,
    fixed: &BTreeMap<ElemId, ElemId>,
    i: usize,
    p2: &BTreeMap<ElemId, ElemId>,
    p0: &mut BTreeMap<ElemId, ElemId>,
    out: &mut Vec<K1Embedding>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if i == a.p0.len() {
        if let Some(e) = induced_embedding(a, b, p0, p2) {
            out.push(e);
        }
        return;
    }
    let used: BTreeSet<ElemId> = p0.values().copied().collect();
    let x = a.p0[i];
    for y in candidates(&b.p0, x, fixed, &used) {
        let j = b.p0_index(y).unwrap();
        // R(x, F_n(c)) must be preserved for the already chosen c.
        let agrees = a.p2.iter().enumerate().all(|(c, cx)| {
            let d = b.p2_index(p2[cx]).unwrap();
            a.f[c].iter().zip(&b.f[d]).all(|(u, v)| match (u, v) {
                (Some(u), Some(v)) => a.r(i, u) == b.r(j, v),
                _ => true,
            })
        });
        if !agrees {
            continue;
        }
        p0.insert(x, y);
        assign_p0(a, b, fixed, i + 1, p2, p0, out, limit);
        p0.remove(&x);
    }
}

pub fn is_k1_isomorphic(a: &K1Structure, b: &K1Structure) -> bool {
    a.atoms() == b.atoms() && a.p0.len() == b.p0.len() && a.p2.len() == b.p2.len() && !k1_embeddings_extending(a, b, &BTreeMap::new(), 1).is_empty()
}

/// The substructure generated by `s0 ⊆ P0` and `s2 ⊆ P2`, with its
/// inclusion into `m`. Ids are kept.
pub fn generated_substructure(m: &K1Structure, s0: &BTreeSet<ElemId>, s2: &BTreeSet<ElemId>) -> (K1Structure, K1Embedding) {
    let p0: Vec<ElemId> = m.p0.iter().copied().filter(|x| s0.contains(x)).collect();
    let p2: Vec<ElemId> = m.p2.iter().copied().filter(|x| s2.contains(x)).collect();
    let mut gens: Vec<AtomSet> = p0.iter().map(|x| m.g1_element(m.p0_index(*x).unwrap())).collect();
    for x in &p2 {
        gens.extend(m.f[m.p2_index(*x).unwrap()].iter().flatten().cloned());
    }
    let sub = Subalgebra::generated_by(m.atoms(), gens.iter());
    let cells = sub.cells().to_vec();
    let atoms = cells.len();
    let designated = AtomSet::from_indices(atoms, (0..atoms).filter(|i| cells[*i].is_subset(m.b_star())));
    let coords = |x: &AtomSet| sub.coordinates(x).expect("generator lies in the generated subalgebra");
    let g1 = p0
        .iter()
        .map(|x| {
            let s = m.g1_element(m.p0_index(*x).unwrap());
            coords(&s).first().unwrap()
        })
        .collect();
    let f = p2
        .iter()
        .map(|x| m.f[m.p2_index(*x).unwrap()].iter().map(|v| v.as_ref().map(coords)).collect())
        .collect();
    let s = K1Structure {
        trunc_n: m.trunc_n,
        p0: p0.clone(),
        p2: p2.clone(),
        algebra: FiniteBooleanAlgebra::with_designated(atoms, designated),
        g1,
        f,
        free_generators: Vec::new(),
    };
    let e = K1Embedding {
        p0: p0.iter().map(|x| (*x, *x)).collect(),
        p2: p2.iter().map(|x| (*x, *x)).collect(),
        p1: BAEmbedding {
            target_atoms: m.atoms(),
            images: cells,
        },
    };
    (s, e)
}

/// The inclusion `small → big` given by equal ids, if it is an embedding.
pub fn inclusion(small: &K1Structure, big: &K1Structure) -> Option<K1Embedding> {
    let p0 = small.p0.iter().map(|x| (*x, *x)).collect();
    let p2 = small.p2.iter().map(|x| (*x, *x)).collect();
    induced_embedding(small, big, &p0, &p2)
}
