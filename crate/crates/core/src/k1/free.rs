use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::checks::{canonical_witness, check_k1_witness, designated_singletons, find_witness, ClauseReport};
use super::embed::inclusion;
use super::model::K1Structure;
use super::K1Error;
use crate::bitset::AtomSet;
use crate::boolean_algebra::{independent_over, PrincipalIdeal, Subalgebra};
use crate::structure::ElemId;

/// Data showing that `M2` is free over a substructure `M1`: the set `I`
/// and, for each new element c of P2, the index from which every
/// `F_n(c)` lies in `I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeExtensionWitness {
    pub i: Vec<AtomSet>,
    pub h: BTreeMap<ElemId, usize>,
    /// Pairs `(c, d)` whose F values may coincide from `H(d)` on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub declared_collisions: Vec<(ElemId, ElemId)>,
}

/// Clauses `free.0` (inclusion by ids), `free.1` (I avoids `P1^M1 ∪ P4`,
/// generates with them, and is independent over `P1^M1` modulo P4) and
/// `free.2` (H and the tails of the new elements).
pub fn check_free_extension(m1: &K1Structure, m2: &K1Structure, w: &FreeExtensionWitness) -> ClauseReport {
    let mut r = ClauseReport::default();
    let Some(e) = inclusion(m1, m2) else {
        r.push("free.0", Some("ids of M1 do not induce an embedding into M2".into()));
        return r;
    };
    r.push("free.0", None);
    let atoms = m2.atoms();
    let range = e.p1.range();
    let ideal = PrincipalIdeal::new(m2.b_star().clone());

    let c1 = if let Some(y) = w.i.iter().find(|y| y.len() != atoms) {
        Some(format!("{y:?} is not an element of P1^M2"))
    } else if let Some(y) = w.i.iter().find(|y| range.contains(y) || m2.in_p4(y)) {
        Some(format!("{y:?} lies in P1^M1 or in P4"))
    } else {
        let gen = range.refined_by(w.i.iter().chain(&designated_singletons(m2)));
        if gen.cell_count() != atoms {
            Some(format!("I, P1^M1 and P4 generate {} of {atoms} atoms", gen.cell_count()))
        } else if !independent_over(&range, &w.i, &ideal) {
            Some("I is not independent over P1^M1 modulo P4".into())
        } else {
            None
        }
    };
    r.push("free.1", c1);
    if w.i.iter().any(|y| y.len() != atoms) {
        return r;
    }

    let old: BTreeSet<ElemId> = m1.p2.iter().copied().collect();
    let new: BTreeSet<ElemId> = m2.p2.iter().copied().filter(|c| !old.contains(c)).collect();
    let keys: BTreeSet<ElemId> = w.h.keys().copied().collect();
    let in_i: BTreeSet<&AtomSet> = w.i.iter().collect();
    let declared = |c: ElemId, d: ElemId| w.declared_collisions.iter().any(|p| *p == (c, d) || *p == (d, c));
    let mut c2 = if keys != new {
        Some(format!("H is defined on {keys:?}, new elements are {new:?}"))
    } else {
        None
    };
    'outer: for d in new.iter().filter(|_| c2.is_none()) {
        let di = m2.p2_index(*d).unwrap();
        for n in w.h[d]..m2.trunc_n {
            let Some(v) = m2.f_value(di, n) else {
                c2 = Some(format!("F_{n}({d}) undefined"));
                break 'outer;
            };
            if !in_i.contains(v) {
                c2 = Some(format!("F_{n}({d}) is not in I"));
                break 'outer;
            }
            for (ci, c) in m2.p2.iter().enumerate() {
                for m in 0..m2.trunc_n {
                    if (ci, m) == (di, n) {
                        continue;
                    }
                    if m2.f_value(ci, m) == Some(v) && (c == d || !declared(*c, *d)) {
                        c2 = Some(format!("F_{n}({d}) = F_{m}({c})"));
                        break 'outer;
                    }
                }
            }
        }
    }
    r.push("free.2", c2);
    r
}

/// `(I1 ∪ I2, H1 ∪ H2)` for `M0 ⊆ M1 ⊆ M2`, with `I1` carried into `M2`.
pub fn compose_free_witnesses(m1: &K1Structure, m2: &K1Structure, w1: &FreeExtensionWitness, w2: &FreeExtensionWitness) -> Option<FreeExtensionWitness> {
    let e = inclusion(m1, m2)?;
    let mut i: Vec<AtomSet> = w1.i.iter().map(|y| e.apply(y)).collect();
    i.extend(w2.i.iter().cloned());
    let mut h = w1.h.clone();
    h.extend(w2.h.iter().map(|(k, v)| (*k, *v)));
    let mut declared_collisions = w1.declared_collisions.clone();
    declared_collisions.extend(w2.declared_collisions.iter().copied());
    Some(FreeExtensionWitness {
        i,
        h,
        declared_collisions,
    })
}

/// A finite chain `M0 ⊆ M1 ⊆ ..` has the last member as its union; the
/// witness over `M0` is the composite of the links.
pub fn union_of_chain(chain: &[K1Structure], links: &[FreeExtensionWitness]) -> Option<(K1Structure, FreeExtensionWitness)> {
    if chain.is_empty() || links.len() + 1 != chain.len() {
        return None;
    }
    let mut acc = FreeExtensionWitness::default();
    for (k, w) in links.iter().enumerate() {
        acc = compose_free_witnesses(&chain[k], &chain[k + 1], &acc, w)?;
    }
    Some((chain.last().unwrap().clone(), acc))
}

/// A witness that `m1` is free over its substructure `m0`, with `H(c)`
/// equal to the start index `n_star` of a witness chain of `m1` (its least
/// one when `None`).
///
/// `I` is the tails of the new elements of P2 together with a labelling
/// that splits each (cell of `P1^M0`, tail pattern) block outside P4 into
/// atoms. This needs every such block to have the same power-of-two size.
pub fn construct_free_witness(m0: &K1Structure, m1: &K1Structure, n_star: Option<usize>) -> Result<FreeExtensionWitness, K1Error> {
    let e = inclusion(m0, m1).ok_or(K1Error::NotSubstructure)?;
    let ns = match n_star {
        Some(ns) if ns <= m1.trunc_n && check_k1_witness(m1, &canonical_witness(m1, ns)).passed() => ns,
        Some(ns) => return Err(K1Error::NoWitness(format!("no witness chain starting at {ns}"))),
        None => find_witness(m1).ok_or_else(|| K1Error::NoWitness("M1 has no witness chain".into()))?.n_star,
    };
    let old: BTreeSet<ElemId> = m0.p2.iter().copied().collect();
    let new: Vec<ElemId> = m1.p2.iter().copied().filter(|c| !old.contains(c)).collect();
    let mut tails = Vec::new();
    for c in &new {
        let ci = m1.p2_index(*c).unwrap();
        tails.extend((ns..m1.trunc_n).filter_map(|n| m1.f_value(ci, n).cloned()));
    }
    if tails.len() >= 64 {
        return Err(K1Error::ConstructionFailed("too many tails".into()));
    }
    let range: Subalgebra = e.p1.range();
    let free = m1.free_part();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for cell in range.cells() {
        let live = cell.meet(&free);
        if live.is_empty() {
            continue;
        }
        let mut by_pattern: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for a in live.iter() {
            let p = tails.iter().enumerate().fold(0u64, |acc, (i, t)| acc | (u64::from(t.contains(a)) << i));
            by_pattern.entry(p).or_default().push(a);
        }
        if by_pattern.len() != 1 << tails.len() {
            return Err(K1Error::ConstructionFailed("tails of the new elements are not independent over M0".into()));
        }
        blocks.extend(by_pattern.into_values());
    }
    let size = blocks.first().map_or(1, Vec::len);
    if blocks.iter().any(|b| b.len() != size) || !size.is_power_of_two() {
        let sizes: BTreeSet<usize> = blocks.iter().map(Vec::len).collect();
        return Err(K1Error::NonUniformSplit(sizes.into_iter().collect()));
    }
    let t = size.trailing_zeros() as usize;
    let atoms = m1.atoms();
    let labels: Vec<AtomSet> = (0..t)
        .map(|bit| AtomSet::from_indices(atoms, blocks.iter().flat_map(|b| b.iter().enumerate().filter(move |(r, _)| r >> bit & 1 == 1).map(|(_, a)| *a))))
        .collect();
    let mut i = tails;
    i.extend(labels);
    let w = FreeExtensionWitness {
        i,
        h: new.iter().map(|c| (*c, ns)).collect(),
        declared_collisions: Vec::new(),
    };
    let report = check_free_extension(m0, m1, &w);
    if !report.passed() {
        return Err(K1Error::ConstructionFailed(report.failing().join(", ")));
    }
    Ok(w)
}
