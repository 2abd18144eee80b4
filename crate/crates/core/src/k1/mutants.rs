//! Single-clause violations built from corpus members. Each mutant names
//! the clause it should break; every other clause should still hold.

use serde::{Deserialize, Serialize};

use super::checks::{canonical_witness, check_k1_witness, check_kminus1, find_witness};
use super::corpus::{InstanceSpec, PreValue};
use super::model::{K1Structure, K1Witness};
use crate::bitset::AtomSet;
use crate::boolean_algebra::FiniteBooleanAlgebra;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mutant {
    pub target: String,
    pub note: String,
    pub structure: K1Structure,
    /// Present for the witness clauses `K0.*`.
    pub witness: Option<K1Witness>,
}

impl Mutant {
    /// The clauses that fail: for `K-1.*` targets the structural clauses,
    /// otherwise the structural clauses followed by the witness clauses.
    pub fn failing(&self) -> Vec<String> {
        let mut out: Vec<String> = check_kminus1(&self.structure).failing().iter().map(|s| s.to_string()).collect();
        if let Some(w) = &self.witness {
            out.extend(check_k1_witness(&self.structure, w).failing().iter().map(|s| s.to_string()));
        }
        out
    }

    pub fn hits_exactly_target(&self) -> bool {
        self.failing() == vec![self.target.clone()]
    }
}

/// Appends an atom that copies the memberships of atom `x`.
fn duplicate_atom(m: &K1Structure, x: usize) -> K1Structure {
    let n = m.atoms();
    let widen = |s: &AtomSet| {
        let mut t = AtomSet::from_indices(n + 1, s.iter());
        if s.contains(x) {
            t.insert(n);
        }
        t
    };
    let mut out = m.clone();
    out.algebra = FiniteBooleanAlgebra::with_designated(n + 1, widen(m.b_star()));
    out.f = m.f.iter().map(|row| row.iter().map(|v| v.as_ref().map(widen)).collect()).collect();
    out.free_generators = m.free_generators.iter().map(widen).collect();
    out
}

fn push(out: &mut Vec<Mutant>, target: &str, note: String, structure: K1Structure, witness: Option<K1Witness>) {
    out.push(Mutant {
        target: target.into(),
        note,
        structure,
        witness,
    });
}

/// Mutants of the structural clauses `K-1.1` .. `K-1.8`.
pub fn kminus1_mutants(corpus: &[K1Structure]) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (k, m) in corpus.iter().enumerate() {
        if let (Some(a), Some(_)) = (m.p0.first(), m.p2.first()) {
            let mut s = m.clone();
            s.p2[0] = *a;
            push(&mut out, "K-1.1", format!("#{k}: P2 reuses id {a}"), s, None);
        }
        let mut s = m.clone();
        s.free_generators.push(AtomSet::empty(m.atoms() + 1));
        push(&mut out, "K-1.2", format!("#{k}: element of the wrong width"), s, None);
        let mut s = m.clone();
        s.p0.push(m.next_fresh_id());
        s.g1.push(m.atoms());
        push(&mut out, "K-1.3", format!("#{k}: G1 value outside P1"), s, None);

        // A free atom off the first tail becomes designated with no G1 preimage.
        let off_tail = m.free_part().iter().find(|x| m.f.iter().all(|row| row.last().and_then(|v| v.as_ref()).is_none_or(|v| !v.contains(*x))));
        if let Some(x) = off_tail {
            let mut s = m.clone();
            let mut d = m.b_star().clone();
            d.insert(x);
            s.algebra.set_designated(d);
            push(&mut out, "K-1.4", format!("#{k}: atom {x} designated, not hit by G1"), s, None);
        }
        for i in 0..m.p0.len() {
            let mut s = m.clone();
            s.p0.push(m.next_fresh_id());
            s.g1.push(m.g1[i]);
            push(&mut out, "K-1.5", format!("#{k}: second preimage of atom {}", m.g1[i]), s, None);
        }
        for c in 0..m.p2.len() {
            let mut s = m.clone();
            let v = m.f[c][0].clone();
            s.f[c].push(v);
            push(&mut out, "K-1.6", format!("#{k}: F_N({}) defined", m.p2[c]), s, None);
            for a in 0..m.p0.len() {
                let mut s = m.clone();
                for v in s.f[c].iter_mut().flatten() {
                    v.insert(m.g1[a]);
                }
                push(&mut out, "K-1.7", format!("#{k}: G1({}) below every F_n({})", m.p0[a], m.p2[c]), s, None);
            }
        }
        if !m.p2.is_empty() {
            if let Some(x) = m.free_part().first() {
                push(&mut out, "K-1.8", format!("#{k}: atom {x} split in two"), duplicate_atom(m, x), None);
            }
        }
    }
    out
}

fn spec(trunc_n: usize, designated: usize, base_cells: usize, n_star: usize, pre: Vec<Vec<PreValue>>) -> InstanceSpec {
    InstanceSpec {
        trunc_n,
        designated,
        base_cells,
        n_star,
        pre,
    }
}

/// Mutants of the witness clauses `K0.1` .. `K0.7`, each paired with the
/// witness it should be checked against.
pub fn k0_mutants(corpus: &[K1Structure]) -> Vec<Mutant> {
    let mut out = Vec::new();
    for (k, m) in corpus.iter().enumerate() {
        let Some(w) = find_witness(m) else { continue };
        if let Some(x) = m.free_part().first() {
            let mut w1 = w.clone();
            w1.b_star.insert(x);
            push(&mut out, "K0.1", format!("#{k}: b* grows by atom {x}"), m.clone(), Some(w1));
        }
        let mut w2 = w.clone();
        w2.chain.push(w.chain.last().unwrap().clone());
        push(&mut out, "K0.2", format!("#{k}: chain one too long"), m.clone(), Some(w2));
        for x in m.free_part().iter().take(2) {
            let mut s = duplicate_atom(m, x);
            s.free_generators.push(AtomSet::singleton(s.atoms(), m.atoms()));
            let ws = canonical_witness(&s, w.n_star);
            push(&mut out, "K0.4", format!("#{k}: extra generator splits atom {x}"), s, Some(ws));
        }
        for (c, row) in m.f.iter().enumerate() {
            for a in 0..m.p0.len() {
                let mut s = m.clone();
                let n = m.trunc_n - 1;
                s.f[c][n].as_mut().unwrap().insert(m.g1[a]);
                let ws = canonical_witness(&s, w.n_star);
                push(&mut out, "K0.6", format!("#{k}: G1({}) under F_{n}({})", m.p0[a], m.p2[c]), s, Some(ws));
            }
            let _ = row;
        }
        for i in 1..w.chain.len().saturating_sub(1) {
            if w.chain[i] != w.chain[i - 1] {
                let mut w7 = w.clone();
                w7.chain[i] = w.chain[i - 1].clone();
                push(&mut out, "K0.7", format!("#{k}: B_{} repeats B_{}", w.n_star + i, w.n_star + i - 1), m.clone(), Some(w7));
            }
        }
    }
    // Built directly: three base cells, and values below n* that miss the
    // free part or cover all of it.
    for trunc_n in [3, 4] {
        for designated in 0..=2usize {
            for t1 in 0..1u64 << designated {
                for t2 in 0..1u64 << designated {
                    let pre = vec![vec![PreValue { trace: t1, cells: 0b011 }], vec![PreValue { trace: t2, cells: 0b001 }]];
                    let s = spec(trunc_n, designated, 3, 1, pre).build();
                    let ws = canonical_witness(&s, 1);
                    push(&mut out, "K0.3", format!("N={trunc_n}, k={designated}: three free base cells"), s, Some(ws));
                }
            }
            for t in 0..1u64 << designated {
                for cells in [0, 1] {
                    if designated == 0 && cells == 0 {
                        continue;
                    }
                    let s = spec(trunc_n, designated, 1, 1, vec![vec![PreValue { trace: t, cells }]]).build();
                    let ws = canonical_witness(&s, 1);
                    push(&mut out, "K0.5", format!("N={trunc_n}, k={designated}: F_0(c) meets the free part in {cells}"), s, Some(ws));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::k1::corpus::{enumerate_corpus, CorpusBounds};
    use std::collections::BTreeMap;

    #[test]
    fn small_corpus_mutants_hit_their_clause() {
        let b = CorpusBounds {
            trunc_n: 3,
            max_p0: 2,
            max_p2: 2,
            max_n_star: 1,
            max_pre_values: 2,
        };
        let corpus: Vec<K1Structure> = enumerate_corpus(b).iter().map(InstanceSpec::build).collect();
        let mut per: BTreeMap<String, usize> = BTreeMap::new();
        for mu in kminus1_mutants(&corpus).into_iter().chain(k0_mutants(&corpus)) {
            assert!(mu.hits_exactly_target(), "{} ({}): fails {:?}", mu.target, mu.note, mu.failing());
            *per.entry(mu.target).or_default() += 1;
        }
        assert_eq!(per.len(), 15);
    }
}
