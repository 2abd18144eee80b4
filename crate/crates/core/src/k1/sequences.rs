//! Trace elements, good sequences along a chain of free extensions, and
//! their labelling by one new element of P2.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::corpus::InstanceSpec;
use super::checks::{check_kminus1, find_witness, ClauseReport};
use super::embed::inclusion;
use super::free::{check_free_extension, FreeExtensionWitness};
use super::model::K1Structure;
use super::K1Error;
use crate::bitset::AtomSet;
use crate::boolean_algebra::{generated_with_ideal, independent_over, rebase_with_element, FiniteBooleanAlgebra, PrincipalIdeal};
use crate::structure::ElemId;

/// Splits every atom outside b* into `2^bits` pieces. Returns the new
/// structure and, for each bit, the join of the pieces with that bit set;
/// these are independent over the old P1 modulo P4.
fn split_free_atoms(m: &K1Structure, bits: usize) -> (K1Structure, Vec<AtomSet>) {
    let n = m.atoms();
    let free: Vec<usize> = m.free_part().iter().collect();
    let extra = (1usize << bits) - 1;
    let atoms = n + free.len() * extra;
    // piece p > 0 of free atom free[r] is n + r·extra + p - 1.
    let mut rank = vec![None; n];
    for (r, t) in free.iter().enumerate() {
        rank[*t] = Some(r);
    }
    let pieces = |t: usize| rank[t].into_iter().flat_map(move |r| (1..=extra).map(move |p| n + r * extra + p - 1));
    let widen = |s: &AtomSet| AtomSet::from_indices(atoms, s.iter().chain(s.iter().flat_map(pieces)));
    let mut out = m.clone();
    out.algebra = FiniteBooleanAlgebra::with_designated(atoms, widen(m.b_star()));
    out.f = m.f.iter().map(|row| row.iter().map(|v| v.as_ref().map(widen)).collect()).collect();
    out.free_generators = m.free_generators.iter().map(widen).collect();
    let halves = (0..bits)
        .map(|i| AtomSet::from_indices(atoms, (0..free.len()).flat_map(|r| (1..=extra).filter(move |p| p >> i & 1 == 1).map(move |p| n + r * extra + p - 1))))
        .collect();
    (out, halves)
}

/// `N ⊇ M` with one new generator `b` of trace `u`, free from `P1^M` over
/// P4. P0 and P2 are unchanged; `b` is added to X.
pub fn adjoin_trace_element(m: &K1Structure, u: &BTreeSet<ElemId>) -> Result<(K1Structure, AtomSet, FreeExtensionWitness), K1Error> {
    let idx: Vec<usize> = u.iter().map(|a| m.p0_index(*a).ok_or_else(|| K1Error::ConstructionFailed(format!("{a} is not in P0")))).collect::<Result<_, _>>()?;
    let (mut n, mut halves) = split_free_atoms(m, 1);
    let mut b = halves.pop().unwrap();
    for i in idx {
        b.insert(n.g1[i]);
    }
    n.free_generators.push(b.clone());
    let w = FreeExtensionWitness {
        i: vec![b.clone()],
        ..Default::default()
    };
    Ok((n, b, w))
}

/// A start for [`build_good_chain`]: `designated` atoms in P4 and a free
/// part of dimension `N - 1`, spanned by the extra generators X.
pub fn good_seed(trunc_n: usize, designated: usize) -> K1Structure {
    let base = InstanceSpec {
        trunc_n,
        designated,
        base_cells: 1,
        n_star: 0,
        pre: Vec::new(),
    }
    .build();
    let (mut m, coords) = split_free_atoms(&base, trunc_n.saturating_sub(1));
    m.free_generators = coords;
    m
}

/// `N ⊇ M` with a new element c of P2: `F_n(c)` is the n-th element of X
/// for `n < N - 1`, and `F_{N-1}(c)` is a fresh tail free from `P1^M`.
pub fn adjoin_tail_element(m: &K1Structure) -> Result<(K1Structure, ElemId, FreeExtensionWitness), K1Error> {
    let last = m.trunc_n.saturating_sub(1);
    if m.free_generators.len() < last {
        return Err(K1Error::PreconditionFailed(format!("X has {} elements, need {last}", m.free_generators.len())));
    }
    let (mut n, mut tail) = split_free_atoms(m, 1);
    let tail = tail.pop().unwrap();
    let c = m.next_fresh_id();
    let mut row: Vec<Option<AtomSet>> = n.free_generators[..last].iter().cloned().map(Some).collect();
    row.push(Some(tail.clone()));
    n.p2.push(c);
    n.f.push(row);
    let w = FreeExtensionWitness {
        i: vec![tail],
        h: BTreeMap::from([(c, last)]),
        declared_collisions: Vec::new(),
    };
    Ok((n, c, w))
}

/// A chain `N_0 ⊆ .. ⊆ N_k` with witnesses and the sequence `b_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodChain {
    pub chain: Vec<K1Structure>,
    pub witnesses: Vec<FreeExtensionWitness>,
    pub b: Vec<AtomSet>,
}

/// Builds one link per trace: `surplus` new tail elements, then `b_n` of
/// trace `traces[n]`. The link witness lists the part of `b_n` outside P4,
/// not `b_n` itself, so labelling has to rebase.
pub fn build_good_chain(n0: &K1Structure, traces: &[BTreeSet<ElemId>], surplus: usize) -> Result<GoodChain, K1Error> {
    let mut chain = vec![n0.clone()];
    let mut witnesses = Vec::new();
    let mut bs = Vec::new();
    for u in traces {
        let mut m = chain.last().unwrap().clone();
        let mut i = Vec::new();
        let mut h = BTreeMap::new();
        for _ in 0..surplus {
            let (next, c, w) = adjoin_tail_element(&m)?;
            i = i.iter().map(|y: &AtomSet| widen_like(&m, &next, y)).collect();
            i.extend(w.i);
            h.insert(c, w.h[&c]);
            m = next;
        }
        let (next, b, _) = adjoin_trace_element(&m, u)?;
        i = i.iter().map(|y| widen_like(&m, &next, y)).collect();
        i.push(b.minus(next.b_star()));
        witnesses.push(FreeExtensionWitness {
            i,
            h,
            declared_collisions: Vec::new(),
        });
        bs.push(b);
        chain.push(next);
    }
    Ok(GoodChain { chain, witnesses, b: bs })
}

/// The image of `y` under the inclusion of `small` into `big`.
fn widen_like(small: &K1Structure, big: &K1Structure, y: &AtomSet) -> AtomSet {
    inclusion(small, big).expect("chain link is an inclusion").apply(y)
}

/// Clauses `good.link` (each witness passes), `good.a` (at least `surplus`
/// new elements of P2 per link), `good.b` (`b_n ∈ P1^{N_{n+1}}` is free
/// from `P1^{N_n}` over P4) and `good.c` (`a ∈ P0^{N_i}` is outside
/// `R(N_{n+1}, b_n)` for `n ≥ i + slack`).
pub fn check_good_sequence(g: &GoodChain, surplus: usize, slack: usize) -> ClauseReport {
    let mut r = ClauseReport::default();
    let k = g.b.len();
    if g.chain.len() != k + 1 || g.witnesses.len() != k {
        r.push("good.link", Some(format!("{} structures, {} witnesses, {} elements", g.chain.len(), g.witnesses.len(), k)));
        return r;
    }
    let bad_link = (0..k).find(|n| !check_free_extension(&g.chain[*n], &g.chain[n + 1], &g.witnesses[*n]).passed());
    r.push("good.link", bad_link.map(|n| format!("link {n} is not a free extension")));
    if bad_link.is_some() {
        return r;
    }
    let thin = (0..k).find(|n| {
        let old: BTreeSet<ElemId> = g.chain[*n].p2.iter().copied().collect();
        g.chain[n + 1].p2.iter().filter(|c| !old.contains(c)).count() < surplus
    });
    r.push("good.a", thin.map(|n| format!("link {n} adds fewer than {surplus} elements to P2")));
    let mut c2 = None;
    for n in 0..k {
        let big = &g.chain[n + 1];
        if g.b[n].len() != big.atoms() {
            c2 = Some(format!("b_{n} is not an element of N_{}", n + 1));
            break;
        }
        let range = inclusion(&g.chain[n], big).expect("checked above").p1.range();
        if !independent_over(&range, std::slice::from_ref(&g.b[n]), &PrincipalIdeal::new(big.b_star().clone())) {
            c2 = Some(format!("b_{n} is not free from N_{n}"));
            break;
        }
    }
    r.push("good.b", c2);
    let mut c3 = None;
    'outer: for i in 0..=k {
        for a in &g.chain[i].p0 {
            for n in (i + slack)..k {
                let big = &g.chain[n + 1];
                let ai = big.p0_index(*a).expect("P0 grows along the chain");
                if g.b[n].len() == big.atoms() && big.r(ai, &g.b[n]) {
                    c3 = Some(format!("{a} ∈ R(N_{}, b_{n})", n + 1));
                    break 'outer;
                }
            }
        }
    }
    r.push("good.c", c3);
    r
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSequence {
    pub structure: K1Structure,
    pub c: ElemId,
    /// Rebased witnesses `(I'_n, H'_n)`, each containing `b_n`.
    pub witnesses: Vec<FreeExtensionWitness>,
}

/// Rebases each link so that its witness contains `b_n`, then adds a new
/// element c with `F_n(c) = b_n`. Needs as many links as function symbols.
pub fn label_good_sequence(g: &GoodChain, surplus: usize, slack: usize) -> Result<LabeledSequence, K1Error> {
    let report = check_good_sequence(g, surplus, slack);
    if !report.passed() {
        return Err(K1Error::PreconditionFailed(report.failing().join(", ")));
    }
    let last = g.chain.last().unwrap();
    if g.b.len() != last.trunc_n {
        return Err(K1Error::PreconditionFailed(format!("{} elements for N = {}", g.b.len(), last.trunc_n)));
    }
    let mut rebased = Vec::new();
    for (n, w) in g.witnesses.iter().enumerate() {
        let (small, big) = (&g.chain[n], &g.chain[n + 1]);
        let ideal = PrincipalIdeal::new(big.b_star().clone());
        let b = &g.b[n];
        // J': a least subset of I_n whose span with P4 contains b_n.
        let j_prime = least_spanning_subset(&w.i, b, &ideal, big.atoms()).ok_or_else(|| K1Error::PreconditionFailed(format!("b_{n} is not in the span of I_{n} and P4")))?;
        // J'': one value of each new element of P2.
        let old: BTreeSet<ElemId> = small.p2.iter().copied().collect();
        let fresh: Vec<ElemId> = big.p2.iter().copied().filter(|c| !old.contains(c)).collect();
        if fresh.len() < surplus {
            return Err(K1Error::HarvestFailed(n));
        }
        let mut j: Vec<AtomSet> = j_prime;
        for c in &fresh {
            let ci = big.p2_index(*c).unwrap();
            let v = big.f_value(ci, w.h[c]).cloned().ok_or(K1Error::HarvestFailed(n))?;
            if !j.contains(&v) {
                j.push(v);
            }
        }
        let range = inclusion(small, big).ok_or(K1Error::NotSubstructure)?.p1.range();
        let j_star = rebase_with_element(&big.algebra, &range, &ideal, &j, b).map_err(|e| K1Error::ConstructionFailed(format!("link {n}: {e}")))?;
        let mut i: Vec<AtomSet> = w.i.iter().filter(|y| !j.contains(y)).cloned().collect();
        i.extend(j_star.iter().cloned());
        // Values moved out of I push H past them.
        let mut h = w.h.clone();
        for (c, hc) in h.iter_mut() {
            let ci = big.p2_index(*c).unwrap();
            if let Some(m) = (*hc..big.trunc_n).rev().find(|m| big.f_value(ci, *m).is_some_and(|v| !i.contains(v))) {
                *hc = m + 1;
            }
        }
        let w2 = FreeExtensionWitness {
            i,
            h,
            declared_collisions: w.declared_collisions.clone(),
        };
        let rep = check_free_extension(small, big, &w2);
        if !rep.passed() {
            return Err(K1Error::ConstructionFailed(format!("rebased link {n}: {}", rep.failing().join(", "))));
        }
        rebased.push(w2);
    }
    let mut out = last.clone();
    let c = last.next_fresh_id();
    let values: Vec<AtomSet> = g.b.iter().enumerate().map(|(n, b)| widen_like(&g.chain[n + 1], last, b)).collect();
    out.p2.push(c);
    out.f.push(values.into_iter().map(Some).collect());
    Ok(LabeledSequence {
        structure: out,
        c,
        witnesses: rebased,
    })
}

fn least_spanning_subset(i: &[AtomSet], b: &AtomSet, ideal: &PrincipalIdeal, atoms: usize) -> Option<Vec<AtomSet>> {
    if i.len() > 16 {
        return None;
    }
    let mut masks: Vec<u32> = (0..1u32 << i.len()).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks.into_iter().find_map(|m| {
        let j: Vec<AtomSet> = i.iter().enumerate().filter(|(t, _)| m >> t & 1 == 1).map(|(_, y)| y.clone()).collect();
        generated_with_ideal(atoms, &j, ideal).contains(b).then_some(j)
    })
}

/// The labelled structure is a member, and is free over every `N_n` with
/// the rebased witnesses from `n` on and `H(c) = n`.
pub fn check_labeled_sequence(g: &GoodChain, l: &LabeledSequence) -> ClauseReport {
    let mut r = ClauseReport::default();
    let s = &l.structure;
    let member = check_kminus1(s).passed() && find_witness(s).is_some();
    r.push("label.member", (!member).then(|| "the labelled structure is not a member".into()));
    let ci = s.p2_index(l.c);
    let values_ok = ci.is_some_and(|ci| g.b.iter().enumerate().all(|(n, b)| s.f_value(ci, n) == Some(&widen_like(&g.chain[n + 1], s, b))));
    r.push("label.values", (!values_ok).then(|| "F_n(c) differs from b_n".into()));
    let mut bad = None;
    let last = g.chain.last().unwrap();
    for n in 0..g.chain.len() {
        let mut w = FreeExtensionWitness::default();
        for (m, link) in l.witnesses.iter().enumerate().skip(n) {
            let e = inclusion(&g.chain[m + 1], last).expect("chain link");
            w.i.extend(link.i.iter().map(|y| e.apply(y)));
            w.h.extend(link.h.iter().map(|(k, v)| (*k, *v)));
            w.declared_collisions.extend(link.declared_collisions.iter().copied());
        }
        let e = inclusion(last, s).expect("labelled structure extends the union");
        w.i = w.i.iter().map(|y| e.apply(y)).collect();
        w.h.insert(l.c, n);
        let rep = check_free_extension(&g.chain[n], s, &w);
        if !rep.passed() {
            bad = Some(format!("not free over N_{n}: {}", rep.failing().join(", ")));
            break;
        }
    }
    r.push("label.free", bad);
    r
}
