//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod ba;

use std::collections::{BTreeMap, BTreeSet};

use finmodel::bitset::AtomSet;
use finmodel::boolean_algebra::FiniteBooleanAlgebra;
use finmodel::structure::ElemId;
use finmodel::k1::{induced_embedding, inclusion, is_k1_member, K1Structure};

/// Every disjoint amalgam of `m1 ⊇ n1 ⊆ n2` in the class whose P1 is
/// generated by the two images, one per set of realized atom pairs.
///
/// An atom of such an amalgam is determined by the atoms `(α, β)` of `m1`
/// and `n2` it lies under, and the two must sit over the same atom of
/// `n1`. So the candidates are the sets of compatible pairs covering both
/// sides. Returns `None` when there are more than `max_pairs` pairs.
pub fn k1_completions(m1: &K1Structure, n1: &K1Structure, n2: &K1Structure, max_pairs: usize) -> Option<Vec<K1Structure>> {
    let e1 = inclusion(n1, m1)?;
    let e2 = inclusion(n1, n2)?;
    assert!(n2.free_generators.len() == n1.free_generators.len());
    let mut options: Vec<Vec<usize>> = Vec::new();
    for alpha in 0..m1.atoms() {
        let gamma = e1.p1.atom_under(alpha);
        options.push((0..n2.atoms()).filter(|b| e2.p1.atom_under(*b) == gamma).collect());
    }
    if options.iter().map(Vec::len).sum::<usize>() > max_pairs {
        return None;
    }
    let mut out = Vec::new();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    choose(m1, n1, n2, &options, 0, &mut chosen, &mut out);
    Some(out)
}

fn choose(m1: &K1Structure, n1: &K1Structure, n2: &K1Structure, options: &[Vec<usize>], alpha: usize, chosen: &mut Vec<(usize, usize)>, out: &mut Vec<K1Structure>) {
    if alpha == options.len() {
        if let Some(m) = candidate(m1, n1, n2, chosen) {
            out.push(m);
        }
        return;
    }
    let opts = &options[alpha];
    for mask in 1u32..1 << opts.len() {
        if m1.b_star().contains(alpha) && mask.count_ones() != 1 {
            continue;
        }
        let before = chosen.len();
        chosen.extend(opts.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, b)| (alpha, *b)));
        choose(m1, n1, n2, options, alpha + 1, chosen, out);
        chosen.truncate(before);
    }
}

fn candidate(m1: &K1Structure, n1: &K1Structure, n2: &K1Structure, pairs: &[(usize, usize)]) -> Option<K1Structure> {
    for beta in 0..n2.atoms() {
        let hits = pairs.iter().filter(|p| p.1 == beta).count();
        if hits == 0 || (n2.b_star().contains(beta) && hits != 1) {
            return None;
        }
    }
    let atoms = pairs.len();
    let from_m1 = |x: &AtomSet| AtomSet::from_indices(atoms, (0..atoms).filter(|t| x.contains(pairs[*t].0)));
    let from_n2 = |x: &AtomSet| AtomSet::from_indices(atoms, (0..atoms).filter(|t| x.contains(pairs[*t].1)));
    let designated = AtomSet::from_indices(atoms, (0..atoms).filter(|t| m1.b_star().contains(pairs[*t].0) || n2.b_star().contains(pairs[*t].1)));
    let n1_ids = n1.ids();
    let mut next = m1.next_fresh_id().max(n2.next_fresh_id());
    let mut rename: BTreeMap<ElemId, ElemId> = n1_ids.iter().map(|x| (*x, *x)).collect();
    for x in n2.p0.iter().chain(&n2.p2).filter(|x| !n1_ids.contains(x)) {
        rename.insert(*x, next);
        next += 1;
    }
    let single = |s: AtomSet| (s.count() == 1).then(|| s.first().unwrap());
    let mut m = K1Structure {
        trunc_n: m1.trunc_n,
        p0: m1.p0.clone(),
        p2: m1.p2.clone(),
        algebra: FiniteBooleanAlgebra::with_designated(atoms, designated),
        g1: Vec::new(),
        f: m1.f.iter().map(|row| row.iter().map(|v| v.as_ref().map(from_m1)).collect()).collect(),
        free_generators: m1.free_generators.iter().map(from_m1).collect(),
    };
    for i in 0..m1.p0.len() {
        m.g1.push(single(from_m1(&m1.g1_element(i)))?);
    }
    for (i, x) in n2.p0.iter().enumerate().filter(|(_, x)| !n1_ids.contains(x)) {
        m.p0.push(rename[x]);
        m.g1.push(single(from_n2(&n2.g1_element(i)))?);
    }
    for (c, x) in n2.p2.iter().enumerate().filter(|(_, x)| !n1_ids.contains(x)) {
        m.p2.push(rename[x]);
        m.f.push(n2.f[c].iter().map(|v| v.as_ref().map(from_n2)).collect());
    }

    let ids = |s: &K1Structure, p0: bool| -> BTreeMap<ElemId, ElemId> { (if p0 { &s.p0 } else { &s.p2 }).iter().map(|x| (*x, *rename.get(x).unwrap_or(x))).collect() };
    let e = induced_embedding(m1, &m, &m1.p0.iter().map(|x| (*x, *x)).collect(), &m1.p2.iter().map(|x| (*x, *x)).collect())?;
    let f = induced_embedding(n2, &m, &ids(n2, true), &ids(n2, false))?;
    let projected_m1 = (0..m1.atoms()).all(|a| e.p1.images[a] == from_m1(&AtomSet::singleton(m1.atoms(), a)));
    let projected_n2 = (0..n2.atoms()).all(|b| f.p1.images[b] == from_n2(&AtomSet::singleton(n2.atoms(), b)));
    if !projected_m1 || !projected_n2 {
        return None;
    }
    if e.p1.range().meet(&f.p1.range()).cell_count() != n1.atoms() {
        return None;
    }
    is_k1_member(&m).then_some(m)
}

fn subsets(ids: &[ElemId]) -> Vec<std::collections::BTreeSet<ElemId>> {
    (0..1u32 << ids.len()).map(|m| ids.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| *x).collect()).collect()
}

/// Triples `(M1, N1, N2)` with `N1 ⊆ M1` and `N1 ⊆ N2`, all members: two
/// generated substructures of one corpus member over their meet, and pairs
/// of corpus members over the minimal structure.
pub fn k1_triples(corpus: &[K1Structure], max_m1_atoms: usize) -> Vec<(K1Structure, K1Structure, K1Structure)> {
    use finmodel::k1::generated_substructure;
    let mut out = Vec::new();
    for m in corpus {
        let ids: Vec<ElemId> = m.ids().into_iter().collect();
        let all = subsets(&ids);
        let sub = |s: &std::collections::BTreeSet<ElemId>| {
            let (s0, s2): (std::collections::BTreeSet<ElemId>, _) = s.iter().partition(|x| m.p0.contains(x));
            generated_substructure(m, &s0, &s2).0
        };
        for a in &all {
            for b in &all {
                let c = a.intersection(b).copied().collect();
                let (sa, sb, sc) = (sub(a), sub(b), sub(&c));
                if sa.atoms() <= max_m1_atoms && [&sa, &sb, &sc].iter().all(|s| is_k1_member(s)) && inclusion(&sc, &sa).is_some() && inclusion(&sc, &sb).is_some() {
                    out.push((sa, sc, sb));
                }
            }
        }
    }
    if let Some(first) = corpus.first() {
        let min = K1Structure::minimal(first.trunc_n);
        for m1 in corpus.iter().filter(|m| m.atoms() <= max_m1_atoms) {
            for n2 in corpus.iter().filter(|m| m.atoms() <= 4) {
                out.push((m1.clone(), min.clone(), n2.clone()));
            }
        }
    }
    out
}

use finmodel::kdim::{KConfiguration, KrStructure};

/// Closure by naive fixpoint over all tuples and function symbols.
fn kr_closure(m: &KrStructure, x: &BTreeSet<u32>) -> BTreeSet<u32> {
    let mut c = x.clone();
    loop {
        let before = c.len();
        let elems: Vec<u32> = c.iter().copied().collect();
        for t in finmodel::structure::tuples(&elems, m.r + 1) {
            for f in 0..m.trunc_n {
                if let Some(v) = m.structure.apply(f, &t) {
                    c.insert(v);
                }
            }
        }
        if c.len() == before {
            return c;
        }
    }
}

/// Membership straight from the three conditions, checking every subset.
pub fn kr_member_oracle(m: &KrStructure) -> bool {
    let u: Vec<u32> = m.universe().to_vec();
    for t in finmodel::structure::tuples(&u, m.r + 1) {
        let classes: Vec<usize> = (0..m.trunc_n).filter(|n| m.structure.holds(*n, &t)).collect();
        if classes.len() != 1 {
            return false;
        }
        if (0..m.trunc_n).any(|f| m.structure.apply(f, &t).is_none_or(|v| !u.contains(&v) || (f >= classes[0] && v != t[0]))) {
            return false;
        }
    }
    for mask in 0u32..1 << u.len() {
        if mask.count_ones() as usize != m.r + 2 {
            continue;
        }
        let y: BTreeSet<u32> = (0..u.len()).filter(|i| mask >> i & 1 == 1).map(|i| u[i]).collect();
        let independent = y.iter().all(|e| {
            let mut rest = y.clone();
            rest.remove(e);
            !kr_closure(m, &rest).contains(e)
        });
        if independent {
            return false;
        }
    }
    true
}

/// Every member on the union of the parts that restricts to each part.
/// Tuples inside a part are copied; the others range over all classes and
/// all values in the union.
pub fn kr_completions(config: &KConfiguration) -> Vec<KrStructure> {
    let first = &config.parts[0];
    let (r, n) = (first.r, first.trunc_n);
    let union: Vec<u32> = config.parts.iter().flat_map(|m| m.universe().iter().copied()).collect::<BTreeSet<_>>().into_iter().collect();
    assert!(union.len() <= 5, "oracle limited to 5 elements");
    let mut base = KrStructure::with_universe(r, n, union.iter().copied());
    let mut free = Vec::new();
    for t in finmodel::structure::tuples(&union, r + 1) {
        match config.parts.iter().find(|m| t.iter().all(|e| m.structure.contains(*e))) {
            Some(m) => {
                for f in 0..n {
                    base.structure.set_relation(f, t.clone(), m.structure.holds(f, &t));
                    base.structure.set_function(f, t.clone(), m.structure.apply(f, &t));
                }
            }
            None => free.push(t),
        }
    }
    // all (class, values) for one tuple
    let mut opts: Vec<(usize, Vec<u32>)> = Vec::new();
    for c in 0..n {
        let mut vals: Vec<Vec<u32>> = vec![Vec::new()];
        for _ in 0..c {
            vals = vals.iter().flat_map(|v| union.iter().map(move |e| [v.clone(), vec![*e]].concat())).collect();
        }
        opts.extend(vals.into_iter().map(|v| (c, v)));
    }
    let mut out = Vec::new();
    let total = opts.len().pow(free.len() as u32);
    for code in 0..total {
        let mut s = base.clone();
        let mut rest = code;
        for t in &free {
            let (c, v) = &opts[rest % opts.len()];
            rest /= opts.len();
            for f in 0..n {
                s.structure.set_relation(f, t.clone(), f == *c);
                s.structure.set_function(f, t.clone(), Some(if f < *c { v[f] } else { t[0] }));
            }
        }
        let restricts = config.parts.iter().all(|m| s.induced(&m.universe().iter().copied().collect()) == *m);
        if restricts && kr_member_oracle(&s) {
            out.push(s);
        }
    }
    out
}
