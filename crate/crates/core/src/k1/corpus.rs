//! Explicit finite members: P4 atoms, a free base of `m` cells carrying
//! the values `F_n(c)` for `n < n*`, and fresh independent tails for
//! `n* ≤ n < N`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::checks::find_witness;
use super::model::K1Structure;
use crate::bitset::AtomSet;
use crate::boolean_algebra::FiniteBooleanAlgebra;
use crate::structure::ElemId;

/// A value below `n*`: the designated atoms under it and the base cells
/// under it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PreValue {
    pub trace: u64,
    pub cells: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub trunc_n: usize,
    pub designated: usize,
    pub base_cells: usize,
    pub n_star: usize,
    /// `pre[c][n]` for `n < n_star`.
    pub pre: Vec<Vec<PreValue>>,
}

impl InstanceSpec {
    pub fn tails(&self) -> usize {
        self.pre.len() * (self.trunc_n - self.n_star)
    }

    pub fn atom_count(&self) -> usize {
        self.designated + (self.base_cells << self.tails())
    }

    /// P0 gets ids `0..k`, P2 gets `k..k+q`. Free atom `k + cell·2^T + p`
    /// lies under tail `t` iff bit `t` of `p` is set.
    pub fn build(&self) -> K1Structure {
        let k = self.designated;
        let t = self.tails();
        let atoms = self.atom_count();
        let per_cell = 1usize << t;
        let algebra = FiniteBooleanAlgebra::with_designated(atoms, AtomSet::from_indices(atoms, 0..k));
        let tail_value = |ti: usize| AtomSet::from_indices(atoms, (0..self.base_cells * per_cell).filter(|j| j >> ti & 1 == 1).map(|j| k + (j / per_cell) * per_cell + j % per_cell));
        let pre_value = |v: &PreValue| {
            let mut s = AtomSet::from_indices(atoms, (0..k).filter(|a| v.trace >> a & 1 == 1));
            for cell in (0..self.base_cells).filter(|c| v.cells >> c & 1 == 1) {
                for p in 0..per_cell {
                    s.insert(k + cell * per_cell + p);
                }
            }
            s
        };
        let width = self.trunc_n - self.n_star;
        let f = self
            .pre
            .iter()
            .enumerate()
            .map(|(c, row)| {
                let mut vals: Vec<Option<AtomSet>> = row.iter().map(|v| Some(pre_value(v))).collect();
                vals.extend((0..width).map(|n| Some(tail_value(c * width + n))));
                vals
            })
            .collect();
        K1Structure {
            trunc_n: self.trunc_n,
            p0: (0..k as ElemId).collect(),
            p2: (k as ElemId..(k + self.pre.len()) as ElemId).collect(),
            algebra,
            g1: (0..k).collect(),
            f,
            free_generators: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusBounds {
    pub trunc_n: usize,
    pub max_p0: usize,
    pub max_p2: usize,
    pub max_n_star: usize,
    /// Bound on the number of values below `n*` (`|P2|·n*`).
    pub max_pre_values: usize,
}

impl CorpusBounds {
    pub fn standard() -> Self {
        Self {
            trunc_n: 6,
            max_p0: 3,
            max_p2: 2,
            max_n_star: 2,
            max_pre_values: 2,
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn permute_mask(mask: u64, perm: &[usize]) -> u64 {
    perm.iter().enumerate().fold(0, |acc, (i, j)| acc | ((mask >> i & 1) << j))
}

/// Least image of the table under relabelling P0, base cells and P2.
fn canonical_key(pre: &[Vec<PreValue>], k_perms: &[Vec<usize>], m_perms: &[Vec<usize>], q_perms: &[Vec<usize>]) -> Vec<Vec<PreValue>> {
    let mut best: Option<Vec<Vec<PreValue>>> = None;
    for sk in k_perms {
        for sm in m_perms {
            for sq in q_perms {
                let mut t = vec![Vec::new(); pre.len()];
                for (c, row) in pre.iter().enumerate() {
                    t[sq[c]] = row
                        .iter()
                        .map(|v| PreValue {
                            trace: permute_mask(v.trace, sk),
                            cells: permute_mask(v.cells, sm),
                        })
                        .collect();
                }
                if best.as_ref().is_none_or(|b| t < *b) {
                    best = Some(t);
                }
            }
        }
    }
    best.unwrap_or_default()
}

/// Cheap necessary conditions on a table: the values below `n*` separate
/// the base cells, and for each c they realise every sign pattern on them.
fn plausible(pre: &[Vec<PreValue>], m: usize) -> bool {
    let mut sig = vec![0u64; m];
    let mut bit = 0;
    for row in pre {
        let mut seen = BTreeSet::new();
        for (cell, s) in sig.iter_mut().enumerate() {
            let mut p = 0u64;
            for (i, v) in row.iter().enumerate() {
                p |= (v.cells >> cell & 1) << i;
            }
            seen.insert(p);
            *s |= p << bit;
        }
        if seen.len() != 1 << row.len() {
            return false;
        }
        bit += row.len();
    }
    sig.iter().collect::<BTreeSet<_>>().len() == m
}

/// Every member within `b` up to isomorphism, each built in its least-`n*`
/// form, in a fixed order.
pub fn enumerate_corpus(b: CorpusBounds) -> Vec<InstanceSpec> {
    enumerate_corpus_sized(b, usize::MAX)
}

/// As [`enumerate_corpus`], keeping only members of size at most `max_size`.
pub fn enumerate_corpus_sized(b: CorpusBounds, max_size: usize) -> Vec<InstanceSpec> {
    let mut out = Vec::new();
    for k in 0..=b.max_p0 {
        let k_perms = permutations(k);
        for q in 0..=b.max_p2 {
            let q_perms = permutations(q);
            for n_star in 0..=b.max_n_star.min(b.trunc_n) {
                if (q == 0 && n_star > 0) || q * n_star > b.max_pre_values {
                    continue;
                }
                for j in 0..=(q * n_star).min(2) {
                    if k + q + j + q * (b.trunc_n - n_star) > max_size {
                        continue;
                    }
                    let m = 1usize << j;
                    let m_perms = permutations(m);
                    let choices: Vec<PreValue> = (0..1u64 << k)
                        .flat_map(|trace| (0..1u64 << m).map(move |cells| PreValue { trace, cells }))
                        .collect();
                    let slots = q * n_star;
                    let mut seen = BTreeSet::new();
                    let total = choices.len().pow(slots as u32);
                    for code in 0..total {
                        let mut rest = code;
                        let mut flat = Vec::with_capacity(slots);
                        for _ in 0..slots {
                            flat.push(choices[rest % choices.len()].clone());
                            rest /= choices.len();
                        }
                        let pre: Vec<Vec<PreValue>> = flat.chunks(n_star.max(1)).map(|c| c.to_vec()).take(q).collect();
                        let pre = if n_star == 0 { vec![Vec::new(); q] } else { pre };
                        if !plausible(&pre, m) {
                            continue;
                        }
                        if !seen.insert(canonical_key(&pre, &k_perms, &m_perms, &q_perms)) {
                            continue;
                        }
                        let spec = InstanceSpec {
                            trunc_n: b.trunc_n,
                            designated: k,
                            base_cells: m,
                            n_star,
                            pre,
                        };
                        let s = spec.build();
                        if super::checks::check_kminus1(&s).passed() && find_witness(&s).is_some_and(|w| w.n_star == n_star) {
                            out.push(spec);
                        }
                    }
                }
            }
        }
    }
    out
}
