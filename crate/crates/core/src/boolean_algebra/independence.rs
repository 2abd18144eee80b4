use std::collections::BTreeSet;

use super::{PrincipalIdeal, Subalgebra};
use crate::bitset::AtomSet;

/// Sign pattern of atom `a` over `ys`: bit `i` set iff `a ≤ ys[i]`.
fn pattern(ys: &[AtomSet], a: usize) -> u64 {
    ys.iter()
        .enumerate()
        .fold(0u64, |acc, (i, y)| acc | (u64::from(y.contains(a)) << i))
}

/// Is `ys` independent from `⟨xs⟩` modulo the principal ideal `I`?
///
/// Every nonzero polynomial is a join of minterms and every element of
/// `⟨xs⟩ − I` lies above an atom `α` of `⟨xs⟩` with `α ⊄ d`, so it is enough
/// that each minterm meets each such `α ∧ ¬d`; equivalently, all `2^|ys|`
/// sign patterns occur among the atoms of `α ∧ ¬d`.
pub fn is_independent_mod_ideal(atoms: usize, ys: &[AtomSet], xs: &[AtomSet], ideal: &PrincipalIdeal) -> bool {
    let base = Subalgebra::generated_by(atoms, xs);
    independent_over(&base, ys, ideal)
}

/// [`is_independent_mod_ideal`] with the base subalgebra given directly.
pub fn independent_over(base: &Subalgebra, ys: &[AtomSet], ideal: &PrincipalIdeal) -> bool {
    first_violation(base, ys, ideal).is_none()
}

/// A failing `(base cell, minterm sign pattern)` pair, if any.
pub fn first_violation(base: &Subalgebra, ys: &[AtomSet], ideal: &PrincipalIdeal) -> Option<(AtomSet, u64)> {
    let d = &ideal.generator;
    for cell in base.cells() {
        let live = cell.minus(d);
        if live.is_empty() {
            continue;
        }
        if ys.len() >= 64 {
            return Some((cell.clone(), 0));
        }
        let seen: BTreeSet<u64> = live.iter().map(|a| pattern(ys, a)).collect();
        // Patterns are below 2^|ys|, so the least missing one is too iff one is missing.
        let missing = (0u64..).find(|p| !seen.contains(p)).unwrap();
        if missing < 1u64 << ys.len() {
            return Some((cell.clone(), missing));
        }
    }
    None
}

/// The minterm `⋀ ys[i]^{ε_i}` for sign pattern `eps`.
pub fn minterm(atoms: usize, ys: &[AtomSet], eps: u64) -> AtomSet {
    let mut m = AtomSet::full(atoms);
    for (i, y) in ys.iter().enumerate() {
        m = if eps >> i & 1 == 1 { m.meet(y) } else { m.minus(y) };
    }
    m
}
