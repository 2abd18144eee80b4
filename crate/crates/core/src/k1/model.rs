use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bitset::AtomSet;
use crate::boolean_algebra::{FiniteBooleanAlgebra, Subalgebra};
use crate::structure::ElemId;

/// A finite structure in the Boolean-algebra-labelled class, truncated to
/// the first `trunc_n` function symbols `F_0 .. F_{N-1}`.
///
/// P1 is `algebra`; its designated atoms are the atoms lying in P4 (the
/// P4,1 elements). The remaining atoms represent the part of P1 outside
/// `b_star`. `R(a, b)` holds iff `G1(a) ≤ b`, so R is never stored.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1Structure {
    pub trunc_n: usize,
    pub p0: Vec<ElemId>,
    pub p2: Vec<ElemId>,
    pub algebra: FiniteBooleanAlgebra,
    /// `g1[i]` is the atom `G1(p0[i])`.
    pub g1: Vec<usize>,
    /// `f[c][n] = F_n(p2[c])`; `None` where undefined.
    pub f: Vec<Vec<Option<AtomSet>>>,
    /// The finite set X of extra generators (only for the wider class).
    #[serde(default)]
    pub free_generators: Vec<AtomSet>,
}

/// The data asserting membership in the finitely generated class: a start
/// index and the chain `B_{n*} ⊆ .. ⊆ B_N` of subalgebras.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K1Witness {
    pub n_star: usize,
    pub b_star: AtomSet,
    /// `chain[i] = B_{n_star + i}`.
    pub chain: Vec<Subalgebra>,
}

impl K1Structure {
    /// P0 = P2 = ∅ and P1 = {0, 1}.
    pub fn minimal(trunc_n: usize) -> Self {
        Self {
            trunc_n,
            p0: Vec::new(),
            p2: Vec::new(),
            algebra: FiniteBooleanAlgebra::new(1),
            g1: Vec::new(),
            f: Vec::new(),
            free_generators: Vec::new(),
        }
    }

    pub fn atoms(&self) -> usize {
        self.algebra.atom_count()
    }

    pub fn b_star(&self) -> &AtomSet {
        self.algebra.designated()
    }

    pub fn free_part(&self) -> AtomSet {
        self.b_star().complement()
    }

    pub fn in_p4(&self, x: &AtomSet) -> bool {
        x.is_subset(self.b_star())
    }

    pub fn g1_element(&self, i: usize) -> AtomSet {
        AtomSet::singleton(self.atoms(), self.g1[i])
    }

    pub fn p0_index(&self, id: ElemId) -> Option<usize> {
        self.p0.iter().position(|x| *x == id)
    }

    pub fn p2_index(&self, id: ElemId) -> Option<usize> {
        self.p2.iter().position(|x| *x == id)
    }

    pub fn f_value(&self, c: usize, n: usize) -> Option<&AtomSet> {
        self.f.get(c)?.get(n)?.as_ref()
    }

    /// `R(a, x)`.
    pub fn r(&self, a: usize, x: &AtomSet) -> bool {
        x.contains(self.g1[a])
    }

    /// `R(M, x)`, the trace of `x` on P0.
    pub fn trace(&self, x: &AtomSet) -> BTreeSet<ElemId> {
        (0..self.p0.len()).filter(|a| self.r(*a, x)).map(|a| self.p0[a]).collect()
    }

    pub fn ids(&self) -> BTreeSet<ElemId> {
        self.p0.iter().chain(&self.p2).copied().collect()
    }

    pub fn next_fresh_id(&self) -> ElemId {
        self.ids().last().map_or(0, |m| m + 1)
    }

    /// Generators of P1 over the sorts P0, P2: the G1 values, every defined
    /// F value, then X.
    pub fn generators(&self) -> Vec<AtomSet> {
        let mut out: Vec<AtomSet> = (0..self.p0.len()).map(|i| self.g1_element(i)).collect();
        out.extend(self.f.iter().flatten().flatten().cloned());
        out.extend(self.free_generators.iter().cloned());
        out
    }

    pub fn generated(&self) -> Subalgebra {
        Subalgebra::generated_by(self.atoms(), self.generators().iter())
    }

    /// log2 of the number of atoms outside `b_star`, if a power of two.
    pub fn free_dimension(&self) -> Option<usize> {
        let k = self.free_part().count();
        (k.is_power_of_two()).then(|| k.trailing_zeros() as usize)
    }

    /// `|P0| + |P2| + ⌈log2⌉` of the free part: the size measure used when
    /// enumerating the class up to a bound.
    pub fn size(&self) -> usize {
        let k = self.free_part().count().max(1);
        self.p0.len() + self.p2.len() + k.next_power_of_two().trailing_zeros() as usize
    }

    /// Values `F_n(c)` for `n < upto` and every c, in (c, n) order.
    pub fn values_below(&self, upto: usize) -> Vec<AtomSet> {
        self.f
            .iter()
            .flat_map(|row| row.iter().take(upto).flatten().cloned())
            .collect()
    }

    /// Values `F_n(c)` for `from ≤ n < N`, in (c, n) order.
    pub fn values_from(&self, from: usize) -> Vec<AtomSet> {
        self.f
            .iter()
            .flat_map(|row| row.iter().skip(from).flatten().cloned())
            .collect()
    }

    /// Renames P0 and P2 ids; ids absent from the map are kept.
    pub fn relabel(&self, rename: &std::collections::BTreeMap<ElemId, ElemId>) -> Self {
        let r = |e: &ElemId| *rename.get(e).unwrap_or(e);
        let mut out = self.clone();
        out.p0 = self.p0.iter().map(r).collect();
        out.p2 = self.p2.iter().map(r).collect();
        out
    }
}
