//! Finite shadows of the properties of the generic model: traces separate
//! elements, P1 is atomic, and traces are large.
//!
//! A cell of a small substructure A is *open* when A stays in the class
//! after adding a new element of P0 whose atom lies under that cell. Only
//! open cells can be separated by richness at a finite stage; cells inside
//! a tail value cannot, since tails avoid P4.

use std::collections::BTreeSet;

use super::checks::ClauseReport;
use super::embed::generated_substructure;
use super::generic::K1Class;
use super::model::K1Structure;
use crate::bitset::AtomSet;
use crate::boolean_algebra::FiniteBooleanAlgebra;
use crate::fraisse::AmalgamationClass;
use crate::structure::ElemId;

/// `a` with atom `gamma` split in two, the new half designated and named
/// by a new element of P0.
pub fn with_atom_under(a: &K1Structure, gamma: usize) -> K1Structure {
    let n = a.atoms();
    let widen = |s: &AtomSet| {
        let mut t = AtomSet::from_indices(n + 1, s.iter());
        if s.contains(gamma) {
            t.insert(n);
        }
        t
    };
    let mut designated = AtomSet::from_indices(n + 1, a.b_star().iter());
    designated.insert(n);
    let mut out = a.clone();
    out.algebra = FiniteBooleanAlgebra::with_designated(n + 1, designated);
    out.f = a.f.iter().map(|row| row.iter().map(|v| v.as_ref().map(widen)).collect()).collect();
    out.free_generators = a.free_generators.iter().map(widen).collect();
    out.p0.push(a.next_fresh_id());
    out.g1.push(n);
    out
}

pub fn open_cells(class: &K1Class, a: &K1Structure) -> Vec<usize> {
    a.free_part().iter().filter(|g| class.is_member(&with_atom_under(a, *g))).collect()
}

fn id_subsets(ids: &[ElemId], max: usize) -> Vec<BTreeSet<ElemId>> {
    let mut out = vec![BTreeSet::new()];
    for x in ids {
        let more: Vec<BTreeSet<ElemId>> = out.iter().filter(|s| s.len() < max).map(|s| s.iter().copied().chain([*x]).collect()).collect();
        out.extend(more);
    }
    out
}

/// Checks the three shadows on the substructures of `m` generated by ids
/// from `core` with size below `bound`. `floor` is the least trace size
/// required of an open cell and of its complement.
pub fn nonoise_check(class: &K1Class, m: &K1Structure, core: &BTreeSet<ElemId>, bound: usize, floor: usize) -> ClauseReport {
    let mut r = ClauseReport::default();
    let ids: Vec<ElemId> = core.iter().copied().filter(|x| m.p0.contains(x) || m.p2.contains(x)).collect();
    let mut c1 = None;
    let mut c3 = None;
    for s in id_subsets(&ids, bound) {
        let (s0, s2): (BTreeSet<ElemId>, BTreeSet<ElemId>) = s.iter().partition(|x| m.p0.contains(x));
        let (a, incl) = generated_substructure(m, &s0, &s2);
        if a.size() >= bound || !class.is_member(&a) {
            continue;
        }
        for g in open_cells(class, &a) {
            let image = incl.apply(&AtomSet::singleton(a.atoms(), g));
            let inside = m.trace(&image).len();
            // The complement is only required to have a large trace when it
            // lies outside P4 itself.
            let rest = image.complement();
            let outside = if m.in_p4(&rest) { floor } else { m.trace(&rest).len() };
            if c1.is_none() && inside == 0 {
                c1 = Some(format!("cell {g} of the substructure on {s:?} has the same trace as 0"));
            }
            if c3.is_none() && (inside < floor || outside < floor) {
                c3 = Some(format!("cell {g} of the substructure on {s:?}: traces {inside} and {outside}, floor {floor}"));
            }
        }
    }
    r.push("nonoise.i", c1);
    let shape = m.algebra.designated().len() != m.atoms() || m.f.iter().flatten().flatten().any(|v| v.len() != m.atoms());
    r.push("nonoise.ii", shape.then(|| "element of the wrong width".into()));
    r.push("nonoise.iii", c3);
    r
}
