use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::KdimError;
use crate::k1::ClauseReport;
use crate::structure::{tuples, ElemId, FiniteStructure, Vocabulary, DEFAULT_CLOSURE_CAP};

/// A finite structure in the vocabulary with relations `R_n` and functions
/// `f_n` (`n < N`) on `(r+1)`-tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KrStructure {
    pub r: usize,
    pub trunc_n: usize,
    pub structure: FiniteStructure,
}

pub fn kr_vocabulary(r: usize, trunc_n: usize) -> Vocabulary {
    let mut v = Vocabulary::new();
    for n in 0..trunc_n {
        v = v.relation(&format!("R{n}"), r + 1);
    }
    for n in 0..trunc_n {
        v = v.function(&format!("f{n}"), r + 1);
    }
    v.index_bound = Some(trunc_n);
    v
}

impl KrStructure {
    pub fn empty(r: usize, trunc_n: usize) -> Self {
        Self {
            r,
            trunc_n,
            structure: FiniteStructure::empty(kr_vocabulary(r, trunc_n)),
        }
    }

    pub fn with_universe<I: IntoIterator<Item = ElemId>>(r: usize, trunc_n: usize, universe: I) -> Self {
        Self {
            r,
            trunc_n,
            structure: FiniteStructure::with_universe(kr_vocabulary(r, trunc_n), universe),
        }
    }

    pub fn universe(&self) -> &[ElemId] {
        self.structure.universe()
    }

    pub fn len(&self) -> usize {
        self.structure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.structure.is_empty()
    }

    pub fn tuples(&self) -> Vec<Vec<ElemId>> {
        tuples(self.universe(), self.r + 1)
    }

    /// Puts `t` in `R_class` only, with `f_m(t) = values[m]` for
    /// `m < class` and `f_m(t) = t_0` above.
    pub fn set_tuple(&mut self, t: &[ElemId], class: usize, values: &[ElemId]) {
        for n in 0..self.trunc_n {
            self.structure.set_relation(n, t.to_vec(), n == class);
            let v = if n < class { values[n] } else { t[0] };
            self.structure.set_function(n, t.to_vec(), Some(v));
        }
    }

    /// The indices n with `R_n(t)`.
    pub fn classes_of(&self, t: &[ElemId]) -> Vec<usize> {
        (0..self.trunc_n).filter(|n| self.structure.holds(*n, t)).collect()
    }

    /// `(class, f_0(t) .. f_{class-1}(t))`, if `t` lies in exactly one
    /// `R_n` and has every f value.
    pub fn tuple_data(&self, t: &[ElemId]) -> Option<(usize, Vec<ElemId>)> {
        let cs = self.classes_of(t);
        let [c] = cs[..] else { return None };
        let vals = (0..c).map(|m| self.structure.apply(m, t)).collect::<Option<Vec<_>>>()?;
        Some((c, vals))
    }

    pub fn closure(&self, x: &BTreeSet<ElemId>) -> Result<BTreeSet<ElemId>, KdimError> {
        Ok(self.structure.closure(x, DEFAULT_CLOSURE_CAP)?)
    }

    pub fn induced(&self, elems: &BTreeSet<ElemId>) -> KrStructure {
        Self {
            r: self.r,
            trunc_n: self.trunc_n,
            structure: self.structure.induced(elems),
        }
    }

    /// Every `y ∈ Y` lies outside the closure of `Y ∖ {y}`.
    pub fn is_independent(&self, y: &BTreeSet<ElemId>) -> Result<bool, KdimError> {
        for e in y {
            let mut rest = y.clone();
            rest.remove(e);
            if self.closure(&rest)?.contains(e) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// An independent subset of size `s`, first in lexicographic order.
    pub fn independent_subset(&self, s: usize) -> Result<Option<BTreeSet<ElemId>>, KdimError> {
        let u = self.universe();
        if s > u.len() {
            return Ok(None);
        }
        let mut idx: Vec<usize> = (0..s).collect();
        loop {
            let y: BTreeSet<ElemId> = idx.iter().map(|i| u[*i]).collect();
            if self.is_independent(&y)? {
                return Ok(Some(y));
            }
            // next s-combination
            let Some(p) = (0..s).rev().find(|p| idx[*p] < u.len() - s + p) else {
                return Ok(None);
            };
            idx[p] += 1;
            for q in p + 1..s {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
}

/// The largest `s ≤ cap` with an independent subset of size s. Subsets of
/// independent sets are independent, so the sizes are searched upwards.
pub fn max_independent_size(m: &KrStructure, cap: usize) -> Result<usize, KdimError> {
    let mut best = 0;
    for s in 1..=cap.min(m.len()) {
        if m.independent_subset(s)?.is_none() {
            break;
        }
        best = s;
    }
    Ok(best)
}

/// Clauses `Kr.1` (the `R_n` partition the tuples), `Kr.2` (`R_n(t)`
/// forces `f_m(t) = t_0` for `n ≤ m < N`) and `Kr.3` (no independent
/// subset of size `r + 2`).
pub fn check_kr0_membership(m: &KrStructure) -> ClauseReport {
    let mut rep = ClauseReport::default();
    let ts = m.tuples();
    let c1 = ts.iter().find(|t| m.classes_of(t).len() != 1).map(|t| format!("{t:?} lies in classes {:?}", m.classes_of(t)));
    rep.push("Kr.1", c1);
    let mut c2 = None;
    'outer: for t in &ts {
        for n in m.classes_of(t) {
            for f in 0..m.trunc_n {
                let v = m.structure.apply(f, t);
                if v.is_none() {
                    c2 = Some(format!("f{f}{t:?} undefined"));
                    break 'outer;
                }
                if f >= n && v != Some(t[0]) {
                    c2 = Some(format!("R{n}{t:?} but f{f}{t:?} = {}", v.unwrap()));
                    break 'outer;
                }
            }
        }
    }
    rep.push("Kr.2", c2);
    let c3 = match m.independent_subset(m.r + 2) {
        Ok(Some(y)) => Some(format!("{y:?} is independent")),
        Ok(None) => None,
        Err(e) => Some(e.to_string()),
    };
    rep.push("Kr.3", c3);
    rep
}

pub fn is_kr0_member(m: &KrStructure) -> bool {
    check_kr0_membership(m).passed()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn discrete(n: u32) -> KrStructure {
        let mut m = KrStructure::with_universe(1, 2, 0..n);
        for t in m.tuples() {
            m.set_tuple(&t, 0, &[]);
        }
        m
    }

    #[test]
    fn empty_structure_is_a_member() {
        let m = KrStructure::empty(1, 6);
        assert!(check_kr0_membership(&m).passed());
        assert_eq!(max_independent_size(&m, 3).unwrap(), 0);
        assert!(m.closure(&BTreeSet::new()).unwrap().is_empty());
    }

    #[test]
    fn projections_leave_everything_independent() {
        let m = discrete(3);
        assert_eq!(max_independent_size(&m, 3).unwrap(), 3);
        assert_eq!(check_kr0_membership(&m).failing(), vec!["Kr.3"]);
        let full: BTreeSet<ElemId> = (0..3).collect();
        assert_eq!(m.closure(&full).unwrap(), full);
    }

    #[test]
    fn a_function_value_kills_independence() {
        let mut m = discrete(3);
        m.set_tuple(&[0, 1], 1, &[2]);
        assert!(m.closure(&BTreeSet::from([0, 1])).unwrap().contains(&2));
        assert!(check_kr0_membership(&m).passed());
        assert!(max_independent_size(&m, 3).unwrap() <= 2);
    }

    #[test]
    fn mutants_fail_their_clause() {
        let mut m = discrete(2);
        m.structure.set_relation(1, vec![0, 1], true);
        assert_eq!(check_kr0_membership(&m).failing(), vec!["Kr.1"]);
        let mut m = discrete(2);
        m.set_tuple(&[0, 1], 0, &[]);
        m.structure.set_function(1, vec![0, 1], Some(1));
        assert_eq!(check_kr0_membership(&m).failing(), vec!["Kr.2"]);
    }
}
