use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::structure::{check_kr0_membership, KrStructure};
use super::KdimError;
use crate::structure::{tuples, ElemId};

/// A sequence of structures over one id space; they overlap where ids
/// coincide.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KConfiguration {
    pub parts: Vec<KrStructure>,
}

impl KConfiguration {
    pub fn union(&self) -> BTreeSet<ElemId> {
        self.parts.iter().flat_map(|m| m.universe().iter().copied()).collect()
    }

    /// Same vocabulary, every part a member, and parts agree on the tuples
    /// they share.
    pub fn validate(&self) -> Result<(), KdimError> {
        let Some(first) = self.parts.first() else {
            return Err(KdimError::InvalidConfiguration("no parts".into()));
        };
        for (i, m) in self.parts.iter().enumerate() {
            if (m.r, m.trunc_n) != (first.r, first.trunc_n) {
                return Err(KdimError::InvalidConfiguration(format!("part {i} has a different vocabulary")));
            }
            let rep = check_kr0_membership(m);
            if !rep.passed() {
                return Err(KdimError::InvalidConfiguration(format!("part {i} fails {}", rep.failing().join(", "))));
            }
        }
        for (i, a) in self.parts.iter().enumerate() {
            for (j, b) in self.parts.iter().enumerate().skip(i + 1) {
                let shared: Vec<ElemId> = a.universe().iter().copied().filter(|e| b.structure.contains(*e)).collect();
                if let Some(t) = tuples(&shared, a.r + 1).into_iter().find(|t| a.tuple_data(t) != b.tuple_data(t)) {
                    return Err(KdimError::InvalidConfiguration(format!("parts {i} and {j} disagree on {t:?}")));
                }
            }
        }
        Ok(())
    }
}

/// Number of ways to give a tuple a class below `n` and values from `w`
/// elements: `sum_{c<n} w^c`.
pub fn option_count(w: usize, n: usize) -> usize {
    (0..n).map(|c| w.pow(c as u32)).sum()
}

/// The `o`-th option in the search order: classes increasing, then value
/// tuples lexicographically over `pool`.
pub fn option_at(pool: &[ElemId], n: usize, mut o: usize) -> (usize, Vec<ElemId>) {
    for c in 0..n {
        let size = pool.len().pow(c as u32);
        if o < size {
            let mut vals = vec![0; c];
            for slot in (0..c).rev() {
                vals[slot] = pool[o % pool.len()];
                o /= pool.len();
            }
            return (c, vals);
        }
        o -= size;
    }
    panic!("option index out of range")
}

/// Tuples of the union not inside any single part, lexicographically.
pub fn cross_tuples(config: &KConfiguration) -> Vec<Vec<ElemId>> {
    let u: Vec<ElemId> = config.union().into_iter().collect();
    let r = config.parts.first().map_or(1, |m| m.r);
    tuples(&u, r + 1)
        .into_iter()
        .filter(|t| !config.parts.iter().any(|m| t.iter().all(|e| m.structure.contains(*e))))
        .collect()
}

/// The union with every part's tuples copied in and cross tuples unset.
pub fn union_skeleton(config: &KConfiguration) -> KrStructure {
    let first = &config.parts[0];
    let mut n = KrStructure::with_universe(first.r, first.trunc_n, config.union());
    for m in &config.parts {
        for t in m.tuples() {
            let (c, vals) = m.tuple_data(&t).expect("validated part");
            n.set_tuple(&t, c, &vals);
        }
    }
    n
}

/// A member with universe exactly the union of the parts that contains
/// every part as a substructure. Cross tuples are assigned in
/// lexicographic order; the first completion found is returned.
/// `leaf_budget` bounds the number of complete assignments tried.
pub fn frugal_amalgamate(config: &KConfiguration, leaf_budget: usize) -> Result<KrStructure, KdimError> {
    config.validate()?;
    let union = config.union();
    if let Some(i) = config.parts.iter().position(|m| m.len() == union.len()) {
        return Err(KdimError::FrugalImpossible(i));
    }
    let mut n = union_skeleton(config);
    let cross = cross_tuples(config);
    let pool: Vec<ElemId> = union.into_iter().collect();
    let count = option_count(pool.len(), n.trunc_n);
    let mut choice = vec![0usize; cross.len()];
    for (t, o) in cross.iter().zip(&choice) {
        let (c, v) = option_at(&pool, n.trunc_n, *o);
        n.set_tuple(t, c, &v);
    }
    let mut leaves = 0usize;
    loop {
        leaves += 1;
        if leaves > leaf_budget {
            return Err(KdimError::SearchBudgetExceeded(leaf_budget));
        }
        if n.independent_subset(n.r + 2)?.is_none() {
            return Ok(n);
        }
        // odometer step, last tuple fastest
        let Some(p) = (0..cross.len()).rev().find(|p| choice[*p] + 1 < count) else {
            return Err(KdimError::NoAmalgam);
        };
        choice[p] += 1;
        for q in p + 1..cross.len() {
            choice[q] = 0;
        }
        for q in p..cross.len() {
            let (c, v) = option_at(&pool, n.trunc_n, choice[q]);
            n.set_tuple(&cross[q], c, &v);
        }
    }
}
