use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::{K1Structure, K1Witness};
use crate::bitset::AtomSet;
use crate::boolean_algebra::{independent_over, PrincipalIdeal, Subalgebra};

/// One checked clause. `detail` says what failed; it is empty on success.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub clause: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseReport {
    pub clauses: Vec<ClauseResult>,
}

impl ClauseReport {
    pub fn push(&mut self, clause: impl Into<String>, failure: Option<String>) {
        self.clauses.push(ClauseResult {
            clause: clause.into(),
            passed: failure.is_none(),
            detail: failure.unwrap_or_default(),
        });
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.clauses.iter().filter(|c| !c.passed).map(|c| c.clause.as_str()).collect()
    }

    pub fn extend(&mut self, other: ClauseReport) {
        self.clauses.extend(other.clauses);
    }
}

impl fmt::Display for ClauseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{mark} {}", c.clause)?;
            } else {
                writeln!(f, "{mark} {}: {}", c.clause, c.detail)?;
            }
        }
        Ok(())
    }
}

fn fail_if(cond: bool, msg: impl FnOnce() -> String) -> Option<String> {
    cond.then(msg)
}

/// The clauses of the wider class (structures generated over a finite X),
/// reported as `K-1.1` .. `K-1.8`.
pub fn check_kminus1(m: &K1Structure) -> ClauseReport {
    let mut r = ClauseReport::default();
    let atoms = m.atoms();

    let mut seen = BTreeSet::new();
    let dup = m.p0.iter().chain(&m.p2).find(|id| !seen.insert(**id));
    r.push("K-1.1", dup.map(|id| format!("id {id} occurs twice among P0, P2")));

    // P1 is stored as a power-set algebra and R as `G1(a) ≤ b`, so the
    // Boolean-algebra and homomorphism clauses hold by construction; only
    // shape errors in the stored data can break them.
    let shape = m.algebra.designated().len() != atoms
        || m.f.iter().flatten().flatten().chain(&m.free_generators).any(|x| x.len() != atoms);
    r.push("K-1.2", fail_if(shape, || "element with wrong atom count".into()));
    let g1_range = m.g1.len() != m.p0.len() || m.g1.iter().any(|a| *a >= atoms);
    r.push("K-1.3", fail_if(g1_range, || "G1 table does not match P0".into()));
    if shape || g1_range {
        return r;
    }

    let hit: BTreeSet<usize> = m.g1.iter().copied().collect();
    let unhit = m.b_star().iter().find(|a| !hit.contains(a));
    let free_atoms = m.free_part().count();
    let c4 = if let Some(a) = unhit {
        Some(format!("designated atom {a} has empty trace"))
    } else if m.p2.is_empty() && m.free_generators.is_empty() && free_atoms > 1 {
        Some(format!("{free_atoms} atoms outside P4 with nothing to separate them"))
    } else {
        None
    };
    r.push("K-1.4", c4);

    let c5 = if let Some(i) = (0..m.p0.len()).find(|i| !m.b_star().contains(m.g1[*i])) {
        Some(format!("G1({}) is not a designated atom", m.p0[i]))
    } else if hit.len() != m.g1.len() {
        Some("G1 is not injective".into())
    } else {
        None
    };
    r.push("K-1.5", c5);

    let bad_row = (0..m.p2.len()).find(|c| m.f.get(*c).is_none_or(|row| row.len() != m.trunc_n || row.iter().any(Option::is_none)));
    let c6 = if m.f.len() != m.p2.len() {
        Some(format!("F table has {} rows for {} elements of P2", m.f.len(), m.p2.len()))
    } else {
        bad_row.map(|c| format!("F_n({}) not defined exactly for n < {}", m.p2[c], m.trunc_n))
    };
    r.push("K-1.6", c6);

    let mut c7 = None;
    for (c, row) in m.f.iter().enumerate() {
        if m.trunc_n == 0 || row.is_empty() {
            continue;
        }
        let mut below_all = m.b_star().clone();
        for v in row.iter().flatten() {
            below_all = below_all.meet(v);
        }
        if let Some(a) = below_all.first() {
            c7 = Some(format!("designated atom {a} lies below F_n({}) for every n < N", m.p2[c]));
            break;
        }
    }
    r.push("K-1.7", c7);

    let gen = m.generated();
    r.push(
        "K-1.8",
        fail_if(gen.cell_count() != atoms, || {
            format!("P0, F values and X generate {} of {atoms} atoms", gen.cell_count())
        }),
    );
    r
}

pub fn designated_singletons(m: &K1Structure) -> Vec<AtomSet> {
    m.b_star().iter().map(|a| AtomSet::singleton(m.atoms(), a)).collect()
}

/// `⟨P4 ∪ extra⟩`.
pub fn over_p4(m: &K1Structure, extra: &[AtomSet]) -> Subalgebra {
    Subalgebra::generated_by(m.atoms(), designated_singletons(m).iter().chain(extra))
}

/// The chain `B_n = ⟨P4 ∪ {F_m(c) : m < n}⟩`, `n_star ≤ n ≤ N`.
pub fn canonical_witness(m: &K1Structure, n_star: usize) -> K1Witness {
    let chain = (n_star..=m.trunc_n.max(n_star)).map(|n| over_p4(m, &m.values_below(n))).collect();
    K1Witness {
        n_star,
        b_star: m.b_star().clone(),
        chain,
    }
}

/// The witness clauses `K0.1` .. `K0.7` for `m` and `w`.
pub fn check_k1_witness(m: &K1Structure, w: &K1Witness) -> ClauseReport {
    let mut r = ClauseReport::default();
    let atoms = m.atoms();
    let n = m.trunc_n;
    let ideal = PrincipalIdeal::new(m.b_star().clone());

    r.push("K0.1", fail_if(&w.b_star != m.b_star(), || "b* is not the join of P4,1".into()));

    let shape_ok = w.n_star <= n && w.chain.len() == n - w.n_star + 1 && w.chain.iter().all(|b| b.ambient_atoms() == atoms);
    let c2 = if !shape_ok {
        Some(format!("chain must list B_n for {} ≤ n ≤ {n}", w.n_star))
    } else {
        (1..w.chain.len())
            .find(|i| !w.chain[i - 1].is_subalgebra_of(&w.chain[*i]))
            .map(|i| format!("B_{} is not contained in B_{}", w.n_star + i - 1, w.n_star + i))
    };
    r.push("K0.2", c2);
    if !shape_ok {
        return r;
    }
    let base = &w.chain[0];

    let expected = over_p4(m, &m.values_below(w.n_star));
    let outside = base.cells().iter().filter(|c| !c.is_subset(m.b_star())).count();
    let c3 = if designated_singletons(m).iter().any(|s| !base.contains(s)) {
        Some("B_{n*} does not contain P4".into())
    } else if outside == 0 {
        Some("B_{n*} adds nothing to P4".into())
    } else if base != &expected {
        Some("B_{n*} is not generated by P4 and the F_n(c), n < n*".into())
    } else if !outside.is_power_of_two() {
        Some(format!("B_{{n*}}/P4 has {outside} atoms, not a power of two"))
    } else {
        None
    };
    r.push("K0.3", c3);

    let last = w.chain.last().unwrap();
    r.push(
        "K0.4",
        fail_if(last.cell_count() != atoms, || format!("B_N has {} of {atoms} atoms", last.cell_count())),
    );

    // F_n(c) for n ≥ N are absent; they would be disjoint from b* and
    // independent, so every minterm of the visible values must meet the
    // free part for the full sequence to be independent.
    let free = m.free_part();
    let mut c5 = None;
    for (c, row) in m.f.iter().enumerate() {
        let vals: Vec<AtomSet> = row.iter().flatten().map(|v| v.meet(&free)).collect();
        let whole = Subalgebra::trivial(atoms);
        if !independent_over(&whole, &vals, &ideal) {
            c5 = Some(format!("F_n({}) are not independent", m.p2[c]));
            break;
        }
    }
    r.push("K0.5", c5);

    let tails = m.values_from(w.n_star);
    let c6 = if let Some(t) = tails.iter().find(|t| t.intersects(m.b_star())) {
        Some(format!("tail value {t:?} meets b*"))
    } else {
        fail_if(!independent_over(base, &tails, &ideal), || {
            "tails are not free from B_{n*} over P4".into()
        })
    };
    r.push("K0.6", c6);

    let mut c7 = None;
    for (i, bn) in w.chain.iter().enumerate().skip(1) {
        let step: Vec<AtomSet> = m.f.iter().flat_map(|row| row.iter().skip(w.n_star).take(i).flatten().cloned()).collect();
        let b = base.refined_by(&step);
        if bn != &b {
            c7 = Some(format!("B_{} is not generated by B_{{n*}} and earlier tails", w.n_star + i));
            break;
        }
    }
    r.push("K0.7", c7);
    r
}

/// Both clause groups; the witness clauses are skipped when `w` is `None`.
pub fn check_k1(m: &K1Structure, w: Option<&K1Witness>) -> ClauseReport {
    let mut r = check_kminus1(m);
    match w {
        Some(w) => r.extend(check_k1_witness(m, w)),
        None => r.push("K0", Some("no witness".into())),
    }
    r
}

/// The least `n*` whose canonical chain passes every witness clause.
pub fn find_witness(m: &K1Structure) -> Option<K1Witness> {
    (0..=m.trunc_n)
        .filter(|ns| m.values_from(*ns).iter().all(|v| !v.intersects(m.b_star())))
        .map(|ns| canonical_witness(m, ns))
        .find(|w| check_k1_witness(m, w).passed())
}

pub fn is_k1_member(m: &K1Structure) -> bool {
    check_kminus1(m).passed() && find_witness(m).is_some()
}
